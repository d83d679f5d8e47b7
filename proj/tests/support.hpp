// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the test suites.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "secscan/netlist.hpp"

namespace secscan::testing {

inline std::string fixture(const std::string& name) { return std::string(SECSCAN_FIXTURES) + "/" + name; }

/// Random well-formed netlist. Gate inputs draw from earlier nets only, so it
/// is acyclic by construction; every gate without fanout becomes an output.
inline Netlist random_netlist(std::uint64_t seed, int n_inputs, int n_dffs, int n_gates, int max_arity = 3) {
  std::mt19937_64 rng(seed);
  NetlistBuilder b("rand" + std::to_string(seed));
  std::vector<std::string> nets;
  for (int i = 0; i < n_inputs; ++i) {
    nets.push_back("i" + std::to_string(i));
    b.add_input(nets.back());
  }
  std::vector<std::string> q;
  for (int i = 0; i < n_dffs; ++i) {
    q.push_back("q" + std::to_string(i));
    nets.push_back(q.back());
  }
  const GateKind kinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,  GateKind::Nor,
                            GateKind::Xor, GateKind::Xnor, GateKind::Not, GateKind::Buf};
  std::map<std::string, int> fanout;
  std::vector<std::string> gate_nets;
  for (int g = 0; g < n_gates; ++g) {
    GateKind k = kinds[rng() % 8];
    int arity = (k == GateKind::Not || k == GateKind::Buf) ? 1 : 2 + static_cast<int>(rng() % (max_arity - 1));
    std::vector<std::string> ins;
    for (int a = 0; a < arity; ++a) {
      // Bias toward recent nets for depth.
      std::size_t span = std::min<std::size_t>(nets.size(), 12);
      std::size_t idx = (rng() % 3 == 0) ? rng() % nets.size() : nets.size() - 1 - rng() % span;
      ins.push_back(nets[idx]);
      fanout[nets[idx]]++;
    }
    std::string out = "g" + std::to_string(g);
    b.add_gate(out, k, ins);
    nets.push_back(out);
    gate_nets.push_back(out);
  }
  for (int i = 0; i < n_dffs; ++i) {
    const std::string& d = gate_nets.empty() ? nets[rng() % nets.size()] : gate_nets[rng() % gate_nets.size()];
    b.add_dff(q[i], d);
    fanout[d]++;
  }
  bool any = false;
  for (const auto& g : gate_nets)
    if (fanout[g] == 0) {
      b.add_output(g);
      any = true;
    }
  if (!any) b.add_output(gate_nets.empty() ? nets.back() : gate_nets.back());
  return b.build();
}

/// Slow reference evaluator by recursive descent over net names. Written
/// independently of the word-parallel evaluator.
inline std::map<std::string, bool> reference_eval(const Netlist& n, const std::map<std::string, bool>& src) {
  std::map<std::string, bool> memo = src;
  std::function<bool(NetId)> value = [&](NetId id) -> bool {
    auto it = memo.find(n.net_name(id));
    if (it != memo.end()) return it->second;
    const Gate& g = n.gates()[n.driver(id).index];
    std::vector<bool> v;
    for (NetId in : g.inputs) v.push_back(value(in));
    bool all = true, any = false, parity = false;
    for (bool b : v) {
      all = all && b;
      any = any || b;
      parity = parity != b;
    }
    bool r = false;
    switch (g.kind) {
      case GateKind::And: r = all; break;
      case GateKind::Nand: r = !all; break;
      case GateKind::Or: r = any; break;
      case GateKind::Nor: r = !any; break;
      case GateKind::Xor: r = parity; break;
      case GateKind::Xnor: r = !parity; break;
      case GateKind::Not: r = !v[0]; break;
      case GateKind::Buf: r = v[0]; break;
    }
    memo[n.net_name(id)] = r;
    return r;
  };
  for (NetId id = 0; id < n.num_nets(); ++id) value(id);
  return memo;
}

inline BitAssignment random_sources(const Netlist& n, std::mt19937_64& rng) {
  BitAssignment a;
  for (NetId id : n.sources()) a[n.net_name(id)] = (rng() & 1) != 0;
  return a;
}

}  // namespace secscan::testing
