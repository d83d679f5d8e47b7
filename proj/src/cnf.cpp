// SPDX-License-Identifier: Apache-2.0
#include "secscan/cnf.hpp"

#include <cstdlib>
#include <sstream>

#include "secscan/error.hpp"

namespace secscan {

void CnfFormula::add_clause(std::span<const int> lits) {
  if (lits.empty()) throw InvalidArgument("empty clause");
  for (int x : lits)
    if (x == 0 || std::abs(x) > num_vars_) throw InvalidArgument("literal " + std::to_string(x) + " out of range");
  clauses_.emplace_back(lits.begin(), lits.end());
}

int CnfFormula::var(std::string_view tag, std::string_view net) const {
  std::string key(tag);
  key += '/';
  key += net;
  auto it = var_of_net_.find(key);
  if (it == var_of_net_.end()) throw UnknownNet(key);
  return it->second;
}

void CnfFormula::name_var(std::string_view tag, std::string_view net, int var) {
  std::string key(tag);
  key += '/';
  key += net;
  var_of_net_[key] = var;
}

std::string CnfFormula::to_dimacs() const {
  std::ostringstream out;
  out << "p cnf " << num_vars_ << " " << clauses_.size() << "\n";
  for (const auto& c : clauses_) {
    for (int x : c) out << x << " ";
    out << "0\n";
  }
  return out.str();
}

void CnfFormula::copy_into(ClauseSink& sink) const {
  std::vector<int> map(static_cast<std::size_t>(num_vars_) + 1, 0);
  for (int v = 1; v <= num_vars_; ++v) map[static_cast<std::size_t>(v)] = sink.new_var();
  std::vector<int> buf;
  for (const auto& c : clauses_) {
    buf.clear();
    for (int x : c) buf.push_back(x > 0 ? map[static_cast<std::size_t>(x)] : -map[static_cast<std::size_t>(-x)]);
    sink.add_clause(buf);
  }
}

namespace {

void encode_and(ClauseSink& s, int out, std::span<const int> ins) {
  std::vector<int> big{out};
  for (int a : ins) {
    s.add_clause({-out, a});
    big.push_back(-a);
  }
  s.add_clause(big);
}

void encode_xor_direct(ClauseSink& s, int out, std::span<const int> ins) {
  // out XOR ins... = 0: forbid every assignment of odd total parity.
  const std::size_t n = ins.size() + 1;
  std::vector<int> lits(ins.begin(), ins.end());
  lits.push_back(out);
  std::vector<int> clause(n);
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (__builtin_popcount(mask) % 2 == 0) continue;
    // mask marks literals assigned true in the forbidden assignment.
    for (std::size_t k = 0; k < n; ++k) clause[k] = (mask >> k) & 1U ? -lits[k] : lits[k];
    s.add_clause(clause);
  }
}

}  // namespace

int encode_xor2(ClauseSink& s, int a, int b) {
  int out = s.new_var();
  const int ins[2] = {a, b};
  encode_xor_direct(s, out, ins);
  return out;
}

int encode_or(ClauseSink& s, std::span<const int> lits) {
  if (lits.empty()) return -s.true_var();
  if (lits.size() == 1) return lits[0];
  int out = s.new_var();
  std::vector<int> neg;
  for (int l : lits) neg.push_back(-l);
  encode_and(s, -out, neg);
  return out;
}

void encode_gate(ClauseSink& s, GateKind kind, int out, std::span<const int> ins) {
  switch (kind) {
    case GateKind::Buf:
      s.add_clause({-out, ins[0]});
      s.add_clause({out, -ins[0]});
      return;
    case GateKind::Not:
      s.add_clause({-out, -ins[0]});
      s.add_clause({out, ins[0]});
      return;
    case GateKind::And: encode_and(s, out, ins); return;
    case GateKind::Nand: encode_and(s, -out, ins); return;
    case GateKind::Or:
    case GateKind::Nor: {
      std::vector<int> neg;
      for (int a : ins) neg.push_back(-a);
      encode_and(s, kind == GateKind::Or ? -out : out, neg);
      return;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      const int target = kind == GateKind::Xor ? out : -out;
      if (ins.size() <= 5) {
        encode_xor_direct(s, target, ins);
        return;
      }
      int acc = ins[0];
      for (std::size_t k = 1; k + 1 < ins.size(); ++k) acc = encode_xor2(s, acc, ins[k]);
      const int last[2] = {acc, ins.back()};
      encode_xor_direct(s, target, last);
      return;
    }
  }
}

std::vector<int> encode_netlist(ClauseSink& s, const Netlist& n, std::span<const int> source_lits) {
  if (!source_lits.empty() && source_lits.size() != n.num_sources())
    throw InvalidArgument("source literal count mismatch");
  std::vector<int> lit(n.num_nets(), 0);
  std::size_t k = 0;
  for (NetId id : n.sources()) {
    int given = source_lits.empty() ? 0 : source_lits[k];
    lit[id] = given != 0 ? given : s.new_var();
    ++k;
  }
  std::vector<int> ins;
  for (std::uint32_t gi : n.topo_order()) {
    const Gate& g = n.gates()[gi];
    lit[g.output] = s.new_var();
    ins.clear();
    for (NetId in : g.inputs) ins.push_back(lit[in]);
    encode_gate(s, g.kind, lit[g.output], ins);
  }
  return lit;
}

std::vector<int> to_cnf(CnfFormula& f, const Netlist& n, std::string_view copy_tag) {
  auto lits = encode_netlist(f, n);
  for (NetId id = 0; id < n.num_nets(); ++id) f.name_var(copy_tag, n.net_name(id), lits[id]);
  return lits;
}

CnfFormula to_cnf(const Netlist& n, std::string_view copy_tag) {
  CnfFormula f;
  to_cnf(f, n, copy_tag);
  return f;
}

}  // namespace secscan
