// SPDX-License-Identifier: Apache-2.0
#include "secscan/locking.hpp"

#include <algorithm>
#include <cctype>
#include <bit>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

#include "secscan/cnf.hpp"
#include "secscan/error.hpp"
#include "secscan/rng.hpp"
#include "secscan/sat.hpp"

namespace secscan {

std::string_view to_string(LockStrategy s) { return s == LockStrategy::Rll ? "RLL" : "SLL_LIKE"; }

LockStrategy parse_lock_strategy(std::string_view s) {
  std::string u(s);
  for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "RLL") return LockStrategy::Rll;
  if (u == "SLL_LIKE" || u == "SLL") return LockStrategy::SllLike;
  throw InvalidArgument("unknown locking strategy '" + std::string(s) + "'");
}

std::string key_input_name(std::size_t i) { return "keyinput_" + std::to_string(i); }

std::vector<NetId> LockedDesign::key_inputs() const {
  std::vector<NetId> out;
  out.reserve(secret_key.size());
  for (std::size_t i = 0; i < secret_key.size(); ++i) out.push_back(netlist.net(key_input_name(i)));
  return out;
}

namespace {

using Bits = std::vector<std::uint64_t>;

// Per-net transitive fan-in as bitsets over all nets.
std::vector<Bits> ancestor_sets(const Netlist& n) {
  const std::size_t words = (n.num_nets() + 63) / 64;
  std::vector<Bits> anc(n.num_nets(), Bits(words, 0));
  for (std::uint32_t gi : n.topo_order()) {
    const Gate& g = n.gates()[gi];
    Bits& dst = anc[g.output];
    for (NetId in : g.inputs) {
      const Bits& src = anc[in];
      for (std::size_t w = 0; w < words; ++w) dst[w] |= src[w];
      dst[in / 64] |= 1ULL << (in % 64);
    }
  }
  return anc;
}

bool test_bit(const Bits& b, NetId id) { return (b[id / 64] >> (id % 64)) & 1ULL; }

std::vector<NetId> select_sll_like(const Netlist& n, const std::vector<NetId>& cand, std::size_t k, Rng& rng) {
  auto anc = ancestor_sets(n);
  const std::size_t words = anc.empty() ? 0 : anc[0].size();
  // reach[i]: ancestors of cand[i] plus the candidates below it.
  std::vector<Bits> reach(cand.size(), Bits(words, 0));
  for (std::size_t i = 0; i < cand.size(); ++i) reach[i] = anc[cand[i]];
  for (std::size_t i = 0; i < cand.size(); ++i) {
    // every candidate u having cand[i] as ancestor is a descendant of cand[i]
    for (std::size_t j = 0; j < cand.size(); ++j)
      if (test_bit(anc[cand[j]], cand[i])) reach[i][cand[j] / 64] |= 1ULL << (cand[j] % 64);
  }
  std::vector<std::size_t> degree(cand.size(), 0);
  for (std::size_t i = 0; i < cand.size(); ++i)
    for (std::size_t j = 0; j < cand.size(); ++j)
      if (i != j && test_bit(reach[i], cand[j])) ++degree[i];

  std::vector<std::size_t> score(cand.size(), 0);
  std::vector<char> taken(cand.size(), 0);
  std::vector<NetId> out;
  auto take = [&](std::size_t i) {
    taken[i] = 1;
    out.push_back(cand[i]);
    for (std::size_t j = 0; j < cand.size(); ++j)
      if (!taken[j] && test_bit(reach[i], cand[j])) ++score[j];
  };
  take(rng.uniform(cand.size()));
  while (out.size() < k) {
    std::size_t best = cand.size();
    for (std::size_t j = 0; j < cand.size(); ++j) {
      if (taken[j]) continue;
      if (best == cand.size()) {
        best = j;
        continue;
      }
      if (score[j] != score[best]) {
        if (score[j] > score[best]) best = j;
        continue;
      }
      if (degree[j] != degree[best]) {
        if (degree[j] > degree[best]) best = j;
        continue;
      }
      if (n.net_name(cand[j]) < n.net_name(cand[best])) best = j;
    }
    take(best);
  }
  return out;
}

std::string fresh_name(const std::unordered_set<std::string>& used, std::string base) {
  while (used.count(base)) base += '_';
  return base;
}

}  // namespace

LockedDesign insert_key_gates(const Netlist& n, std::size_t k, LockStrategy strategy, std::uint64_t seed) {
  std::vector<char> is_po(n.num_nets(), 0);
  for (NetId id : n.outputs()) is_po[id] = 1;
  std::vector<NetId> cand;
  for (const Gate& g : n.gates()) {
    const std::string& name = n.net_name(g.output);
    if (is_po[g.output] || name.rfind("keyinput_", 0) == 0) continue;
    cand.push_back(g.output);
  }
  if (k > cand.size())
    throw TooManyKeys(std::to_string(k) + " key gates requested, " + std::to_string(cand.size()) +
                      " eligible nets");

  Rng rng(seed);
  std::vector<NetId> chosen;
  if (k > 0) {
    if (strategy == LockStrategy::Rll) {
      std::vector<NetId> pool = cand;
      rng.shuffle(pool);
      chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      chosen = select_sll_like(n, cand, k, rng);
    }
  }

  LockedDesign ld;
  ld.strategy = strategy;
  ld.seed = seed;
  std::unordered_map<NetId, std::size_t> key_of;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    bool bit = rng.bit();
    ld.secret_key.push_back(bit);
    ld.placements.push_back({n.net_name(chosen[i]), bit ? GateKind::Xnor : GateKind::Xor, i});
    key_of[chosen[i]] = i;
  }

  std::unordered_set<std::string> used;
  for (NetId id = 0; id < n.num_nets(); ++id) used.insert(n.net_name(id));
  for (std::size_t i = 0; i < k; ++i) {
    if (used.count(key_input_name(i))) throw DuplicateNet(key_input_name(i) + " already present");
    used.insert(key_input_name(i));
  }

  NetlistBuilder b(n.name());
  for (NetId id : n.inputs()) b.add_input(n.net_name(id));
  for (std::size_t i = 0; i < k; ++i) b.add_input(key_input_name(i));
  for (NetId id : n.outputs()) b.add_output(n.net_name(id));
  for (const Dff& d : n.dffs()) b.add_dff(n.net_name(d.q), n.net_name(d.d));
  for (const Gate& g : n.gates()) {
    std::vector<std::string> ins;
    for (NetId in : g.inputs) ins.push_back(n.net_name(in));
    auto it = key_of.find(g.output);
    if (it == key_of.end()) {
      b.add_gate(n.net_name(g.output), g.kind, std::move(ins));
      continue;
    }
    const std::size_t i = it->second;
    const std::string pre = fresh_name(used, n.net_name(g.output) + "_kp" + std::to_string(i));
    used.insert(pre);
    b.add_gate(pre, g.kind, std::move(ins));
    b.add_gate(n.net_name(g.output), ld.placements[i].kind, {pre, key_input_name(i)});
  }
  ld.netlist = b.build();
  return ld;
}

Netlist apply_key(const LockedDesign& ld, const Key& key) {
  if (key.size() != ld.key_size())
    throw KeyLengthMismatch("key has " + std::to_string(key.size()) + " bits, design expects " +
                            std::to_string(ld.key_size()));
  const Netlist& n = ld.netlist;
  // Constant state per net: -1 unknown, 0/1 constant.
  std::vector<int> cval(n.num_nets(), -1);
  std::vector<char> is_key(n.num_nets(), 0);
  for (std::size_t i = 0; i < key.size(); ++i) {
    NetId id = n.net(key_input_name(i));
    cval[id] = key[i] ? 1 : 0;
    is_key[id] = 1;
  }

  struct Folded {
    GateKind kind;
    std::vector<NetId> inputs;
  };
  std::vector<std::optional<Folded>> folded(n.gates().size());
  for (std::uint32_t gi : n.topo_order()) {
    const Gate& g = n.gates()[gi];
    std::vector<NetId> live;
    bool invert = false;
    int forced = -1;
    const bool and_like = g.kind == GateKind::And || g.kind == GateKind::Nand;
    const bool or_like = g.kind == GateKind::Or || g.kind == GateKind::Nor;
    const bool xor_like = g.kind == GateKind::Xor || g.kind == GateKind::Xnor;
    for (NetId in : g.inputs) {
      if (cval[in] < 0) {
        live.push_back(in);
        continue;
      }
      const int c = cval[in];
      if (and_like && c == 0) forced = 0;
      if (or_like && c == 1) forced = 1;
      if (xor_like && c == 1) invert = !invert;
    }
    const bool out_inv = g.kind == GateKind::Nand || g.kind == GateKind::Nor || g.kind == GateKind::Xnor ||
                         g.kind == GateKind::Not;
    if (forced >= 0) {
      cval[g.output] = forced ^ (out_inv ? 1 : 0);
      continue;
    }
    if (live.empty()) {
      int base = 0;
      if (and_like) base = 1;
      if (or_like) base = 0;
      if (xor_like) base = invert ? 1 : 0;
      if (g.kind == GateKind::Not || g.kind == GateKind::Buf) base = cval[g.inputs[0]];
      cval[g.output] = base ^ (out_inv ? 1 : 0);
      continue;
    }
    if (live.size() == g.inputs.size()) {
      folded[gi] = Folded{g.kind, live};
      continue;
    }
    GateKind k = g.kind;
    if (live.size() == 1) {
      bool inv = out_inv;
      if (xor_like) inv = inv != invert;
      k = inv ? GateKind::Not : GateKind::Buf;
    } else if (xor_like && invert) {
      k = g.kind == GateKind::Xor ? GateKind::Xnor : GateKind::Xor;
    }
    folded[gi] = Folded{k, live};
  }

  NetlistBuilder b(n.name());
  for (NetId id : n.inputs())
    if (!is_key[id]) b.add_input(n.net_name(id));
  for (NetId id : n.outputs()) b.add_output(n.net_name(id));
  for (const Dff& d : n.dffs()) b.add_dff(n.net_name(d.q), n.net_name(d.d));
  std::string const_net[2];
  auto constant = [&](int v) -> const std::string& {
    if (const_net[v].empty()) {
      if (n.inputs().size() == key.size())
        throw InvalidArgument("cannot materialize a constant without a primary input");
      NetId pi = 0;
      for (NetId id : n.inputs())
        if (!is_key[id]) {
          pi = id;
          break;
        }
      const std::string inv = n.net_name(pi) + "_cinv";
      if (!n.find_net(inv) && const_net[0].empty() && const_net[1].empty())
        b.add_gate(inv, GateKind::Not, {n.net_name(pi)});
      const_net[v] = n.net_name(pi) + (v ? "_c1" : "_c0");
      b.add_gate(const_net[v], v ? GateKind::Or : GateKind::And, {n.net_name(pi), inv});
    }
    return const_net[v];
  };
  for (std::uint32_t gi = 0; gi < n.gates().size(); ++gi) {
    const Gate& g = n.gates()[gi];
    if (folded[gi]) {
      std::vector<std::string> ins;
      for (NetId in : folded[gi]->inputs) ins.push_back(n.net_name(in));
      b.add_gate(n.net_name(g.output), folded[gi]->kind, std::move(ins));
    }
  }
  // Constant nets that something still reads get a driver.
  std::unordered_set<NetId> needed;
  for (std::uint32_t gi = 0; gi < n.gates().size(); ++gi)
    if (folded[gi])
      for (NetId in : folded[gi]->inputs)
        if (cval[in] >= 0) needed.insert(in);
  for (NetId id : n.outputs())
    if (cval[id] >= 0) needed.insert(id);
  for (const Dff& d : n.dffs())
    if (cval[d.d] >= 0) needed.insert(d.d);
  std::vector<NetId> sorted(needed.begin(), needed.end());
  std::sort(sorted.begin(), sorted.end());
  for (NetId id : sorted) {
    if (is_key[id]) throw InvalidArgument("key input " + n.net_name(id) + " read outside a key gate");
    b.add_gate(n.net_name(id), GateKind::Buf, {constant(cval[id])});
  }
  return b.build();
}

std::optional<std::vector<bool>> find_difference(const Netlist& a, const Netlist& b) {
  auto names = [](const Netlist& n, std::span<const NetId> ids) {
    std::vector<std::string> out;
    for (NetId id : ids) out.push_back(n.net_name(id));
    std::sort(out.begin(), out.end());
    return out;
  };
  auto qs = [](const Netlist& n) {
    std::vector<NetId> out;
    for (const Dff& d : n.dffs()) out.push_back(d.q);
    return out;
  };
  if (names(a, a.inputs()) != names(b, b.inputs()) || names(a, a.outputs()) != names(b, b.outputs()) ||
      names(a, qs(a)) != names(b, qs(b)))
    throw SignatureMismatch("netlists " + a.name() + " and " + b.name() + " differ in inputs, outputs or state");

  const std::vector<NetId> src_a = a.sources();
  std::vector<std::size_t> b_pos(src_a.size());
  {
    std::vector<NetId> src_b = b.sources();
    std::unordered_map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < src_b.size(); ++i) at[b.net_name(src_b[i])] = i;
    for (std::size_t i = 0; i < src_a.size(); ++i) b_pos[i] = at.at(a.net_name(src_a[i]));
  }
  // Observation points: outputs by name, next-state by q-net name.
  std::vector<std::pair<NetId, NetId>> obs;
  for (NetId o : a.outputs()) obs.emplace_back(o, b.net(a.net_name(o)));
  std::unordered_map<std::string, NetId> b_d;
  for (const Dff& d : b.dffs()) b_d[b.net_name(d.q)] = d.d;
  for (const Dff& d : a.dffs()) obs.emplace_back(d.d, b_d.at(a.net_name(d.q)));

  const std::size_t ns = src_a.size();
  if (ns <= 20) {
    const std::uint64_t total = 1ULL << ns;
    for (std::uint64_t base = 0; base < total; base += 64) {
      std::vector<std::uint64_t> wa(ns), wb(ns);
      for (std::size_t s = 0; s < ns; ++s) {
        std::uint64_t w = 0;
        for (std::uint64_t l = 0; l < 64 && base + l < total; ++l) w |= (((base + l) >> s) & 1ULL) << l;
        wa[s] = w;
        wb[b_pos[s]] = w;
      }
      auto va = eval_words(a, wa);
      auto vb = eval_words(b, wb);
      std::uint64_t valid = total - base >= 64 ? ~0ULL : (1ULL << (total - base)) - 1;
      std::uint64_t diff = 0;
      for (auto [x, y] : obs) diff |= va[x] ^ vb[y];
      diff &= valid;
      if (diff) {
        std::uint64_t m = base + static_cast<std::uint64_t>(std::countr_zero(diff));
        std::vector<bool> cex(ns);
        for (std::size_t s = 0; s < ns; ++s) cex[s] = (m >> s) & 1ULL;
        return cex;
      }
    }
    return std::nullopt;
  }

  auto solver = make_solver();
  std::vector<int> shared(ns);
  for (auto& v : shared) v = solver->new_var();
  std::vector<int> lits_b_src(ns);
  for (std::size_t s = 0; s < ns; ++s) lits_b_src[b_pos[s]] = shared[s];
  auto la = encode_netlist(*solver, a, shared);
  auto lb = encode_netlist(*solver, b, lits_b_src);
  std::vector<int> diffs;
  for (auto [x, y] : obs) diffs.push_back(encode_xor2(*solver, la[x], lb[y]));
  solver->add_clause(diffs.empty() ? std::vector<int>{-solver->true_var()} : diffs);
  SatResult r = solver->solve();
  if (r == SatResult::Unsat) return std::nullopt;
  if (r != SatResult::Sat) throw Error("SolverError", "equivalence check did not finish");
  std::vector<bool> cex(ns);
  for (std::size_t s = 0; s < ns; ++s) cex[s] = solver->model_value(shared[s]);
  return cex;
}

bool verify_lock(const LockedDesign& ld, const Netlist& original) {
  return !find_difference(apply_key(ld, ld.secret_key), original).has_value();
}

std::string key_to_hex(const Key& key) {
  static const char* digits = "0123456789abcdef";
  const std::size_t nibbles = (key.size() + 3) / 4;
  std::string out(nibbles, '0');
  for (std::size_t i = 0; i < key.size(); ++i)
    if (key[i]) {
      std::size_t nib = i / 4;
      char& c = out[nibbles - 1 - nib];
      int v = static_cast<int>(std::string_view(digits).find(c));
      c = digits[v | (1 << (i % 4))];
    }
  return out;
}

Key key_from_hex(std::string_view hex, std::size_t bits) {
  if (hex.rfind("0x", 0) == 0) hex.remove_prefix(2);
  Key key(bits, false);
  const std::size_t n = hex.size();
  for (std::size_t p = 0; p < n; ++p) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[n - 1 - p])));
    int v = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
    if (v < 0) throw FormatError("bad hex digit in key");
    for (int b = 0; b < 4; ++b) {
      std::size_t i = p * 4 + static_cast<std::size_t>(b);
      bool set = (v >> b) & 1;
      if (i < bits)
        key[i] = set;
      else if (set)
        throw FormatError("key hex wider than " + std::to_string(bits) + " bits");
    }
  }
  return key;
}

std::string sidecar_json(const LockedDesign& ld) {
  nlohmann::json j;
  j["key_size"] = ld.key_size();
  j["secret_key_hex"] = key_to_hex(ld.secret_key);
  j["strategy"] = std::string(to_string(ld.strategy));
  j["seed"] = ld.seed;
  j["placements"] = nlohmann::json::array();
  for (const auto& p : ld.placements)
    j["placements"].push_back({{"net", p.net}, {"kind", std::string(to_string(p.kind))}, {"key_index", p.key_index}});
  return j.dump(2);
}

LockedDesign load_locked(Netlist netlist, std::string_view sidecar) {
  LockedDesign ld;
  try {
    auto j = nlohmann::json::parse(sidecar);
    const std::size_t k = j.at("key_size").get<std::size_t>();
    ld.secret_key = key_from_hex(j.at("secret_key_hex").get<std::string>(), k);
    ld.strategy = parse_lock_strategy(j.at("strategy").get<std::string>());
    ld.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("placements")) {
      auto kind = parse_gate_kind(p.at("kind").get<std::string>());
      if (!kind || (*kind != GateKind::Xor && *kind != GateKind::Xnor)) throw FormatError("bad key gate kind");
      ld.placements.push_back({p.at("net").get<std::string>(), *kind, p.at("key_index").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("key sidecar: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  ld.netlist = std::move(netlist);
  for (std::size_t i = 0; i < ld.key_size(); ++i)
    if (!ld.netlist.find_net(key_input_name(i))) throw FormatError("netlist lacks " + key_input_name(i));
  return ld;
}

}  // namespace secscan
