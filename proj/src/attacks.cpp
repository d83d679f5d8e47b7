// SPDX-License-Identifier: Apache-2.0
#include "secscan/attacks.hpp"

#include <algorithm>
#include <chrono>
#include <json.hpp>
#include <map>
#include <set>

#include "secscan/cnf.hpp"
#include "secscan/error.hpp"
#include "secscan/rng.hpp"
#include "secscan/sat.hpp"
#include "secscan/sim.hpp"

namespace secscan {

namespace {

constexpr std::string_view kKeyPrefix = "keyinput_";

/// Key index of a net name, or -1.
int key_index_of(std::string_view name) {
  if (name.substr(0, kKeyPrefix.size()) != kKeyPrefix) return -1;
  auto rest = name.substr(kKeyPrefix.size());
  if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; })) return -1;
  return std::stoi(std::string(rest));
}

struct SourceSplit {
  std::vector<std::size_t> plain;  // positions in sources() that are not keys
  std::vector<std::size_t> keys;   // positions of key sources
  std::vector<int> key_index;      // key index per entry of `keys`
};

SourceSplit split_sources(const Netlist& n) {
  SourceSplit s;
  const auto src = n.sources();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const int k = i < n.inputs().size() ? key_index_of(n.net_name(src[i])) : -1;
    if (k >= 0) {
      s.keys.push_back(i);
      s.key_index.push_back(k);
    } else {
      s.plain.push_back(i);
    }
  }
  return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// DIP loop over an arbitrary netlist whose key sources are identified by name.

class DipLoop {
 public:
  DipLoop(const Netlist& n, SatAttackOptions opt) : n_(n), split_(split_sources(n)), opt_(opt) {
    solver_ = make_solver();
    T_ = solver_->true_var();
    x_.resize(split_.plain.size());
    for (auto& v : x_) v = solver_->new_var();
    k1_.resize(split_.keys.size());
    k2_.resize(split_.keys.size());
    for (auto& v : k1_) v = solver_->new_var();
    for (auto& v : k2_) v = solver_->new_var();
    auto lits_for = [&](const std::vector<int>& keys) {
      std::vector<int> lits(n_.num_sources(), 0);
      for (std::size_t i = 0; i < split_.plain.size(); ++i) lits[split_.plain[i]] = x_[i];
      for (std::size_t i = 0; i < split_.keys.size(); ++i) lits[split_.keys[i]] = keys[i];
      return lits;
    };
    const auto a = encode_netlist(*solver_, n_, lits_for(k1_));
    const auto b = encode_netlist(*solver_, n_, lits_for(k2_));
    std::vector<int> diffs;
    for (NetId s : n_.sinks())
      if (a[s] != b[s]) diffs.push_back(encode_xor2(*solver_, a[s], b[s]));
    act_ = solver_->new_var();
    const int miter = encode_or(*solver_, diffs);
    solver_->add_clause({-act_, miter});
  }

  std::size_t num_keys() const { return split_.keys.size(); }
  const std::vector<int>& key_index() const { return split_.key_index; }
  std::size_t dips() const { return dips_; }

  /// Runs until the miter is unsatisfiable. Returns false when the iteration
  /// cap is hit first.
  bool run(const IoOracle& oracle) {
    const std::size_t cap = opt_.max_iterations ? opt_.max_iterations : std::max<std::size_t>(10, 10 * num_keys());
    for (;;) {
      const int assume[] = {act_};
      const SatResult r = solver_->solve(assume, opt_.conflict_budget);
      if (r == SatResult::Unsat) return true;
      if (r == SatResult::Unknown) return false;
      if (dips_ >= cap) return false;
      std::vector<bool> dip(x_.size());
      for (std::size_t i = 0; i < x_.size(); ++i) dip[i] = solver_->model_value(x_[i]);
      const std::vector<bool> y = oracle(dip);
      ++dips_;
      constrain(dip, y, k1_);
      constrain(dip, y, k2_);
    }
  }

  /// Some key consistent with every observation (nullopt if none).
  std::optional<std::vector<bool>> consistent_key() {
    if (solver_->solve({}, opt_.conflict_budget) != SatResult::Sat) return std::nullopt;
    std::vector<bool> k(k1_.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = solver_->model_value(k1_[i]);
    return k;
  }

  /// Per key source: definite when every consistent key agrees.
  std::vector<Tri> implied_bits() {
    std::vector<Tri> out(k1_.size(), Tri::X);
    auto key = consistent_key();
    if (!key) return out;
    for (std::size_t i = 0; i < k1_.size(); ++i) {
      const int flip[] = {(*key)[i] ? -k1_[i] : k1_[i]};
      if (solver_->solve(flip, opt_.conflict_budget) == SatResult::Unsat) out[i] = tri_of((*key)[i]);
    }
    return out;
  }

 private:
  // Adds "circuit(dip, keys) == y", encoding only the nets that still depend
  // on the keys.
  void constrain(const std::vector<bool>& dip, const std::vector<bool>& y, const std::vector<int>& keys) {
    std::vector<Tri> src(n_.num_sources(), Tri::X);
    for (std::size_t i = 0; i < split_.plain.size(); ++i) src[split_.plain[i]] = tri_of(dip[i]);
    const auto vals = eval3_values(n_, src);
    std::vector<int> lit(n_.num_nets(), 0);
    const auto sources = n_.sources();
    for (std::size_t i = 0; i < split_.keys.size(); ++i) lit[sources[split_.keys[i]]] = keys[i];
    auto lit_of = [&](NetId id) {
      if (vals[id] == Tri::One) return T_;
      if (vals[id] == Tri::Zero) return -T_;
      return lit[id];
    };
    std::vector<int> ins;
    for (std::uint32_t gi : n_.topo_order()) {
      const Gate& g = n_.gates()[gi];
      if (vals[g.output] != Tri::X) continue;
      ins.clear();
      for (NetId in : g.inputs) ins.push_back(lit_of(in));
      const int out = solver_->new_var();
      encode_gate(*solver_, g.kind, out, ins);
      lit[g.output] = out;
    }
    const auto sinks = n_.sinks();
    for (std::size_t s = 0; s < sinks.size(); ++s) {
      const int l = lit_of(sinks[s]);
      solver_->add_clause({y[s] ? l : -l});
    }
  }

  const Netlist& n_;
  SourceSplit split_;
  SatAttackOptions opt_;
  std::unique_ptr<SatSolver> solver_;
  int T_ = 0;
  int act_ = 0;
  std::vector<int> x_, k1_, k2_;
  std::size_t dips_ = 0;
};

}  // namespace

IoOracle reference_oracle(const Netlist& reference) {
  auto compiled = std::make_shared<CompiledNetlist>(reference);
  return [compiled](const std::vector<bool>& in) {
    const Netlist& n = compiled->netlist();
    if (in.size() != n.num_sources()) throw InvalidArgument("oracle input width mismatch");
    std::vector<std::uint64_t> values(n.num_nets(), 0);
    const auto src = n.sources();
    for (std::size_t i = 0; i < src.size(); ++i) values[src[i]] = in[i] ? 1 : 0;
    compiled->evaluate(values);
    std::vector<bool> out;
    for (NetId s : n.sinks()) out.push_back(values[s] & 1);
    return out;
  };
}

SatAttackResult sat_attack(const LockedDesign& ld, const IoOracle& oracle, const SatAttackOptions& opt) {
  SatAttackResult res;
  res.key.assign(ld.key_size(), false);
  if (ld.key_size() == 0) return res;
  DipLoop loop(ld.netlist, opt);
  const bool done = loop.run(oracle);
  res.dips = loop.dips();
  if (!done) throw IterationLimit("DIP loop stopped after " + std::to_string(res.dips) + " iterations");
  auto key = loop.consistent_key();
  if (!key) throw Unsatisfiable("no key is consistent with the oracle responses");
  for (std::size_t i = 0; i < key->size(); ++i) res.key[static_cast<std::size_t>(loop.key_index()[i])] = (*key)[i];
  return res;
}

Key brute_force_key(const LockedDesign& ld, const IoOracle& oracle, std::uint64_t seed) {
  const std::size_t k = ld.key_size();
  if (k > 20) throw TooLarge("exhaustive key search is limited to 20 key bits");
  const Netlist& n = ld.netlist;
  const SourceSplit split = split_sources(n);
  const std::size_t m = split.plain.size();
  std::vector<std::vector<bool>> patterns;
  if (m <= 16) {
    for (std::uint64_t p = 0; p < (1ULL << m); ++p) {
      std::vector<bool> v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = (p >> i) & 1U;
      patterns.push_back(std::move(v));
    }
  } else {
    Rng rng(seed);
    for (int p = 0; p < 4096; ++p) {
      std::vector<bool> v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = rng.bit();
      patterns.push_back(std::move(v));
    }
  }
  const auto sinks = n.sinks();
  // Pack patterns and responses 64 per word.
  const std::size_t blocks = (patterns.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> in_words(blocks, std::vector<std::uint64_t>(m, 0));
  std::vector<std::vector<std::uint64_t>> out_words(blocks, std::vector<std::uint64_t>(sinks.size(), 0));
  std::vector<std::uint64_t> lane_mask(blocks, 0);
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    const std::size_t b = p / 64, l = p % 64;
    lane_mask[b] |= 1ULL << l;
    for (std::size_t i = 0; i < m; ++i)
      if (patterns[p][i]) in_words[b][i] |= 1ULL << l;
    const auto y = oracle(patterns[p]);
    for (std::size_t s = 0; s < sinks.size(); ++s)
      if (y[s]) out_words[b][s] |= 1ULL << l;
  }
  CompiledNetlist c(n);
  const auto src = n.sources();
  std::vector<std::uint64_t> values(n.num_nets());
  for (std::uint64_t cand = 0; cand < (1ULL << k); ++cand) {
    bool ok = true;
    for (std::size_t b = 0; b < blocks && ok; ++b) {
      for (std::size_t i = 0; i < m; ++i) values[src[split.plain[i]]] = in_words[b][i];
      for (std::size_t i = 0; i < split.keys.size(); ++i)
        values[src[split.keys[i]]] = broadcast((cand >> split.key_index[i]) & 1U);
      c.evaluate(values);
      for (std::size_t s = 0; s < sinks.size() && ok; ++s)
        ok = ((values[sinks[s]] ^ out_words[b][s]) & lane_mask[b]) == 0;
    }
    if (ok) {
      Key key(k);
      for (std::size_t i = 0; i < k; ++i) key[i] = (cand >> i) & 1U;
      return key;
    }
  }
  throw Unsatisfiable("no key reproduces the oracle responses");
}

// ---------------------------------------------------------------------------
// Leak conditions

namespace {

// Gates in the transitive fan-in of a net, in topological order, and the
// sources reached.
struct Cone {
  std::vector<std::uint32_t> gates;
  std::vector<char> in_cone;  // per net
};

Cone fanin_cone(const Netlist& n, NetId root) {
  Cone c;
  c.in_cone.assign(n.num_nets(), 0);
  std::vector<NetId> stack{root};
  while (!stack.empty()) {
    NetId x = stack.back();
    stack.pop_back();
    if (c.in_cone[x]) continue;
    c.in_cone[x] = 1;
    const Driver& d = n.driver(x);
    if (d.kind == DriverKind::Gate)
      for (NetId in : n.gates()[d.index].inputs) stack.push_back(in);
  }
  for (std::uint32_t gi : n.topo_order())
    if (c.in_cone[n.gates()[gi].output]) c.gates.push_back(gi);
  return c;
}

/// Output positions combinationally reachable from a net.
std::vector<std::size_t> reachable_outputs(const Netlist& n, NetId from) {
  std::vector<char> seen(n.num_nets(), 0);
  std::vector<NetId> stack{from};
  std::vector<std::size_t> out;
  while (!stack.empty()) {
    NetId x = stack.back();
    stack.pop_back();
    if (seen[x]) continue;
    seen[x] = 1;
    for (const Consumer& c : n.consumers(x)) {
      if (c.kind == Consumer::Kind::GatePin)
        stack.push_back(n.gates()[c.index].output);
      else if (c.kind == Consumer::Kind::PrimaryOutput)
        out.push_back(c.index);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Rail {
  int one, zero;
  bool operator==(const Rail&) const = default;
};

class RailEncoder {
 public:
  explicit RailEncoder(SatSolver& s) : s_(s), T_(s.true_var()) {}
  int T() const { return T_; }

  int and_of(std::vector<int> v) {
    std::vector<int> keep;
    for (int l : v) {
      if (l == -T_) return -T_;
      if (l != T_) keep.push_back(l);
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (std::size_t i = 0; i + 1 < keep.size(); ++i)
      if (std::binary_search(keep.begin(), keep.end(), -keep[i])) return -T_;
    if (keep.empty()) return T_;
    if (keep.size() == 1) return keep[0];
    const int out = s_.new_var();
    encode_gate(s_, GateKind::And, out, keep);
    return out;
  }
  int or_of(std::vector<int> v) {
    for (int& l : v) l = -l;
    return -and_of(std::move(v));
  }
  Rail xor2(Rail a, Rail b) {
    return {or_of({and_of({a.one, b.zero}), and_of({a.zero, b.one})}),
            or_of({and_of({a.one, b.one}), and_of({a.zero, b.zero})})};
  }
  Rail gate(GateKind kind, const std::vector<Rail>& in) {
    std::vector<int> ones, zeros;
    for (const Rail& r : in) {
      ones.push_back(r.one);
      zeros.push_back(r.zero);
    }
    switch (kind) {
      case GateKind::And: return {and_of(ones), or_of(zeros)};
      case GateKind::Nand: return {or_of(zeros), and_of(ones)};
      case GateKind::Or: return {or_of(ones), and_of(zeros)};
      case GateKind::Nor: return {and_of(zeros), or_of(ones)};
      case GateKind::Not: return {in[0].zero, in[0].one};
      case GateKind::Buf: return in[0];
      case GateKind::Xor:
      case GateKind::Xnor: {
        Rail acc = in[0];
        for (std::size_t i = 1; i < in.size(); ++i) acc = xor2(acc, in[i]);
        return kind == GateKind::Xor ? acc : Rail{acc.zero, acc.one};
      }
    }
    return in[0];
  }

 private:
  SatSolver& s_;
  int T_;
};

enum class SrcRole { Free, Unknown, Leaky };

struct SourceRoles {
  std::vector<SrcRole> role;       // per source position
  std::vector<std::size_t> pi_of;  // source position -> functional input index (inputs only)
};

SourceRoles source_roles(const ScanDesign& sd, std::uint32_t lc, const std::vector<std::uint32_t>& forced_x) {
  const Netlist& n = sd.locked.netlist;
  SourceRoles r;
  r.role.assign(n.num_sources(), SrcRole::Free);
  r.pi_of.assign(n.num_sources(), SIZE_MAX);
  const std::size_t ni = n.inputs().size();
  for (std::size_t p = 0; p < ni; ++p)
    if (sd.input_key_index[p] >= 0) r.role[p] = SrcRole::Unknown;
  for (std::size_t f = 0; f < sd.functional_inputs.size(); ++f) r.pi_of[sd.functional_inputs[f]] = f;
  for (auto x : forced_x) r.role[ni + x] = SrcRole::Unknown;
  r.role[ni + lc] = SrcRole::Leaky;
  return r;
}

LeakCondition make_condition(const ScanDesign& sd, std::uint32_t lc, std::size_t po, bool inverted,
                             const std::vector<Tri>& src_vals) {
  const Netlist& n = sd.locked.netlist;
  const std::size_t ni = n.inputs().size();
  LeakCondition c;
  c.lc = lc;
  c.po = po;
  c.inverted = inverted;
  c.rc_assignment.assign(n.dffs().size(), Tri::X);
  for (std::size_t d = 0; d < n.dffs().size(); ++d) c.rc_assignment[d] = src_vals[ni + d];
  c.rc_assignment[lc] = Tri::X;
  c.pi_assignment.assign(sd.functional_inputs.size(), Tri::X);
  for (std::size_t f = 0; f < sd.functional_inputs.size(); ++f) c.pi_assignment[f] = src_vals[sd.functional_inputs[f]];
  return c;
}

std::optional<LeakCondition> sat_search(const ScanDesign& sd, std::uint32_t lc, std::size_t po, const Cone& cone,
                                        const SourceRoles& roles, std::int64_t budget, bool* unknown) {
  const Netlist& n = sd.locked.netlist;
  CdclSolver s;
  RailEncoder e(s);
  const int T = e.T();
  const auto src = n.sources();
  std::vector<Rail> r0(n.num_nets(), Rail{-T, -T}), r1 = r0;
  std::vector<int> var_of_src(src.size(), 0);
  for (std::size_t p = 0; p < src.size(); ++p) {
    if (!cone.in_cone[src[p]]) continue;
    switch (roles.role[p]) {
      case SrcRole::Unknown: break;
      case SrcRole::Leaky:
        r0[src[p]] = {-T, T};
        r1[src[p]] = {T, -T};
        break;
      case SrcRole::Free: {
        const int v = s.new_var();
        var_of_src[p] = v;
        r0[src[p]] = r1[src[p]] = {v, -v};
        break;
      }
    }
  }
  std::vector<Rail> in0, in1;
  for (std::uint32_t gi : cone.gates) {
    const Gate& g = n.gates()[gi];
    in0.clear();
    in1.clear();
    for (NetId in : g.inputs) {
      in0.push_back(r0[in]);
      in1.push_back(r1[in]);
    }
    r0[g.output] = e.gate(g.kind, in0);
    r1[g.output] = in0 == in1 ? r0[g.output] : e.gate(g.kind, in1);
  }
  const NetId out = n.outputs()[po];
  const Rail p0 = r0[out], p1 = r1[out];
  const int sel = s.new_var();  // true: PO follows lc, false: PO inverts it
  s.add_clause({-sel, p0.zero});
  s.add_clause({-sel, p1.one});
  s.add_clause({sel, p0.one});
  s.add_clause({sel, p1.zero});
  const SatResult res = s.solve({}, budget);
  if (res == SatResult::Unknown) *unknown = true;
  if (res != SatResult::Sat) return std::nullopt;
  std::vector<Tri> vals(src.size(), Tri::X);
  for (std::size_t p = 0; p < src.size(); ++p)
    if (var_of_src[p]) vals[p] = tri_of(s.model_value(var_of_src[p]));
  return make_condition(sd, lc, po, !s.model_value(sel), vals);
}

// Dual-rail words: bit l of one/zero says lane l is definitely 1/0.
std::optional<LeakCondition> probe_search(const ScanDesign& sd, std::uint32_t lc, std::size_t po, const Cone& cone,
                                          const SourceRoles& roles, std::size_t rounds, Rng& rng) {
  const Netlist& n = sd.locked.netlist;
  const auto src = n.sources();
  std::vector<std::uint64_t> on0(n.num_nets()), ze0(n.num_nets()), on1(n.num_nets()), ze1(n.num_nets());
  std::vector<std::uint64_t> in_on, in_ze;
  auto eval = [&](std::vector<std::uint64_t>& on, std::vector<std::uint64_t>& ze) {
    for (std::uint32_t gi : cone.gates) {
      const Gate& g = n.gates()[gi];
      std::uint64_t o = 0, z = 0;
      auto all_one = ~0ULL, any_one = 0ULL, all_zero = ~0ULL, any_zero = 0ULL;
      switch (g.kind) {
        case GateKind::And:
        case GateKind::Nand:
        case GateKind::Or:
        case GateKind::Nor:
          for (NetId in : g.inputs) {
            all_one &= on[in];
            any_one |= on[in];
            all_zero &= ze[in];
            any_zero |= ze[in];
          }
          if (g.kind == GateKind::And) o = all_one, z = any_zero;
          if (g.kind == GateKind::Nand) o = any_zero, z = all_one;
          if (g.kind == GateKind::Or) o = any_one, z = all_zero;
          if (g.kind == GateKind::Nor) o = all_zero, z = any_one;
          break;
        case GateKind::Not: o = ze[g.inputs[0]], z = on[g.inputs[0]]; break;
        case GateKind::Buf: o = on[g.inputs[0]], z = ze[g.inputs[0]]; break;
        case GateKind::Xor:
        case GateKind::Xnor: {
          o = on[g.inputs[0]];
          z = ze[g.inputs[0]];
          for (std::size_t i = 1; i < g.inputs.size(); ++i) {
            const auto bo = on[g.inputs[i]], bz = ze[g.inputs[i]];
            const auto no = (o & bz) | (z & bo), nz = (o & bo) | (z & bz);
            o = no;
            z = nz;
          }
          if (g.kind == GateKind::Xnor) std::swap(o, z);
          break;
        }
      }
      on[g.output] = o;
      ze[g.output] = z;
    }
  };
  const NetId out = n.outputs()[po];
  for (std::size_t round = 0; round < rounds; ++round) {
    std::vector<std::uint64_t> rnd(src.size(), 0);
    for (std::size_t p = 0; p < src.size(); ++p) {
      const NetId id = src[p];
      switch (roles.role[p]) {
        case SrcRole::Unknown: on0[id] = ze0[id] = on1[id] = ze1[id] = 0; break;
        case SrcRole::Leaky:
          on0[id] = 0, ze0[id] = ~0ULL;
          on1[id] = ~0ULL, ze1[id] = 0;
          break;
        case SrcRole::Free:
          rnd[p] = rng.next();
          on0[id] = on1[id] = rnd[p];
          ze0[id] = ze1[id] = ~rnd[p];
          break;
      }
    }
    eval(on0, ze0);
    eval(on1, ze1);
    const std::uint64_t follow = ze0[out] & on1[out], invert = on0[out] & ze1[out];
    const std::uint64_t hit = follow | invert;
    if (!hit) continue;
    const int lane = __builtin_ctzll(hit);
    std::vector<Tri> vals(src.size(), Tri::X);
    for (std::size_t p = 0; p < src.size(); ++p)
      if (roles.role[p] == SrcRole::Free && cone.in_cone[src[p]]) vals[p] = tri_of((rnd[p] >> lane) & 1U);
    return make_condition(sd, lc, po, ((follow >> lane) & 1U) == 0, vals);
  }
  return std::nullopt;
}

}  // namespace

bool leak_condition_holds(const ScanDesign& sd, const LeakCondition& c) {
  const Netlist& n = sd.locked.netlist;
  if (c.rc_assignment.size() != n.dffs().size() || c.pi_assignment.size() != sd.functional_inputs.size() ||
      c.po >= n.outputs().size() || c.lc >= n.dffs().size())
    return false;
  const std::size_t ni = n.inputs().size();
  std::vector<Tri> src(n.num_sources(), Tri::X);
  for (std::size_t f = 0; f < sd.functional_inputs.size(); ++f) src[sd.functional_inputs[f]] = c.pi_assignment[f];
  for (std::size_t d = 0; d < n.dffs().size(); ++d) src[ni + d] = c.rc_assignment[d];
  const NetId out = n.outputs()[c.po];
  for (bool b : {false, true}) {
    src[ni + c.lc] = tri_of(b);
    const Tri v = eval3_values(n, src)[out];
    if (v != tri_of(b != c.inverted)) return false;
  }
  return true;
}

std::optional<LeakCondition> find_leak_condition(const ScanDesign& sd, std::uint32_t lc,
                                                 const std::vector<std::uint32_t>& forced_x,
                                                 const LeakSearchOptions& opt) {
  const Netlist& n = sd.locked.netlist;
  if (lc >= n.dffs().size()) throw InvalidArgument("no DFF " + std::to_string(lc));
  const NetId q = n.dffs()[lc].q;
  auto pos = reachable_outputs(n, q);
  if (pos.empty()) return std::nullopt;
  std::vector<std::pair<std::size_t, Cone>> cones;
  for (std::size_t po : pos) cones.emplace_back(po, fanin_cone(n, n.outputs()[po]));
  std::stable_sort(cones.begin(), cones.end(),
                   [](const auto& a, const auto& b) { return a.second.gates.size() < b.second.gates.size(); });
  if (cones.size() > opt.max_outputs) cones.resize(opt.max_outputs);
  const SourceRoles roles = source_roles(sd, lc, forced_x);
  Rng rng(mix_seed(opt.seed, lc));
  std::int64_t left = opt.conflict_budget;
  std::vector<std::size_t> undecided;
  for (std::size_t i = 0; i < cones.size(); ++i) {
    const std::int64_t share = left < 0 ? -1 : std::max<std::int64_t>(1, left / static_cast<std::int64_t>(cones.size() - i));
    bool unknown = false;
    auto c = sat_search(sd, lc, cones[i].first, cones[i].second, roles, share, &unknown);
    if (c && leak_condition_holds(sd, *c)) return c;
    if (unknown) undecided.push_back(i);
    if (left >= 0) left = std::max<std::int64_t>(0, left - share);
  }
  // Random probing where the solver ran out of budget.
  for (std::size_t i : undecided) {
    auto c = probe_search(sd, lc, cones[i].first, cones[i].second, roles, opt.probe_rounds, rng);
    if (c && leak_condition_holds(sd, *c)) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reports

std::size_t AttackReport::recovered_count() const {
  return static_cast<std::size_t>(std::count_if(recovered.begin(), recovered.end(), [](Tri t) { return t != Tri::X; }));
}

std::size_t AttackReport::wrong_bits(const Key& key) const {
  std::size_t w = 0;
  for (std::size_t i = 0; i < recovered.size() && i < key.size(); ++i)
    if (recovered[i] != Tri::X && recovered[i] != tri_of(key[i])) ++w;
  return w;
}

bool AttackReport::consistent_with(const Key& key) const { return key.size() == recovered.size() && wrong_bits(key) == 0; }

std::string AttackReport::to_json() const {
  std::string bits;
  for (Tri t : recovered) bits += tri_char(t);
  nlohmann::json j{{"attack", attack},
                   {"key_size", recovered.size()},
                   {"recovered", recovered_count()},
                   {"bits", bits},
                   {"dip_count", dip_count},
                   {"shift_cycles", shift_cycles},
                   {"power_cycles", power_cycles},
                   {"oracle_queries", oracle_queries},
                   {"completed", completed},
                   {"wall_ms", wall_ms}};
  return j.dump(2);
}

std::string AttackReport::csv_header() {
  return "attack,key_size,recovered,dip_count,shift_cycles,power_cycles,oracle_queries,completed,wall_ms";
}

std::string AttackReport::csv_row() const {
  return attack + "," + std::to_string(recovered.size()) + "," + std::to_string(recovered_count()) + "," +
         std::to_string(dip_count) + "," + std::to_string(shift_cycles) + "," + std::to_string(power_cycles) + "," +
         std::to_string(oracle_queries) + "," + (completed ? "1" : "0") + "," +
         std::to_string(static_cast<long long>(wall_ms));
}

// ---------------------------------------------------------------------------
// Shift-and-leak

namespace {

struct CellPos {
  std::size_t chain = SIZE_MAX, pos = 0;
};

struct LayoutIndex {
  std::vector<CellPos> rc;  // per DFF
  std::vector<CellPos> sc;  // per key bit (chain == SIZE_MAX when not in a chain)
};

LayoutIndex index_layout(const ScanDesign& sd) {
  LayoutIndex li;
  li.rc.resize(sd.num_rcs());
  li.sc.resize(sd.key_size());
  for (std::size_t c = 0; c < sd.chains.size(); ++c)
    for (std::size_t i = 0; i < sd.chains[c].size(); ++i) {
      const ChainCell& cell = sd.chains[c][i];
      (cell.kind == CellKind::Rc ? li.rc : li.sc)[cell.index] = {c, i};
    }
  return li;
}

enum class Delivery { BypassShift, GlitchShift };

class LeakEngine {
 public:
  LeakEngine(Oracle& o, Delivery how, Ps pulse, const LeakAttackOptions& opt)
      : o_(o), sd_(o.layout()), li_(index_layout(sd_)), how_(how), pulse_(pulse), opt_(opt), seed_(opt.power_seed) {}

  AttackReport run(const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    const QueryLog before = o_.log();
    AttackReport rep;
    rep.attack = name;
    rep.recovered.assign(sd_.key_size(), Tri::X);
    const Netlist& n = sd_.locked.netlist;

    // Leaky-cell candidates: RCs that reach an output, shallowest first.
    const auto dist = n.distance_to_outputs();
    std::vector<std::uint32_t> cands;
    for (std::uint32_t d = 0; d < n.dffs().size(); ++d)
      if (dist[n.dffs()[d].q] >= 0) cands.push_back(d);
    std::stable_sort(cands.begin(), cands.end(), [&](std::uint32_t a, std::uint32_t b) {
      const int da = dist[n.dffs()[a].q], db = dist[n.dffs()[b].q];
      if (da != db) return da < db;
      return li_.rc[a].pos < li_.rc[b].pos;
    });

    std::vector<std::uint32_t> targets;
    for (std::uint32_t k = 0; k < sd_.key_size(); ++k)
      if (li_.sc[k].chain != SIZE_MAX) targets.push_back(k);
    std::sort(targets.begin(), targets.end(),
              [&](auto a, auto b) { return std::tie(li_.sc[a].chain, li_.sc[a].pos) < std::tie(li_.sc[b].chain, li_.sc[b].pos); });

    for (std::uint32_t k : targets) {
      const CellPos sp = li_.sc[k];
      std::size_t tries = 0;
      for (std::uint32_t lc : cands) {
        if (tries >= opt_.max_lc_per_bit) break;
        const CellPos lp = li_.rc[lc];
        if (lp.chain != sp.chain || lp.pos <= sp.pos) continue;
        const LeakCondition* base = base_condition(lc);
        if (!base) continue;
        ++tries;
        if (!control_passes(*base)) continue;
        const std::size_t d = lp.pos - sp.pos;
        auto cond = condition_for(*base, d);
        if (!cond) continue;
        auto bit = leak(*cond, d);
        if (!bit) continue;
        rep.recovered[k] = tri_of(*bit);
        break;
      }
    }
    const QueryLog& after = o_.log();
    rep.shift_cycles = after.shift_clocks - before.shift_clocks;
    rep.power_cycles = after.power_cycles - before.power_cycles;
    rep.oracle_queries = after.total() - before.total();
    rep.wall_ms = elapsed_ms(t0);
    return rep;
  }

 private:
  const LeakCondition* base_condition(std::uint32_t lc) {
    auto it = base_.find(lc);
    if (it == base_.end()) it = base_.emplace(lc, find_leak_condition(sd_, lc, {}, opt_.search)).first;
    return it->second ? &*it->second : nullptr;
  }

  // RCs that end up holding shifted-along SC contents after d shifts.
  std::vector<std::uint32_t> unknown_after(std::size_t d, std::uint32_t lc) const {
    std::vector<std::uint32_t> x;
    for (const auto& chain : sd_.chains)
      for (std::size_t i = d; i < chain.size(); ++i)
        if (chain[i].kind == CellKind::Rc && chain[i].index != lc && chain[i - d].kind == CellKind::Sc)
          x.push_back(chain[i].index);
    return x;
  }

  std::optional<LeakCondition> condition_for(const LeakCondition& base, std::size_t d) {
    const auto x = unknown_after(d, base.lc);
    LeakCondition c = base;
    for (auto r : x) c.rc_assignment[r] = Tri::X;
    c.distance = d;
    if (leak_condition_holds(sd_, c)) return c;
    auto found = find_leak_condition(sd_, base.lc, x, opt_.search);
    if (found) found->distance = d;
    return found;
  }

  // With d = 0 the LC is loaded directly; both values must come back.
  bool control_passes(const LeakCondition& base) {
    auto it = control_.find(base.lc);
    if (it != control_.end()) return it->second;
    bool ok = true;
    for (bool b : {false, true}) {
      auto got = run_once(base, 0, b);
      ok = ok && got && *got == b;
    }
    control_.emplace(base.lc, ok);
    return ok;
  }

  std::optional<bool> leak(const LeakCondition& c, std::size_t d) { return run_once(c, d, false); }

  // Loads the cells so that after d chain shifts every RC holds its value in
  // `c` (lc gets `lc_value` when d = 0), then reads the PO.
  std::optional<bool> run_once(const LeakCondition& c, std::size_t d, bool lc_value) {
    const std::size_t chains = sd_.num_chains();
    std::vector<std::vector<bool>> m2(chains, std::vector<bool>(d, false));
    std::vector<char> pre(sd_.num_rcs(), 0);
    for (std::size_t ch = 0; ch < chains; ++ch) {
      const auto& chain = sd_.chains[ch];
      for (std::size_t i = 0; i < chain.size(); ++i) {
        if (chain[i].kind != CellKind::Rc) continue;
        const std::uint32_t r = chain[i].index;
        const bool want = r == c.lc ? lc_value : c.rc_assignment[r] == Tri::One;
        if (i < d) {
          m2[ch][d - 1 - i] = want;
        } else if (chain[i - d].kind == CellKind::Rc) {
          pre[chain[i - d].index] = want;
        }
      }
    }
    o_.power_cycle(seed_++);
    if (how_ == Delivery::BypassShift) {
      o_.clock(ModePins{}, std::vector<bool>(chains, false));  // M0: key into the SCs
      const auto rc_only = sd_.rc_only_chains();
      std::size_t len = 0;
      for (const auto& ch : rc_only) len = std::max(len, ch.size());
      std::vector<std::vector<bool>> s(chains, std::vector<bool>(len, false));
      for (std::size_t ch = 0; ch < chains; ++ch)
        for (std::size_t p = 0; p < rc_only[ch].size(); ++p) s[ch][len - 1 - p] = pre[rc_only[ch][p].index];
      o_.clock_burst({false, false, true, false}, len, s);
      if (d > 0) o_.clock_burst({true, false, true, false}, d, m2);
    } else {
      // Full-chain load before the key exists, then a gated M0 captures it.
      std::size_t len = sd_.max_chain_length();
      std::vector<std::vector<bool>> s(chains, std::vector<bool>(len, false));
      for (std::size_t ch = 0; ch < chains; ++ch)
        for (std::size_t p = 0; p < sd_.chains[ch].size(); ++p)
          if (sd_.chains[ch][p].kind == CellKind::Rc) s[ch][len - 1 - p] = pre[sd_.chains[ch][p].index];
      o_.clock_burst({true, false, true, false}, len, s);
      o_.clock(ModePins{}, std::vector<bool>(chains, false));
      for (std::size_t t = 0; t < d; ++t) {
        std::vector<bool> si(chains);
        for (std::size_t ch = 0; ch < chains; ++ch) si[ch] = m2[ch][t];
        if (o_.pulse_test(pulse_, si) != PulseOutcome::ShiftHappened) return std::nullopt;
      }
    }
    std::vector<bool> pi(c.pi_assignment.size());
    for (std::size_t f = 0; f < pi.size(); ++f) pi[f] = c.pi_assignment[f] == Tri::One;
    o_.set_inputs(pi);
    return o_.read_po()[c.po] != c.inverted;
  }

  Oracle& o_;
  const ScanDesign& sd_;
  LayoutIndex li_;
  Delivery how_;
  Ps pulse_;
  LeakAttackOptions opt_;
  std::uint64_t seed_;
  std::map<std::uint32_t, std::optional<LeakCondition>> base_;
  std::map<std::uint32_t, bool> control_;
};

}  // namespace

AttackReport shift_and_leak(Oracle& o, const LeakAttackOptions& opt) {
  return LeakEngine(o, Delivery::BypassShift, 0, opt).run("shift-and-leak");
}

AttackReport glitch_and_leak(Oracle& o, const LeakAttackOptions& opt) {
  const DelayModel dm = opt.delay_model.value_or(o.delay_model());
  const Ps safe = glitch_window(dm);
  // Narrowest width that still reaches SD on every pulse.
  Ps pass = safe;
  for (const SweepPoint& p : glitch_sweep(dm, 1, safe))
    if (!p.tripped && p.sd_pulses == 8) {
      pass = p.width;
      break;
    }
  const Ps width = (pass + safe) / 2;
  try {
    o.pulse_test(width, std::vector<bool>(o.layout().num_chains(), false));
  } catch (const UnsupportedForArch&) {
    AttackReport rep;
    rep.attack = "glitch-and-leak";
    rep.recovered.assign(o.layout().key_size(), Tri::X);
    rep.oracle_queries = 1;
    return rep;
  }
  return LeakEngine(o, Delivery::GlitchShift, width, opt).run("glitch-and-leak");
}

// ---------------------------------------------------------------------------
// Full-scan SAT through OPEN_SCAN pins

AttackReport open_scan_sat(Oracle& o, const SatAttackOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const QueryLog before = o.log();
  const ScanDesign& sd = o.layout();
  AttackReport rep;
  rep.attack = "sat";
  rep.recovered.assign(sd.key_size(), Tri::X);
  if (sd.arch != ArchKind::OpenScan || sd.key_size() == 0) return rep;

  const std::size_t len = sd.max_chain_length();
  const std::size_t npi = sd.num_pis();
  std::uint64_t seed = 9000;
  const ModePins shift{false, false, true, false};
  IoOracle eval = [&](const std::vector<bool>& in) {
    o.power_cycle(seed++);
    std::vector<std::vector<bool>> s(sd.num_chains(), std::vector<bool>(len, false));
    for (std::size_t c = 0; c < sd.num_chains(); ++c)
      for (std::size_t p = 0; p < sd.chains[c].size(); ++p) s[c][len - 1 - p] = in[npi + sd.chains[c][p].index];
    o.clock_burst(shift, len, s);
    o.set_inputs(std::vector<bool>(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(npi)));
    std::vector<bool> out = o.read_po();
    o.clock({}, std::vector<bool>(sd.num_chains(), false));
    const auto so = o.clock_burst(shift, len, {});
    if (!so) throw BlockedScanOut("open scan-out masked");
    std::vector<bool> next(sd.num_rcs(), false);
    for (std::size_t c = 0; c < sd.num_chains(); ++c) {
      const std::size_t lc = sd.chains[c].size();
      for (std::size_t p = 0; p < lc; ++p) next[sd.chains[c][p].index] = (*so)[c][lc - 1 - p];
    }
    out.insert(out.end(), next.begin(), next.end());
    return out;
  };
  DipLoop loop(sd.locked.netlist, opt);
  if (!loop.run(eval)) rep.completed = false;
  rep.dip_count = loop.dips();
  const auto bits = loop.implied_bits();
  for (std::size_t i = 0; i < bits.size(); ++i) rep.recovered[static_cast<std::size_t>(loop.key_index()[i])] = bits[i];
  const QueryLog& after = o.log();
  rep.shift_cycles = after.shift_clocks - before.shift_clocks;
  rep.power_cycles = after.power_cycles - before.power_cycles;
  rep.oracle_queries = after.total() - before.total();
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// Cone-wise SAT through PO reads

AttackReport cone_sat_preprocess(Oracle& o, const SatAttackOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const QueryLog before = o.log();
  const ScanDesign& sd = o.layout();
  AttackReport rep;
  rep.attack = "cone-sat";
  rep.recovered.assign(sd.key_size(), Tri::X);
  if (sd.arch != ArchKind::RDfs) return rep;

  const Netlist& n = sd.locked.netlist;
  const auto rc_only = sd.rc_only_chains();
  std::size_t len = 0;
  for (const auto& ch : rc_only) len = std::max(len, ch.size());
  std::uint64_t seed = 7000;

  // Inputs of a cone map back to functional PIs or DFFs of the design.
  std::map<std::string, std::size_t> pi_index;
  for (std::size_t f = 0; f < sd.functional_inputs.size(); ++f)
    pi_index[n.net_name(n.inputs()[sd.functional_inputs[f]])] = f;
  std::map<std::string, std::uint32_t> dff_index;
  for (std::uint32_t d = 0; d < n.dffs().size(); ++d) dff_index[n.net_name(n.dffs()[d].q)] = d;

  for (std::size_t po = 0; po < n.outputs().size(); ++po) {
    const std::string name = n.net_name(n.outputs()[po]);
    const std::string roots[] = {name};
    Netlist cone = extract_cone(n, roots);
    const SourceSplit split = split_sources(cone);
    if (split.keys.empty()) continue;
    bool open = false;
    for (int k : split.key_index) open = open || rep.recovered[static_cast<std::size_t>(k)] == Tri::X;
    if (!open) continue;

    const auto src = cone.sources();
    IoOracle eval = [&](const std::vector<bool>& dip) {
      std::vector<bool> pi(sd.functional_inputs.size(), false), rc(sd.num_rcs(), false);
      for (std::size_t i = 0; i < split.plain.size(); ++i) {
        const std::string& nm = cone.net_name(src[split.plain[i]]);
        if (auto it = pi_index.find(nm); it != pi_index.end()) pi[it->second] = dip[i];
        if (auto it = dff_index.find(nm); it != dff_index.end()) rc[it->second] = dip[i];
      }
      o.power_cycle(seed++);
      std::vector<std::vector<bool>> s(sd.num_chains(), std::vector<bool>(len, false));
      for (std::size_t ch = 0; ch < rc_only.size(); ++ch)
        for (std::size_t p = 0; p < rc_only[ch].size(); ++p) s[ch][len - 1 - p] = rc[rc_only[ch][p].index];
      o.clock_burst({false, false, true, false}, len, s);
      o.set_inputs(pi);
      return std::vector<bool>{o.read_po()[po]};
    };
    DipLoop loop(cone, opt);
    if (!loop.run(eval)) rep.completed = false;
    rep.dip_count += loop.dips();
    const auto bits = loop.implied_bits();
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i] != Tri::X) rep.recovered[static_cast<std::size_t>(split.key_index[i])] = bits[i];
  }
  const QueryLog& after = o.log();
  rep.shift_cycles = after.shift_clocks - before.shift_clocks;
  rep.power_cycles = after.power_cycles - before.power_cycles;
  rep.oracle_queries = after.total() - before.total();
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

}  // namespace secscan
