// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. `acceptance [N ...]` runs the listed criteria (all by
// default), prints one PASS/FAIL line each on stdout and details on stderr.
// Exit status is 0 only if every selected criterion passed.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bmc.hpp"
#include "fault_reference.hpp"
#include "leak_reference.hpp"
#include "scan_reference.hpp"
#include "secscan/attacks.hpp"
#include "secscan/cnf.hpp"
#include "secscan/dft.hpp"
#include "secscan/error.hpp"
#include "secscan/locking.hpp"
#include "secscan/oracle.hpp"
#include "secscan/sat.hpp"
#include "secscan/scan.hpp"
#include "secscan/timing.hpp"
#include "support.hpp"

using namespace secscan;
using namespace secscan::testing;

namespace {

const char* const kLarge[] = {"s13207", "s38417", "s38584"};
const ArchKind kArchs[] = {ArchKind::OpenScan, ArchKind::RDfs, ArchKind::MrDfs, ArchKind::KtDfs};

std::map<std::string, Netlist>& netlists() {
  static std::map<std::string, Netlist> cache;
  return cache;
}

const Netlist& bench(const std::string& name) {
  auto& c = netlists();
  auto it = c.find(name);
  if (it == c.end()) it = c.emplace(name, read_bench_file(fixture(name + ".bench"))).first;
  return it->second;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Collects failures; a criterion passes when none were recorded.
struct Check {
  std::vector<std::string> failures;
  std::string summary;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

template <class... T>
std::string cat(const T&... parts) {
  std::ostringstream ss;
  (ss << ... << parts);
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. shift-and-leak on R_DFS

struct LeakRun {
  std::size_t recovered = 0;
  std::size_t wrong = 0;
  double ms = 0;
};

LeakRun leak_run(const ScanDesign& sd, bool glitch) {
  Oracle o(sd, sd.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const AttackReport r = glitch ? glitch_and_leak(o) : shift_and_leak(o);
  return {r.recovered_count(), r.wrong_bits(sd.locked.secret_key), ms_since(t0)};
}

const std::size_t kKeyGrid[] = {32, 64, 128};
const std::uint64_t kSeeds[] = {1, 2, 3};

void criterion1(Check& c) {
  std::size_t runs = 0, bits = 0, got = 0;
  double worst_ms = 0;
  for (const char* f : kLarge) {
    for (std::size_t k : kKeyGrid)
      for (std::uint64_t seed : kSeeds) {
        const LockedDesign ld = insert_key_gates(bench(f), k, LockStrategy::SllLike, seed);
        const ScanDesign sd = build_scan_design(ld, ArchKind::RDfs, 1, seed);
        const LeakRun r = leak_run(sd, false);
        ++runs;
        bits += k;
        got += r.recovered;
        worst_ms = std::max(worst_ms, r.ms);
        std::cerr << "  C1 " << f << " k=" << k << " seed=" << seed << ": " << r.recovered << "/" << k << " wrong "
                  << r.wrong << " " << static_cast<long>(r.ms) << " ms\n";
        c.expect(r.wrong == 0, cat(f, " k=", k, " seed=", seed, ": ", r.wrong, " wrong bits"));
        c.expect(static_cast<double>(r.recovered) >= 0.98 * static_cast<double>(k),
                 cat(f, " k=", k, " seed=", seed, ": ", r.recovered, "/", k));
        c.expect(r.ms <= 60000, cat(f, " k=", k, " seed=", seed, ": ", r.ms, " ms"));
      }
  }
  c.summary = cat(runs, " locks, ", got, "/", bits, " bits, slowest ", static_cast<long>(worst_ms), " ms");
}

// ---------------------------------------------------------------------------
// 2. MR_DFS plain vs glitched

void criterion2(Check& c) {
  std::size_t runs = 0, plain_total = 0, max_gap = 0;
  for (const char* f : kLarge)
    for (std::size_t k : {64u, 128u})
      for (std::uint64_t seed : {1u, 2u}) {
        const LockedDesign ld = insert_key_gates(bench(f), k, LockStrategy::SllLike, seed);
        const LeakRun r = leak_run(build_scan_design(ld, ArchKind::RDfs, 1, seed), false);
        const ScanDesign mr = build_scan_design(ld, ArchKind::MrDfs, 1, seed);
        const LeakRun plain = leak_run(mr, false);
        const LeakRun glitch = leak_run(mr, true);
        const std::size_t gap = glitch.recovered > r.recovered ? glitch.recovered - r.recovered
                                                               : r.recovered - glitch.recovered;
        ++runs;
        plain_total += plain.recovered;
        max_gap = std::max(max_gap, gap);
        std::cerr << "  C2 " << f << " k=" << k << " seed=" << seed << ": R " << r.recovered << ", MR plain "
                  << plain.recovered << ", MR glitch " << glitch.recovered << " (wrong " << glitch.wrong << ")\n";
        c.expect(plain.recovered == 0, cat(f, " k=", k, " seed=", seed, ": plain recovered ", plain.recovered));
        c.expect(gap <= 1, cat(f, " k=", k, " seed=", seed, ": glitch ", glitch.recovered, " vs R ", r.recovered));
        c.expect(glitch.wrong == 0, cat(f, " k=", k, " seed=", seed, ": glitch wrong bits ", glitch.wrong));
      }
  c.summary = cat(runs, " designs, plain total ", plain_total, ", largest glitch-vs-R gap ", max_gap);
}

// ---------------------------------------------------------------------------
// 3. KT_DFS protection

void criterion3(Check& c) {
  const std::vector<std::string> attacks{"shift-and-leak", "glitch-and-leak", "cone-sat", "sat"};
  std::size_t runs = 0;
  for (const auto& [f, k] : std::vector<std::pair<std::string, std::size_t>>{{"s27", 3}, {"s13207", 32}})
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const LockedDesign ld = insert_key_gates(bench(f), k, LockStrategy::Rll, seed);
      const ScanDesign sd = build_scan_design(ld, ArchKind::KtDfs, 1, seed);
      for (const auto& a : attacks) {
        Oracle o(sd, seed);
        AttackReport r;
        if (a == "shift-and-leak") r = shift_and_leak(o);
        if (a == "glitch-and-leak") r = glitch_and_leak(o);
        if (a == "cone-sat") r = cone_sat_preprocess(o);
        if (a == "sat") r = open_scan_sat(o);
        ++runs;
        c.expect(r.recovered_count() == 0, cat(f, " seed=", seed, " ", a, ": ", r.recovered_count(), " bits"));
      }
    }
  const BmcResult kt = explore_leaks(build_scan_design(bmc_toy(), ArchKind::KtDfs, 1, 1), 64);
  const BmcResult rd = explore_leaks(build_scan_design(bmc_toy(), ArchKind::RDfs, 1, 1), 64);
  std::cerr << "  C3 toy KT_DFS: " << kt.states << " states, depth " << kt.depth << ", trapped "
            << kt.key_trapped << ", leak " << kt.leak << "; R_DFS control leak " << rd.leak << "\n";
  c.expect(!kt.leak, "toy KT_DFS leaks: " + kt.leak_trace);
  c.expect(kt.key_trapped, "toy KT_DFS exploration never trapped the key");
  c.expect(rd.leak, "toy R_DFS control found no leak, so the exploration proves nothing");
  c.summary = cat(runs, " attack runs at 0 bits, toy exploration ", kt.states, " states without a leak");
}

// ---------------------------------------------------------------------------
// 4. glitch threshold

void criterion4(Check& c) {
  std::vector<DelayModel> models(3);
  models[1].d_not = 7, models[1].d_and = 11, models[1].d_nor = 9, models[1].d_clkq = 14, models[1].t_setup = 3;
  models[2].d_not = 16, models[2].d_and = 25, models[2].d_nor = 22, models[2].d_clkq = 30, models[2].t_setup = 9;
  std::vector<std::string> found;
  for (const auto& dm : models) {
    const Ps lo = dm.d_du() - dm.t_setup - 1, hi = dm.d_du() + dm.d_and;
    const auto pts = glitch_sweep(dm, 1, 3 * dm.d_du(), 1);
    std::size_t flips = 0;
    Ps last_safe = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i && pts[i].tripped != pts[i - 1].tripped) ++flips;
      if (!pts[i].tripped && (i + 1 == pts.size() || pts[i + 1].tripped)) last_safe = pts[i].width;
    }
    const bool starts_safe = !pts.empty() && !pts.front().tripped;
    std::cerr << "  C4 d_not=" << dm.d_not << " d_and=" << dm.d_and << " t_setup=" << dm.t_setup << ": " << flips
              << " threshold(s), widest safe " << last_safe << " ps, range [" << lo << ", " << hi << ")\n";
    c.expect(starts_safe && flips == 1, cat("d_not=", dm.d_not, ": ", flips, " thresholds"));
    c.expect(last_safe >= lo && last_safe < hi, cat("d_not=", dm.d_not, ": threshold ", last_safe, " outside range"));
    found.push_back(std::to_string(last_safe));
  }
  c.summary = "thresholds " + found[0] + ", " + found[1] + ", " + found[2] + " ps";
}

// ---------------------------------------------------------------------------
// 5. test-cost closed forms

void criterion5(Check& c) {
  std::size_t checks = 0;
  for (const auto& [f, k] : std::vector<std::pair<std::string, std::size_t>>{{"s27", 3}, {"s13207", 32}}) {
    const LockedDesign ld = insert_key_gates(bench(f), k, LockStrategy::Rll, 1);
    const ScanDesign mr = build_scan_design(ld, ArchKind::MrDfs, 1, 1);
    const ScanDesign kt = build_scan_design(ld, ArchKind::KtDfs, 1, 1);
    for (std::size_t p : {1u, 10u, 100u}) {
      const auto pats = random_patterns(p, mr.num_rcs(), mr.num_pis(), p);
      const auto m = functional_test_flow(mr, pats);
      const auto t = functional_test_flow(kt, pats);
      const std::size_t lm = mr.max_chain_length(), lk = kt.max_chain_length();
      // MR: per pattern a sys_rst plus one gated cycle and one capture
      const std::uint64_t want_mr = p * (k + lm) + 2 * p;
      // KT: one key load and register cycle, then a load and a capture per pattern
      const std::uint64_t want_kt = k + 1 + p * lk + p;
      std::cerr << "  C5 " << f << " P=" << p << ": MR " << m.cost.total_cycles() << " (want " << want_mr
                << ", loads " << m.cost.tpnvm_loads << "), KT " << t.cost.total_cycles() << " (want " << want_kt
                << ", loads " << t.cost.tpnvm_loads << ")\n";
      c.expect(m.cost.total_cycles() == want_mr, cat(f, " P=", p, " MR ", m.cost.total_cycles(), " != ", want_mr));
      c.expect(m.cost.keyload_cycles == p * k, cat(f, " P=", p, " MR key-load cycles ", m.cost.keyload_cycles));
      c.expect(m.cost.tpnvm_loads == p, cat(f, " P=", p, " MR loads ", m.cost.tpnvm_loads));
      c.expect(t.cost.total_cycles() == want_kt, cat(f, " P=", p, " KT ", t.cost.total_cycles(), " != ", want_kt));
      c.expect(t.cost.keyload_cycles == k, cat(f, " P=", p, " KT key-load cycles ", t.cost.keyload_cycles));
      c.expect(t.cost.tpnvm_loads == 1, cat(f, " P=", p, " KT loads ", t.cost.tpnvm_loads));
      c.expect(t.counters.cycles == t.cost.total_cycles(), cat(f, " P=", p, " KT chip clock count disagrees"));
      checks += 2;
    }
  }
  c.summary = cat(checks, " flows match");
}

// ---------------------------------------------------------------------------
// 6. coverage equality

void criterion6(Check& c) {
  std::size_t compared = 0;
  for (const auto& [f, k] : std::vector<std::pair<std::string, std::size_t>>{
           {"s27", 3}, {"s13207", 32}, {"s38417", 32}, {"s38584", 32}}) {
    const LockedDesign ld = insert_key_gates(bench(f), k, LockStrategy::Rll, 1);
    for (std::uint64_t pseed : {1u, 2u}) {
      const ScanDesign open = build_scan_design(ld, ArchKind::OpenScan, 1, pseed);
      const ScanDesign kt = build_scan_design(ld, ArchKind::KtDfs, 1, pseed);
      const auto pats = random_patterns(16, open.num_rcs(), open.num_pis(), pseed);
      const auto a = fault_coverage(open, pats, Flow::Structural);
      const auto b = fault_coverage(kt, pats, Flow::Structural);
      std::size_t diff = 0;
      for (std::size_t i = 0; i < a.detected.size(); ++i) diff += a.detected[i] != b.detected[i];
      std::cerr << "  C6 " << f << " pattern seed " << pseed << ": OPEN " << a.percent() << "%, KT " << b.percent()
                << "%, " << diff << " differing faults of " << a.faults.size() << "\n";
      c.expect(a.detected.size() == b.detected.size() && diff == 0, cat(f, " seed ", pseed, ": ", diff, " differ"));
      ++compared;
    }
  }
  // s27 has 4 inputs and 3 flip-flops: every pattern, against a name-level oracle
  const LockedDesign ld = insert_key_gates(bench("s27"), 2, LockStrategy::Rll, 1);
  const ScanDesign sd = build_scan_design(ld, ArchKind::KtDfs, 1, 1);
  const Key dummy{true, false};
  const auto pats = exhaustive_patterns(sd.num_rcs(), sd.num_pis());
  const auto cov = fault_coverage(sd, pats, Flow::Structural, dummy);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < cov.faults.size(); ++i) {
    bool det = false;
    for (const auto& p : pats) {
      const auto src = sources_of(sd, p, dummy);
      if (faulty_frame(ld.netlist, src, &cov.faults[i]) != faulty_frame(ld.netlist, src, nullptr)) {
        det = true;
        break;
      }
    }
    mismatches += det != cov.detected[i];
  }
  std::cerr << "  C6 s27 exhaustive: " << cov.detected_count() << "/" << cov.faults.size() << " detected, "
            << mismatches << " disagree with the oracle\n";
  c.expect(mismatches == 0, cat("s27 exhaustive: ", mismatches, " faults disagree with the oracle"));
  c.summary = cat(compared, " KT/OPEN comparisons equal, s27 exhaustive ", cov.detected_count(), "/",
                  cov.faults.size(), " matches the oracle");
}

// ---------------------------------------------------------------------------
// 7. area ordering and ratio

void criterion7(Check& c) {
  std::string ratios;
  for (const char* f : kLarge) {
    const LockedDesign ld = insert_key_gates(bench(f), 128, LockStrategy::SllLike, 1);
    const double r = area_overhead(build_scan_design(ld, ArchKind::RDfs, 1, 1));
    const double mr = area_overhead(build_scan_design(ld, ArchKind::MrDfs, 1, 1));
    const double kt = area_overhead(build_scan_design(ld, ArchKind::KtDfs, 1, 1));
    const double reduction = (r - kt) / r * 100.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "  C7 %s: R %.3f%%, MR %.3f%%, KT %.3f%%, KT vs R reduction %.1f%%\n", f, r, mr,
                  kt, reduction);
    std::cerr << buf;
    c.expect(kt < mr && mr < r, cat(f, ": ordering kt < mr < R violated"));
    c.expect(reduction >= 40.0 && reduction <= 80.0, cat(f, ": reduction ", reduction, "% outside [40, 80]"));
    std::snprintf(buf, sizeof buf, "%s%s %.1f%%", ratios.empty() ? "" : ", ", f, reduction);
    ratios += buf;
  }
  c.summary = "kt < mR < R holds; reductions " + ratios;
}

// ---------------------------------------------------------------------------
// 8. SAT attack vs exhaustive key search

void criterion8(Check& c) {
  std::size_t agreed = 0, total_dips = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    const int ins = 3 + static_cast<int>(rng() % 6);
    const int dffs = static_cast<int>(rng() % 4);  // q-nets are cone inputs too
    const Netlist orig = random_netlist(seed, ins, dffs, 20 + static_cast<int>(rng() % 25));
    const std::size_t k = 4 + rng() % 13;
    LockedDesign ld;
    try {
      ld = insert_key_gates(orig, k, LockStrategy::Rll, seed);
    } catch (const TooManyKeys&) {
      ld = insert_key_gates(orig, 4, LockStrategy::Rll, seed);
    }
    const IoOracle o = reference_oracle(orig);
    const auto sat = sat_attack(ld, o);
    const Key bf = brute_force_key(ld, o);
    total_dips += sat.dips;
    // exhaustive miter over the <= 12 non-key sources, by name
    const Netlist a = apply_key(ld, sat.key), b = apply_key(ld, bf);
    const auto src = orig.sources();
    bool same = src.size() <= 12;
    for (std::uint64_t m = 0; same && m < (1ULL << src.size()); ++m) {
      std::map<std::string, bool> in;
      for (std::size_t i = 0; i < src.size(); ++i) in[orig.net_name(src[i])] = (m >> i) & 1U;
      const auto va = reference_eval(a, in), vb = reference_eval(b, in), vo = reference_eval(orig, in);
      for (NetId s : orig.sinks()) {
        const std::string& nm = orig.net_name(s);
        if (va.at(nm) != vb.at(nm) || va.at(nm) != vo.at(nm)) same = false;
      }
    }
    c.expect(same, cat("seed ", seed, ": keys differ functionally"));
    agreed += same;
  }
  c.summary = cat(agreed, "/100 seeds functionally identical, ", total_dips, " DIPs total");
}

// ---------------------------------------------------------------------------
// 9. property suites

// Runs `cases` seeded trials; a trial returns an empty string on success.
std::size_t property(Check& c, const std::string& name, std::size_t cases,
                     const std::function<std::string(std::uint64_t)>& trial) {
  std::size_t ran = 0;
  for (std::uint64_t s = 1; s <= cases; ++s) {
    const std::string err = trial(s);
    ++ran;
    if (!err.empty()) {
      c.expect(false, cat(name, " seed ", s, ": ", err));
      break;
    }
  }
  std::cerr << "  C9 " << name << ": " << ran << " cases\n";
  return ran;
}

std::string mode_table_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ArchKind a = kArchs[seed % 4];
  const std::size_t chains = 1 + rng() % 3;
  const LockedDesign ld =
      insert_key_gates(random_netlist(seed, 3, 3 + static_cast<int>(rng() % 4), 24), 2 + rng() % 4, LockStrategy::Rll,
                       seed);
  const ScanDesign sd = build_scan_design(ld, a, chains, seed);
  for (int m = 0; m < 16; ++m) {
    ChipState st = random_chip_state(sd, rng);
    RefState ref = ref_from(st);
    std::vector<bool> si;
    for (std::size_t ch = 0; ch < sd.num_chains(); ++ch) si.push_back(rng() & 1);
    const bool ksi = rng() & 1;
    std::optional<std::vector<bool>> want;
    bool ref_rejects = false;
    try {
      want = ref_step(sd, ref, pins_of(m), si, ksi);
    } catch (const std::invalid_argument&) {
      ref_rejects = true;
    }
    bool chip_rejects = false;
    ScanOut got;
    try {
      got = clock_step(sd, st, pins_of(m), words(si), broadcast(ksi));
    } catch (const InvalidPins&) {
      chip_rejects = true;
    }
    if (ref_rejects != chip_rejects) return cat(to_string(a), " pins ", m, ": pin validity differs");
    if (ref_rejects) continue;
    if (got.masked != !want.has_value()) return cat(to_string(a), " pins ", m, ": scan-out masking differs");
    if (want && lane0(got.bits) != *want) return cat(to_string(a), " pins ", m, ": scan-out differs");
    if (!same(ref, st)) return cat(to_string(a), " pins ", m, ": next state differs");
  }
  return {};
}

std::string refinement_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Netlist n = random_netlist(seed, 3 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 3),
                                   8 + static_cast<int>(rng() % 20));
  TriAssignment partial;
  std::vector<std::string> free;
  for (NetId id : n.sources()) {
    const unsigned r = rng() % 3;
    partial[n.net_name(id)] = r == 0 ? Tri::X : tri_of(r == 1);
    if (r == 0) free.push_back(n.net_name(id));
  }
  const TriAssignment three = eval3(n, partial);
  for (int t = 0; t < 8; ++t) {
    BitAssignment full;
    for (const auto& [net, v] : partial) full[net] = v == Tri::X ? (rng() & 1) != 0 : v == Tri::One;
    const BitAssignment two = eval_comb(n, full);
    for (const auto& [net, v] : three)
      if (v != Tri::X && tri_of(two.at(net)) != v) return "net " + net + " definite under X but not refined";
  }
  return {};
}

std::string cnf_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Netlist n = random_netlist(seed, 3 + static_cast<int>(rng() % 5), static_cast<int>(rng() % 3),
                                   6 + static_cast<int>(rng() % 30), 4);
  CdclSolver s;
  const auto lits = encode_netlist(s, n);
  BitAssignment a;
  std::vector<int> assume;
  for (NetId id : n.sources()) {
    const bool b = rng() & 1;
    a[n.net_name(id)] = b;
    assume.push_back(b ? lits[id] : -lits[id]);
  }
  if (s.solve(assume) != SatResult::Sat) return "consistent assignment reported unsatisfiable";
  const BitAssignment v = eval_comb(n, a);
  for (NetId id = 0; id < n.num_nets(); ++id)
    if (s.model_lit(lits[id]) != v.at(n.net_name(id))) return "model disagrees on " + n.net_name(id);
  // flipping any one net contradicts the sources
  const NetId pick = static_cast<NetId>(rng() % n.num_nets());
  if (n.driver(pick).kind == DriverKind::Gate) {
    assume.push_back(v.at(n.net_name(pick)) ? -lits[pick] : lits[pick]);
    if (s.solve(assume) != SatResult::Unsat) return "wrong value on " + n.net_name(pick) + " accepted";
  }
  return {};
}

std::size_t leak_cases = 0;

std::string leak_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const LockedDesign ld = insert_key_gates(random_netlist(seed, 2, 4, 14 + static_cast<int>(rng() % 8)),
                                           1 + rng() % 2, LockStrategy::Rll, seed);
  const ScanDesign sd = build_scan_design(ld, ArchKind::RDfs, 1, seed);
  const std::uint32_t lc = static_cast<std::uint32_t>(rng() % sd.num_rcs());
  std::vector<std::uint32_t> forced;
  if (rng() & 1) forced.push_back(static_cast<std::uint32_t>(rng() % sd.num_rcs()));
  LeakSearchOptions opt;
  if (seed % 5 == 0) opt.conflict_budget = 0;  // probe path
  const auto cond = find_leak_condition(sd, lc, forced, opt);
  if (!cond) return {};
  ++leak_cases;
  for (auto f : forced)
    if (f != lc && cond->rc_assignment[f] != Tri::X) return "forced cell was assigned";
  if (!holds_exhaustively(sd, *cond)) return cat("condition for lc ", lc, " fails on some completion");
  if (!leak_condition_holds(sd, *cond)) return "library check rejects its own condition";
  return {};
}

void criterion9(Check& c) {
  const std::size_t modes = property(c, "mode table", 1200, mode_table_case);
  const std::size_t refine = property(c, "eval3 refines eval_comb", 1500, refinement_case);
  const std::size_t cnf = property(c, "CNF sampling", 1500, cnf_case);
  leak_cases = 0;
  std::size_t leak_trials = 0;
  for (std::uint64_t base = 0; leak_cases < 1000 && leak_trials < 20000; base += 500)
    leak_trials += property(c, "leak condition", 500, [&](std::uint64_t s) { return leak_case(base + s); });
  std::cerr << "  C9 leak condition: " << leak_cases << " conditions found and checked in " << leak_trials
            << " searches\n";
  c.expect(leak_cases >= 1000, cat("only ", leak_cases, " leak conditions were checked"));
  c.summary = cat(modes, " mode, ", refine, " refinement, ", cnf, " CNF, ", leak_cases, " leak-condition cases");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, void (*)(Check&)>> criteria{
      {"shift-and-leak recovers >= 98% on R_DFS", criterion1},
      {"MR_DFS plain 0, glitch within 1 of R_DFS", criterion2},
      {"KT_DFS: every attack 0 bits, toy exploration finds no leak", criterion3},
      {"single glitch threshold in range for 3 delay models", criterion4},
      {"test-cost closed forms for P in {1, 10, 100}", criterion5},
      {"KT_DFS coverage equals OPEN_SCAN; exhaustive oracle on s27", criterion6},
      {"area ordering kt < mR < R and kt-vs-R reduction in [40%, 80%]", criterion7},
      {"sat_attack key equals brute force functionally, 100 seeds", criterion8},
      {"property suites, >= 1000 cases each", criterion9},
  };
  std::set<std::size_t> pick;
  for (int i = 1; i < argc; ++i) {
    const long v = std::strtol(argv[i], nullptr, 10);
    if (v < 1 || v > static_cast<long>(criteria.size())) {
      std::cerr << "usage: acceptance [1-" << criteria.size() << " ...]\n";
      return 2;
    }
    pick.insert(static_cast<std::size_t>(v));
  }
  bool all_ok = true;
  for (std::size_t i = 1; i <= criteria.size(); ++i) {
    if (!pick.empty() && !pick.count(i)) continue;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i - 1].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    all_ok = all_ok && ok;
    std::printf("[%s] %zu. %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", i, criteria[i - 1].first,
                ok ? c.summary.c_str() : c.failures.front().c_str(), ms_since(t0) / 1000.0);
    for (std::size_t f = 1; f < c.failures.size() && f < 6; ++f) std::printf("       %s\n", c.failures[f].c_str());
    if (c.failures.size() > 6) std::printf("       ... %zu more\n", c.failures.size() - 6);
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
