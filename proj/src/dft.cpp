// SPDX-License-Identifier: Apache-2.0
#include "secscan/dft.hpp"

#include <algorithm>
#include <memory>

#include "secscan/error.hpp"
#include "secscan/rng.hpp"

namespace secscan {

std::vector<Pattern> random_patterns(std::size_t count, std::size_t rc_width, std::size_t pi_width,
                                     std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7e57));
  std::vector<Pattern> out(count);
  for (auto& p : out) {
    p.rc.resize(rc_width);
    p.pi.resize(pi_width);
    for (std::size_t i = 0; i < rc_width; ++i) p.rc[i] = rng.bit();
    for (std::size_t i = 0; i < pi_width; ++i) p.pi[i] = rng.bit();
  }
  return out;
}

std::vector<Pattern> exhaustive_patterns(std::size_t rc_width, std::size_t pi_width) {
  const std::size_t w = rc_width + pi_width;
  if (w > 20) throw TooLarge("exhaustive patterns need at most 20 bits, got " + std::to_string(w));
  std::vector<Pattern> out(std::size_t{1} << w);
  for (std::uint64_t m = 0; m < out.size(); ++m) {
    Pattern& p = out[m];
    p.rc.resize(rc_width);
    p.pi.resize(pi_width);
    for (std::size_t i = 0; i < rc_width; ++i) p.rc[i] = (m >> i) & 1U;
    for (std::size_t i = 0; i < pi_width; ++i) p.pi[i] = (m >> (rc_width + i)) & 1U;
  }
  return out;
}

std::string write_patterns(const std::vector<Pattern>& patterns) {
  std::string s;
  for (const auto& p : patterns) {
    for (bool b : p.rc) s += b ? '1' : '0';
    s += '|';
    for (bool b : p.pi) s += b ? '1' : '0';
    s += '\n';
  }
  return s;
}

std::vector<Pattern> parse_patterns(std::string_view text, std::size_t rc_width, std::size_t pi_width) {
  std::vector<Pattern> out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto bar = line.find('|');
    auto where = [&] { return "pattern line " + std::to_string(lineno) + ": "; };
    if (bar == std::string_view::npos) throw FormatError(where() + "missing '|'");
    auto bits = [&](std::string_view s, std::size_t width, const char* what) {
      if (s.size() != width)
        throw FormatError(where() + what + " has " + std::to_string(s.size()) + " bits, expected " +
                          std::to_string(width));
      std::vector<bool> v;
      for (char c : s) {
        if (c != '0' && c != '1') throw FormatError(where() + "bad character '" + std::string(1, c) + "'");
        v.push_back(c == '1');
      }
      return v;
    };
    out.push_back({bits(line.substr(0, bar), rc_width, "rc part"), bits(line.substr(bar + 1), pi_width, "pi part")});
  }
  return out;
}

std::vector<Fault> enumerate_faults(const Netlist& n) {
  std::vector<Fault> out;
  for (NetId id = 0; id < n.num_nets(); ++id) {
    out.push_back({id, std::nullopt, false});
    out.push_back({id, std::nullopt, true});
    const auto readers = n.consumers(id);
    if (readers.size() < 2) continue;
    for (const Consumer& c : readers) {
      out.push_back({id, c, false});
      out.push_back({id, c, true});
    }
  }
  return out;
}

std::string fault_branch_label(const Netlist& n, const Fault& f) {
  if (!f.branch) return {};
  const Consumer& c = *f.branch;
  switch (c.kind) {
    case Consumer::Kind::GatePin: return n.net_name(n.gates()[c.index].output) + "/" + std::to_string(c.pin);
    case Consumer::Kind::DffData: return "DFF:" + n.net_name(n.dffs()[c.index].q);
    case Consumer::Kind::PrimaryOutput: return "PO:" + n.net_name(n.outputs()[c.index]);
  }
  return {};
}

std::string_view to_string(Flow f) { return f == Flow::Structural ? "structural" : "functional"; }

Flow parse_flow(std::string_view s) {
  if (s == "structural") return Flow::Structural;
  if (s == "functional") return Flow::Functional;
  throw InvalidArgument("unknown flow '" + std::string(s) + "'");
}

namespace {

struct LaneRun {
  std::vector<std::vector<std::uint64_t>> po, po_after, rc;
  TestCost cost;
  ChipCounters counters;
};

struct FlowPins {
  ModePins shift, capture;
  bool rc_only = false;  // shift the RC-only chains (R_DFS bypass)
};

FlowPins flow_pins(ArchKind a, Flow f) {
  switch (a) {
    case ArchKind::OpenScan: return {{false, false, true, false}, {false, false, false, false}};
    case ArchKind::RDfs:
      if (f == Flow::Functional) return {{false, false, true, false}, {false, false, false, false}, true};
      return {{true, false, true, false}, {true, false, false, false}};
    case ArchKind::MrDfs:
      if (f == Flow::Functional) return {{true, false, true, false}, {false, false, false, false}};
      return {{true, false, true, false}, {true, false, false, false}};
    case ArchKind::KtDfs: return {{false, false, true, true}, {false, false, false, true}};
  }
  return {};
}

std::vector<std::uint64_t> words(const std::vector<bool>& b) {
  std::vector<std::uint64_t> w;
  w.reserve(b.size());
  for (bool x : b) w.push_back(broadcast(x));
  return w;
}

void check_patterns(const ScanDesign& sd, const std::vector<Pattern>& patterns) {
  for (std::size_t i = 0; i < patterns.size(); ++i)
    if (patterns[i].rc.size() != sd.num_rcs() || patterns[i].pi.size() != sd.num_pis())
      throw InvalidArgument("pattern " + std::to_string(i) + " has widths " + std::to_string(patterns[i].rc.size()) +
                            "|" + std::to_string(patterns[i].pi.size()) + ", design needs " +
                            std::to_string(sd.num_rcs()) + "|" + std::to_string(sd.num_pis()));
}

LaneRun run_flow(const ScanDesign& sd, const std::vector<Pattern>& patterns, Flow flow, const Key& dummy_in,
                 std::shared_ptr<const FaultMasks> fm) {
  check_patterns(sd, patterns);
  const std::size_t k = sd.key_size();
  if (!dummy_in.empty() && dummy_in.size() != k)
    throw KeyLengthMismatch("dummy key has " + std::to_string(dummy_in.size()) + " bits, design has " +
                            std::to_string(k));
  const Key dummy = dummy_in.empty() ? Key(k, false) : dummy_in;
  const bool structural = flow == Flow::Structural;
  const FlowPins pins = flow_pins(sd.arch, flow);
  const auto chains = pins.rc_only ? sd.rc_only_chains() : sd.chains;
  std::size_t len = 0;
  for (const auto& c : chains) len = std::max(len, c.size());

  const Key& tpnvm = structural && sd.arch == ArchKind::OpenScan ? dummy : sd.locked.secret_key;
  ChipState st = power_on(sd, 0, tpnvm);
  st.faults = std::move(fm);
  LaneRun out;
  const std::vector<std::uint64_t> zero_si(sd.num_chains(), 0);

  if (sd.arch == ArchKind::KtDfs) {
    if (k > 0) {
      std::vector<std::uint64_t> ksi(k);
      for (std::size_t t = 0; t < k; ++t) ksi[t] = broadcast(structural && dummy[sd.key_chain[k - 1 - t]]);
      clock_burst(sd, st, {false, false, false, structural}, k, {}, ksi);
      (structural ? out.cost.shift_cycles : out.cost.keyload_cycles) += k;
    }
    clock_step(sd, st, {false, true, false, true}, zero_si);
    ++out.cost.capture_cycles;
  } else if (sd.arch == ArchKind::RDfs && !structural) {
    clock_step(sd, st, {}, zero_si);  // key capture
    ++out.cost.capture_cycles;
  }

  auto stream = [&](const Pattern& p) {
    std::vector<std::vector<std::uint64_t>> s(sd.num_chains(), std::vector<std::uint64_t>(len, 0));
    for (std::size_t c = 0; c < chains.size(); ++c)
      for (std::size_t i = 0; i < chains[c].size(); ++i) {
        const ChainCell& cell = chains[c][i];
        const bool v = cell.kind == CellKind::Rc ? p.rc[cell.index] : (structural && dummy[cell.index]);
        s[c][len - 1 - i] = broadcast(v);
      }
    return s;
  };
  auto shift = [&](const std::vector<std::vector<std::uint64_t>>& s, bool unload) {
    BurstOut b = clock_burst(sd, st, pins.shift, len, s);
    out.cost.shift_cycles += len;
    if (!unload) return;
    if (b.masked) throw BlockedScanOut("scan-out masked during the structural flow");
    std::vector<std::uint64_t> rc(sd.num_rcs(), 0);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const std::size_t lc = chains[c].size();
      for (std::size_t i = 0; i < lc; ++i)
        if (chains[c][i].kind == CellKind::Rc) rc[chains[c][i].index] = b.so[c][lc - 1 - i];
    }
    out.rc.push_back(std::move(rc));
  };

  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (sd.arch == ArchKind::MrDfs && !structural && i > 0) sys_rst(sd, st);
    shift(stream(patterns[i]), structural && i > 0);
    set_inputs(sd, st, words(patterns[i].pi));
    if (sd.arch == ArchKind::MrDfs && !structural) {
      clock_step(sd, st, {}, zero_si);  // gated: key capture, RCs hold
      ++out.cost.capture_cycles;
    }
    out.po.push_back(read_po(sd, st));
    clock_step(sd, st, pins.capture, zero_si);
    ++out.cost.capture_cycles;
    if (!structural) out.po_after.push_back(read_po(sd, st));
  }
  if (structural && !patterns.empty()) shift(std::vector<std::vector<std::uint64_t>>(sd.num_chains()), true);

  out.counters = st.counters;
  if (!(sd.arch == ArchKind::KtDfs)) out.cost.keyload_cycles = st.counters.keyload_cycles;
  out.cost.tpnvm_loads = st.counters.tpnvm_loads;
  out.cost.sys_rst_count = st.counters.sys_rst;
  return out;
}

std::vector<bool> lane0(const std::vector<std::uint64_t>& w) {
  std::vector<bool> b;
  b.reserve(w.size());
  for (auto x : w) b.push_back(x & 1U);
  return b;
}

FlowResult to_result(const LaneRun& r) {
  FlowResult f;
  f.cost = r.cost;
  f.counters = r.counters;
  f.responses.resize(r.po.size());
  for (std::size_t i = 0; i < r.po.size(); ++i) {
    f.responses[i].po = lane0(r.po[i]);
    if (i < r.po_after.size()) f.responses[i].po_after = lane0(r.po_after[i]);
    if (i < r.rc.size()) f.responses[i].rc = lane0(r.rc[i]);
  }
  return f;
}

}  // namespace

FlowResult structural_test_flow(const ScanDesign& sd, const std::vector<Pattern>& patterns, const Key& dummy) {
  return to_result(run_flow(sd, patterns, Flow::Structural, dummy, nullptr));
}

FlowResult functional_test_flow(const ScanDesign& sd, const std::vector<Pattern>& patterns) {
  return to_result(run_flow(sd, patterns, Flow::Functional, {}, nullptr));
}

std::size_t CoverageResult::detected_count() const {
  return static_cast<std::size_t>(std::count(detected.begin(), detected.end(), true));
}

double CoverageResult::percent() const {
  return faults.empty() ? 0.0 : 100.0 * static_cast<double>(detected_count()) / static_cast<double>(faults.size());
}

std::string CoverageResult::csv(const Netlist& n) const {
  std::string s = "fault_net,branch,stuck,detected\n";
  for (std::size_t i = 0; i < faults.size(); ++i)
    s += n.net_name(faults[i].net) + "," + fault_branch_label(n, faults[i]) + "," + (faults[i].stuck ? "1" : "0") +
         "," + (detected[i] ? "1" : "0") + "\n";
  return s;
}

CoverageResult fault_coverage(const ScanDesign& sd, const std::vector<Pattern>& patterns, Flow flow,
                              const Key& dummy, std::optional<std::vector<Fault>> faults) {
  CoverageResult res;
  res.faults = faults ? std::move(*faults) : enumerate_faults(sd.locked.netlist);
  res.detected.assign(res.faults.size(), false);
  if (patterns.empty()) return res;
  constexpr std::size_t kGroup = 63;  // lane 63 stays fault-free
  constexpr std::uint64_t kRef = 1ULL << 63;
  for (std::size_t base = 0; base < res.faults.size(); base += kGroup) {
    const std::size_t g = std::min(kGroup, res.faults.size() - base);
    std::vector<std::uint64_t> lanes(g);
    for (std::size_t j = 0; j < g; ++j) lanes[j] = 1ULL << j;
    auto fm = std::make_shared<FaultMasks>(*sd.compiled,
                                           std::span<const Fault>(res.faults.data() + base, g), lanes);
    const LaneRun r = run_flow(sd, patterns, flow, dummy, fm);
    std::uint64_t hit = 0;
    auto scan = [&](const std::vector<std::vector<std::uint64_t>>& all) {
      for (const auto& v : all)
        for (std::uint64_t w : v) hit |= w ^ ((w & kRef) ? ~0ULL : 0ULL);
    };
    scan(r.po);
    scan(r.po_after);
    scan(r.rc);
    for (std::size_t j = 0; j < g; ++j) res.detected[base + j] = (hit >> j) & 1U;
  }
  return res;
}

}  // namespace secscan
