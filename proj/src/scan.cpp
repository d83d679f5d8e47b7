// SPDX-License-Identifier: Apache-2.0
#include "secscan/scan.hpp"

#include <algorithm>
#include <cctype>
#include <json.hpp>

#include "secscan/error.hpp"
#include "secscan/rng.hpp"

namespace secscan {

std::string_view to_string(ArchKind a) {
  switch (a) {
    case ArchKind::OpenScan: return "OPEN_SCAN";
    case ArchKind::RDfs: return "R_DFS";
    case ArchKind::MrDfs: return "MR_DFS";
    case ArchKind::KtDfs: return "KT_DFS";
  }
  return "?";
}

ArchKind parse_arch(std::string_view s) {
  std::string u(s);
  for (char& c : u) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "OPEN_SCAN" || u == "OPEN") return ArchKind::OpenScan;
  if (u == "R_DFS") return ArchKind::RDfs;
  if (u == "MR_DFS") return ArchKind::MrDfs;
  if (u == "KT_DFS") return ArchKind::KtDfs;
  throw InvalidArgument("unknown architecture '" + std::string(s) + "'");
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::M0: return "M0";
    case Mode::M1a: return "M1a";
    case Mode::M1b: return "M1b";
    case Mode::M2: return "M2";
    case Mode::Shift: return "SHIFT";
    case Mode::Register: return "REGISTER";
  }
  return "?";
}

std::size_t ScanDesign::max_chain_length() const {
  std::size_t m = 0;
  for (const auto& c : chains) m = std::max(m, c.size());
  return m;
}

std::vector<std::vector<ChainCell>> ScanDesign::rc_only_chains() const {
  std::vector<std::vector<ChainCell>> out;
  for (const auto& c : chains) {
    out.emplace_back();
    for (const ChainCell& cell : c)
      if (cell.kind == CellKind::Rc) out.back().push_back(cell);
  }
  return out;
}

namespace {

std::vector<std::size_t> balanced(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

}  // namespace

ScanDesign build_scan_design(const LockedDesign& ld, ArchKind arch, std::size_t num_chains, std::uint64_t seed) {
  const std::size_t n_rc = ld.netlist.dffs().size();
  const std::size_t k = ld.key_size();
  if (n_rc == 0) throw NoStateElements(ld.netlist.name() + " has no flip-flops");
  if (num_chains == 0 || num_chains > n_rc)
    throw InvalidArgument("chain count must be between 1 and " + std::to_string(n_rc));

  ScanDesign sd;
  sd.locked = ld;
  sd.arch = arch;
  sd.seed = seed;

  // RC order does not depend on the architecture.
  std::vector<std::uint32_t> rc_order(n_rc);
  for (std::uint32_t i = 0; i < n_rc; ++i) rc_order[i] = i;
  Rng rc_rng(mix_seed(seed, 1));
  rc_rng.shuffle(rc_order);
  const auto rc_per_chain = balanced(n_rc, num_chains);

  std::vector<std::size_t> sc_per_chain(num_chains, 0);
  std::vector<std::uint32_t> key_order(k);
  for (std::uint32_t i = 0; i < k; ++i) key_order[i] = i;
  const bool mixed = arch == ArchKind::RDfs || arch == ArchKind::MrDfs;
  if (mixed) {
    Rng key_rng(mix_seed(seed, 2));
    key_rng.shuffle(key_order);
    const auto total = balanced(n_rc + k, num_chains);
    for (std::size_t c = 0; c < num_chains; ++c) sc_per_chain[c] = total[c] - rc_per_chain[c];
  }

  std::size_t next_rc = 0, next_sc = 0;
  for (std::size_t c = 0; c < num_chains; ++c) {
    const std::size_t r = rc_per_chain[c], s = sc_per_chain[c];
    std::vector<ChainCell> chain;
    std::size_t j = 0;
    // SC j sits after floor((j+1) r / (s+1)) RCs of this chain.
    auto rcs_before = [&](std::size_t jj) { return (jj + 1) * r / (s + 1); };
    for (std::size_t i = 0; i < r; ++i) {
      while (j < s && rcs_before(j) == i) chain.push_back({CellKind::Sc, key_order[next_sc + j++]});
      chain.push_back({CellKind::Rc, rc_order[next_rc + i]});
    }
    while (j < s) chain.push_back({CellKind::Sc, key_order[next_sc + j++]});
    next_rc += r;
    next_sc += s;
    sd.chains.push_back(std::move(chain));
  }
  if (arch == ArchKind::KtDfs) sd.key_chain = key_order;

  sd.compiled = std::make_shared<CompiledNetlist>(ld.netlist);
  const Netlist& n = ld.netlist;
  sd.input_key_index.assign(n.inputs().size(), -1);
  for (std::size_t i = 0; i < k; ++i) {
    NetId id = n.net(key_input_name(i));
    for (std::size_t p = 0; p < n.inputs().size(); ++p)
      if (n.inputs()[p] == id) sd.input_key_index[p] = static_cast<int>(i);
  }
  for (std::size_t p = 0; p < n.inputs().size(); ++p)
    if (sd.input_key_index[p] < 0) sd.functional_inputs.push_back(p);
  return sd;
}

std::string scan_design_json(const ScanDesign& sd) {
  nlohmann::json j;
  j["arch"] = std::string(to_string(sd.arch));
  j["seed"] = sd.seed;
  j["num_chains"] = sd.num_chains();
  j["key_size"] = sd.key_size();
  const Netlist& n = sd.locked.netlist;
  j["chains"] = nlohmann::json::array();
  for (const auto& c : sd.chains) {
    auto arr = nlohmann::json::array();
    for (const ChainCell& cell : c)
      arr.push_back(cell.kind == CellKind::Rc ? "RC:" + n.net_name(n.dffs()[cell.index].q)
                                              : "SC:" + std::to_string(cell.index));
    j["chains"].push_back(arr);
  }
  j["key_chain"] = sd.key_chain;
  return j.dump(2);
}

Mode decode_mode(ArchKind arch, const ModePins& p) {
  switch (arch) {
    case ArchKind::OpenScan:
      if (p.test || p.reg || p.kse) throw InvalidPins("OPEN_SCAN has only SE");
      return p.se ? Mode::Shift : Mode::M0;
    case ArchKind::RDfs:
    case ArchKind::MrDfs:
      if (p.reg || p.kse) throw InvalidPins(std::string(to_string(arch)) + " has only Test and SE");
      if (!p.test) return p.se ? Mode::M1a : Mode::M0;
      return p.se ? Mode::M2 : Mode::M1b;
    case ArchKind::KtDfs:
      if (p.test) throw InvalidPins("KT_DFS has REG, SE and KSE");
      if (p.se) return Mode::Shift;
      return p.reg ? Mode::Register : Mode::M0;
  }
  return Mode::M0;
}

ChipState power_on_lanes(const ScanDesign& sd, std::uint64_t seed, std::vector<std::uint64_t> tpnvm) {
  const std::size_t k = sd.key_size();
  if (tpnvm.size() != k)
    throw KeyLengthMismatch("tpnvm holds " + std::to_string(tpnvm.size()) + " bits, design has " + std::to_string(k));
  ChipState st;
  st.arch = sd.arch;
  st.rng_seed = seed;
  st.rc.assign(sd.num_rcs(), 0);
  st.sc1.assign(k, 0);
  st.sc2.assign(k, 0);
  st.temp.assign(k, 0);
  st.pi.assign(sd.num_pis(), 0);
  st.tpnvm = std::move(tpnvm);
  switch (sd.arch) {
    case ArchKind::KtDfs: {
      Rng rng(mix_seed(seed, 0xf2));
      for (auto& w : st.sc2) w = broadcast(rng.bit());
      break;
    }
    case ArchKind::RDfs:
    case ArchKind::MrDfs:
      st.temp = st.tpnvm;
      st.counters.keyload_cycles += k;
      // Test is held high through power-up.
      st.prev_test = sd.arch == ArchKind::MrDfs;
      break;
    case ArchKind::OpenScan:
      st.sc1 = st.tpnvm;
      st.counters.tpnvm_loads = 1;
      break;
  }
  return st;
}

ChipState power_on(const ScanDesign& sd, std::uint64_t seed, const Key& tpnvm) {
  std::vector<std::uint64_t> words;
  words.reserve(tpnvm.size());
  for (bool b : tpnvm) words.push_back(broadcast(b));
  if (tpnvm.size() != sd.key_size())
    throw KeyLengthMismatch("tpnvm holds " + std::to_string(tpnvm.size()) + " bits, design has " +
                            std::to_string(sd.key_size()));
  return power_on_lanes(sd, seed, std::move(words));
}

void set_inputs(const ScanDesign& sd, ChipState& st, std::span<const std::uint64_t> pi_words) {
  if (pi_words.size() != sd.num_pis())
    throw InvalidArgument("expected " + std::to_string(sd.num_pis()) + " input words, got " +
                          std::to_string(pi_words.size()));
  st.pi.assign(pi_words.begin(), pi_words.end());
}

namespace {

const std::vector<std::uint64_t>& key_source(const ScanDesign& sd, const ChipState& st) {
  return sd.arch == ArchKind::KtDfs ? st.sc2 : st.sc1;
}

void fill_sources(const ScanDesign& sd, const ChipState& st, std::vector<std::uint64_t>& values) {
  const Netlist& n = sd.compiled->netlist();
  values.resize(n.num_nets());
  const auto& keys = key_source(sd, st);
  std::size_t f = 0;
  for (std::size_t p = 0; p < n.inputs().size(); ++p) {
    const int ki = sd.input_key_index[p];
    values[n.inputs()[p]] = ki >= 0 ? keys[static_cast<std::size_t>(ki)] : st.pi[f++];
  }
  for (std::size_t d = 0; d < n.dffs().size(); ++d) values[n.dffs()[d].q] = st.rc[d];
}

std::vector<std::uint64_t>& scratch() {
  thread_local std::vector<std::uint64_t> buf;
  return buf;
}

void capture(const ScanDesign& sd, ChipState& st) {
  auto& values = scratch();
  fill_sources(sd, st, values);
  const FaultMasks* fm = st.faults.get();
  sd.compiled->evaluate(values, fm);
  for (std::size_t d = 0; d < st.rc.size(); ++d) st.rc[d] = sd.compiled->next_state(values, d, fm);
}

std::uint64_t& cell_ref(ChipState& st, const ChainCell& c) {
  return c.kind == CellKind::Rc ? st.rc[c.index] : st.sc1[c.index];
}

void shift_chains(ChipState& st, const std::vector<std::vector<ChainCell>>& chains,
                  std::span<const std::uint64_t> si) {
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& cells = chains[c];
    if (cells.empty()) continue;
    for (std::size_t i = cells.size() - 1; i > 0; --i) cell_ref(st, cells[i]) = cell_ref(st, cells[i - 1]);
    cell_ref(st, cells[0]) = si[c];
  }
}

std::uint64_t key_head(const ScanDesign& sd, ChipState& st, bool kse, std::uint64_t ksi) {
  if (kse) return ksi;
  const std::size_t k = sd.key_chain.size();
  const std::uint64_t bit = st.tpnvm[sd.key_chain[k - 1 - st.nvm_pointer]];
  if (++st.nvm_pointer == k) {
    st.nvm_pointer = 0;
    ++st.counters.tpnvm_loads;
  }
  return bit;
}

void shift_key_chain(const ScanDesign& sd, ChipState& st, bool kse, std::uint64_t ksi) {
  const auto& kc = sd.key_chain;
  if (kc.empty()) return;
  const std::uint64_t head = key_head(sd, st, kse, ksi);
  for (std::size_t i = kc.size() - 1; i > 0; --i) st.sc1[kc[i]] = st.sc1[kc[i - 1]];
  st.sc1[kc[0]] = head;
}

bool mr_would_trip(const ChipState& st, const ModePins& p) { return p.test && !st.prev_test && st.key_captured; }

void check_si(const ScanDesign& sd, std::size_t got) {
  if (got != sd.num_chains())
    throw InvalidPins("expected " + std::to_string(sd.num_chains()) + " scan-in bits, got " + std::to_string(got));
}

}  // namespace

bool shifts_rcs(const ScanDesign& sd, const ChipState& st, const ModePins& pins) {
  const Mode m = decode_mode(sd.arch, pins);
  switch (sd.arch) {
    case ArchKind::OpenScan:
    case ArchKind::KtDfs: return m == Mode::Shift;
    case ArchKind::RDfs: return m == Mode::M1a || m == Mode::M2;
    case ArchKind::MrDfs: return m == Mode::M2 && !st.mssd_q && !mr_would_trip(st, pins);
  }
  return false;
}

ScanOut clock_step(const ScanDesign& sd, ChipState& st, const ModePins& pins, std::span<const std::uint64_t> si,
                   std::uint64_t ksi) {
  const Mode mode = decode_mode(sd.arch, pins);
  check_si(sd, si.size());

  // Latches that react to pin levels before the edge.
  if (sd.arch == ArchKind::KtDfs && !pins.kse) st.so_blocked = true;
  if (sd.arch == ArchKind::MrDfs && mr_would_trip(st, pins)) st.mssd_q = true;

  ScanOut out;
  out.masked = st.so_blocked;
  if (!out.masked)
    for (const auto& c : sd.chains) out.bits.push_back(cell_ref(st, c.back()));

  bool rc_shift = false;
  bool key_load = false;
  switch (sd.arch) {
    case ArchKind::OpenScan:
      if (mode == Mode::Shift) {
        shift_chains(st, sd.chains, si);
        rc_shift = true;
      } else {
        capture(sd, st);
      }
      break;

    case ArchKind::RDfs:
      switch (mode) {
        case Mode::M0:
          capture(sd, st);
          st.sc1 = st.temp;
          if (!st.key_captured) {
            st.key_captured = true;
            ++st.counters.tpnvm_loads;
          }
          break;
        case Mode::M1a:
          shift_chains(st, sd.rc_only_chains(), si);
          rc_shift = true;
          break;
        case Mode::M1b: capture(sd, st); break;
        default:
          shift_chains(st, sd.chains, si);
          rc_shift = true;
          break;
      }
      break;

    case ArchKind::MrDfs: {
      const bool sd_active = pins.se && pins.test && !st.mssd_q;
      if (mode == Mode::M0) {
        if (!st.prev_m2) capture(sd, st);  // the gated cycle right after M2 holds the RCs
        st.sc1 = st.temp;
        if (!st.key_captured) {
          st.key_captured = true;
          ++st.counters.tpnvm_loads;
        }
      } else if (mode == Mode::M2 && sd_active) {
        shift_chains(st, sd.chains, si);
        rc_shift = true;
      } else {
        capture(sd, st);
      }
      st.prev_test = pins.test;
      st.prev_m2 = mode == Mode::M2;
      break;
    }

    case ArchKind::KtDfs:
      if (mode == Mode::Register) {
        capture(sd, st);
        st.sc2 = st.sc1;
        std::fill(st.sc1.begin(), st.sc1.end(), 0);
      } else {
        if (mode == Mode::Shift) {
          shift_chains(st, sd.chains, si);
          rc_shift = true;
        } else {
          capture(sd, st);
          key_load = !sd.key_chain.empty();
        }
        shift_key_chain(sd, st, pins.kse, ksi);
      }
      break;
  }
  if (st.key_captured) st.so_blocked = true;

  ++st.counters.cycles;
  if (rc_shift)
    ++st.counters.shift_cycles;
  else if (key_load)
    ++st.counters.keyload_cycles;
  else
    ++st.counters.capture_cycles;
  return out;
}

std::pair<ChipState, ScanOut> clock_step(const ScanDesign& sd, const ChipState& st, const ModePins& pins,
                                         std::span<const std::uint64_t> si, std::uint64_t ksi) {
  ChipState next = st;
  ScanOut out = clock_step(sd, next, pins, si, ksi);
  return {std::move(next), std::move(out)};
}

BurstOut clock_burst(const ScanDesign& sd, ChipState& st, const ModePins& pins, std::size_t cycles,
                     const std::vector<std::vector<std::uint64_t>>& si, std::span<const std::uint64_t> ksi) {
  if (!si.empty()) check_si(sd, si.size());
  auto si_at = [&](std::size_t c, std::size_t t) -> std::uint64_t {
    if (si.empty() || t >= si[c].size()) return 0;
    return si[c][t];
  };
  auto ksi_at = [&](std::size_t t) -> std::uint64_t { return t < ksi.size() ? ksi[t] : 0; };

  BurstOut out;
  out.so.assign(sd.num_chains(), {});
  if (cycles == 0) {
    decode_mode(sd.arch, pins);
    out.masked = st.so_blocked;
    return out;
  }

  if (!shifts_rcs(sd, st, pins)) {
    std::vector<std::uint64_t> in(sd.num_chains());
    for (std::size_t t = 0; t < cycles; ++t) {
      for (std::size_t c = 0; c < in.size(); ++c) in[c] = si_at(c, t);
      ScanOut o = clock_step(sd, st, pins, in, ksi_at(t));
      if (o.masked) {
        out.masked = true;
        continue;
      }
      for (std::size_t c = 0; c < in.size(); ++c) out.so[c].push_back(o.bits[c]);
    }
    if (out.masked)
      for (auto& v : out.so) v.clear();
    return out;
  }

  // Pure shift: every chain moves `cycles` positions.
  const Mode mode = decode_mode(sd.arch, pins);
  if (sd.arch == ArchKind::KtDfs && !pins.kse) st.so_blocked = true;
  out.masked = st.so_blocked;
  const auto paths = (sd.arch == ArchKind::RDfs && mode == Mode::M1a) ? sd.rc_only_chains() : sd.chains;
  const std::size_t n = cycles;
  std::vector<std::uint64_t> old;
  for (std::size_t c = 0; c < paths.size(); ++c) {
    const auto& cells = paths[c];
    const std::size_t len = cells.size();
    old.resize(len);
    for (std::size_t i = 0; i < len; ++i) old[i] = cell_ref(st, cells[i]);
    // The tail of the physical chain is the tail of the shifted path.
    if (!out.masked) {
      auto& so = out.so[c];
      so.resize(n);
      for (std::size_t t = 0; t < n; ++t) so[t] = t < len ? old[len - 1 - t] : si_at(c, t - len);
    }
    for (std::size_t i = 0; i < len; ++i) cell_ref(st, cells[i]) = i >= n ? old[i - n] : si_at(c, n - 1 - i);
  }
  if (sd.arch == ArchKind::KtDfs && !sd.key_chain.empty()) {
    const auto& kc = sd.key_chain;
    const std::size_t len = kc.size();
    std::vector<std::uint64_t> heads(n);
    for (std::size_t t = 0; t < n; ++t) heads[t] = key_head(sd, st, pins.kse, ksi_at(t));
    old.resize(len);
    for (std::size_t i = 0; i < len; ++i) old[i] = st.sc1[kc[i]];
    for (std::size_t i = 0; i < len; ++i) st.sc1[kc[i]] = i >= n ? old[i - n] : heads[n - 1 - i];
  }
  if (sd.arch == ArchKind::MrDfs) {
    st.prev_test = pins.test;
    st.prev_m2 = true;
  }
  if (st.key_captured) st.so_blocked = true;
  st.counters.cycles += n;
  st.counters.shift_cycles += n;
  return out;
}

ScanOut glitch_shift(const ScanDesign& sd, ChipState& st, std::span<const std::uint64_t> si) {
  if (sd.arch != ArchKind::MrDfs) throw UnsupportedForArch("glitch shifts exist only on MR_DFS");
  check_si(sd, si.size());
  ScanOut out;
  out.masked = st.so_blocked;
  if (!out.masked)
    for (const auto& c : sd.chains) out.bits.push_back(cell_ref(st, c.back()));
  shift_chains(st, sd.chains, si);
  st.prev_test = false;
  st.prev_m2 = false;
  if (st.key_captured) st.so_blocked = true;
  ++st.counters.cycles;
  ++st.counters.shift_cycles;
  return out;
}

void sys_rst(const ScanDesign& sd, ChipState& st) {
  if (sd.arch == ArchKind::KtDfs) throw UnsupportedForArch("KT_DFS has no sys_rst");
  std::fill(st.rc.begin(), st.rc.end(), 0);
  std::fill(st.sc1.begin(), st.sc1.end(), 0);
  std::fill(st.sc2.begin(), st.sc2.end(), 0);
  st.mssd_q = false;
  st.key_captured = false;
  st.so_blocked = false;
  st.prev_m2 = false;
  st.prev_test = sd.arch == ArchKind::MrDfs;
  st.nvm_pointer = 0;
  if (sd.arch == ArchKind::OpenScan) {
    st.sc1 = st.tpnvm;
  } else {
    st.temp = st.tpnvm;
    st.counters.keyload_cycles += sd.key_size();
  }
  ++st.counters.sys_rst;
}

std::vector<std::uint64_t> source_words(const ScanDesign& sd, const ChipState& st) {
  std::vector<std::uint64_t> values;
  fill_sources(sd, st, values);
  const Netlist& n = sd.compiled->netlist();
  std::vector<std::uint64_t> out;
  for (NetId id : n.sources()) out.push_back(values[id]);
  return out;
}

std::vector<std::uint64_t> read_po(const ScanDesign& sd, const ChipState& st) {
  auto& values = scratch();
  fill_sources(sd, st, values);
  const FaultMasks* fm = st.faults.get();
  sd.compiled->evaluate(values, fm);
  std::vector<std::uint64_t> out(sd.compiled->netlist().outputs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sd.compiled->output(values, i, fm);
  return out;
}

// ---------------------------------------------------------------------------
// Area

AreaBreakdown area_breakdown(const ScanDesign& sd) {
  using namespace ge;
  AreaBreakdown a;
  const double n = static_cast<double>(sd.num_rcs());
  const double k = static_cast<double>(sd.key_size());
  const double chains = static_cast<double>(sd.num_chains());
  a.original_ge = gate_equivalents(sd.locked.netlist);
  a.rc_ge = n * (kDff + kMux21);
  a.plain_dff_ge = n * kDff;
  // SO mask: set-on-load latch, its inverter and one AND per scan-out.
  const double so_mask = kDffReset + kAnd2 + kNot + chains * kAnd2;
  switch (sd.arch) {
    case ArchKind::OpenScan:
      a.other_ge = k * kDff;  // key register
      break;
    case ArchKind::RDfs:
      // SC: resettable storage, 4:1 mode mux, temporary register, M1a bypass mux.
      a.sc_ge = k * (kDffReset + kMux41 + kDff + kMux21);
      a.blockage_ge = so_mask;
      break;
    case ArchKind::MrDfs: {
      // SC without the M1a bypass; the temporary register is cleared by sys_rst.
      a.sc_ge = k * (kDffReset + kMux41 + kDffReset);
      a.blockage_ge = so_mask;
      const double mssd = kDffReset + 2 * kAnd2 + kNor2 + 2 * kNot + 10 * kNot;
      const double clock_gate = kDff + kAnd2 + kNot;
      a.other_ge = mssd + clock_gate;
      break;
    }
    case ArchKind::KtDfs:
      // 1wSC: FF1 with reset, FF2, source mux, FF2 clock AND, inverter.
      a.sc_ge = k * (kDffReset + kDff + kMux21 + kAnd2 + kNot);
      a.blockage_ge = kDffReset + kNot + chains * kAnd2;
      break;
  }
  const double added = a.rc_ge + a.sc_ge + a.blockage_ge + a.other_ge;
  a.overhead_pct = a.original_ge > 0 ? (added - a.plain_dff_ge) / a.original_ge * 100.0 : 0.0;
  return a;
}

double area_overhead(const ScanDesign& sd) { return area_breakdown(sd).overhead_pct; }

std::string chip_state_json(const ChipState& st) {
  auto bits = [](const std::vector<std::uint64_t>& v) {
    std::string s;
    for (auto w : v) s += (w & 1) ? '1' : '0';
    return s;
  };
  nlohmann::json j;
  j["arch"] = std::string(to_string(st.arch));
  j["rc"] = bits(st.rc);
  j["sc1"] = bits(st.sc1);
  j["sc2"] = bits(st.sc2);
  j["temp"] = bits(st.temp);
  j["pi"] = bits(st.pi);
  j["so_blocked"] = st.so_blocked;
  j["mssd_q"] = st.mssd_q;
  j["key_captured"] = st.key_captured;
  j["cycles"] = st.counters.cycles;
  j["shift_cycles"] = st.counters.shift_cycles;
  j["capture_cycles"] = st.counters.capture_cycles;
  j["keyload_cycles"] = st.counters.keyload_cycles;
  j["tpnvm_loads"] = st.counters.tpnvm_loads;
  j["sys_rst"] = st.counters.sys_rst;
  return j.dump(2);
}

}  // namespace secscan
