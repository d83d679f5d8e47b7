// SPDX-License-Identifier: Apache-2.0
//
// Scan-chain stitching and the cycle-level behaviour of the four scan
// architectures. All storage is held as 64-lane words: lane l of every word
// belongs to the l-th copy of the chip, so one simulation can run a fault-free
// machine next to faulty ones, or several key variants side by side. Control
// pins and the control latches they drive are shared by all lanes.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "secscan/locking.hpp"
#include "secscan/netlist.hpp"
#include "secscan/sim.hpp"

namespace secscan {

enum class ArchKind { OpenScan, RDfs, MrDfs, KtDfs };

std::string_view to_string(ArchKind a);
/// Accepts OPEN_SCAN, R_DFS, MR_DFS, KT_DFS (case-insensitive, '-' for '_').
ArchKind parse_arch(std::string_view s);

enum class CellKind : std::uint8_t { Rc, Sc };

struct ChainCell {
  CellKind kind;
  std::uint32_t index;  // DFF index for Rc, key index for Sc
  bool operator==(const ChainCell&) const = default;
};

/// Stitched design. Cell 0 of a chain sits next to its scan-in; the last
/// cell drives scan-out.
struct ScanDesign {
  LockedDesign locked;
  ArchKind arch = ArchKind::OpenScan;
  std::vector<std::vector<ChainCell>> chains;
  /// KT_DFS: key-chain order (key indices), head first. No scan-out.
  std::vector<std::uint32_t> key_chain;
  std::uint64_t seed = 0;

  std::shared_ptr<const CompiledNetlist> compiled;
  /// For each netlist primary input: -1 for functional inputs, else key index.
  std::vector<int> input_key_index;
  /// Indices (into netlist inputs) of the functional primary inputs.
  std::vector<std::size_t> functional_inputs;

  std::size_t num_chains() const { return chains.size(); }
  std::size_t key_size() const { return locked.key_size(); }
  std::size_t num_rcs() const { return locked.netlist.dffs().size(); }
  std::size_t num_pis() const { return functional_inputs.size(); }
  std::size_t max_chain_length() const;
  /// Chains with SC cells removed: the RC-only path of R_DFS mode M1a.
  std::vector<std::vector<ChainCell>> rc_only_chains() const;
};

/// Throws NoStateElements, InvalidArgument (num_chains out of range).
ScanDesign build_scan_design(const LockedDesign& ld, ArchKind arch, std::size_t num_chains, std::uint64_t seed);
std::string scan_design_json(const ScanDesign& sd);

struct ModePins {
  bool test = false;  // R_DFS, MR_DFS
  bool reg = false;   // KT_DFS
  bool se = false;
  bool kse = false;   // KT_DFS
};

enum class Mode { M0, M1a, M1b, M2, Shift, Register };
/// Decodes pins for the architecture; throws InvalidPins for pins the
/// architecture lacks.
Mode decode_mode(ArchKind arch, const ModePins& pins);
std::string_view to_string(Mode m);

/// Cycle and event counters of one powered-on chip.
struct ChipCounters {
  std::uint64_t cycles = 0;
  std::uint64_t shift_cycles = 0;
  std::uint64_t capture_cycles = 0;
  std::uint64_t keyload_cycles = 0;
  std::uint64_t tpnvm_loads = 0;
  std::uint64_t sys_rst = 0;
};

struct ChipState {
  ArchKind arch = ArchKind::OpenScan;
  std::vector<std::uint64_t> rc;     // per DFF
  std::vector<std::uint64_t> sc1;    // per key bit: SC storage, FF1, or the OPEN_SCAN key register
  std::vector<std::uint64_t> sc2;    // per key bit: KT_DFS FF2
  std::vector<std::uint64_t> temp;   // per key bit: R/MR temporary registers
  std::vector<std::uint64_t> tpnvm;  // per key bit
  std::vector<std::uint64_t> pi;     // per functional primary input
  bool so_blocked = false;
  bool mssd_q = false;
  bool key_captured = false;
  bool prev_test = false;
  bool prev_m2 = false;
  std::size_t nvm_pointer = 0;
  std::uint64_t rng_seed = 0;
  ChipCounters counters;
  std::shared_ptr<const FaultMasks> faults;
};

inline constexpr std::uint64_t kAllLanes = ~0ULL;
inline std::uint64_t broadcast(bool b) { return b ? kAllLanes : 0ULL; }

/// rc and SC storage zero; KT_DFS FF2 drawn from `seed`; R/MR temporary
/// registers and the OPEN_SCAN key register hold `tpnvm`. Throws
/// KeyLengthMismatch.
ChipState power_on(const ScanDesign& sd, std::uint64_t seed, const Key& tpnvm);
/// Lane-wise tpnvm contents (one word per key bit).
ChipState power_on_lanes(const ScanDesign& sd, std::uint64_t seed, std::vector<std::uint64_t> tpnvm);

/// Scan-out of one cycle: the pre-edge tail of every chain, or masked.
struct ScanOut {
  bool masked = false;
  std::vector<std::uint64_t> bits;  // per chain, empty when masked
};

/// One rising clock edge, in place. `si` holds one word per chain; `ksi` is
/// the serial key input of KT_DFS. Throws InvalidPins.
ScanOut clock_step(const ScanDesign& sd, ChipState& st, const ModePins& pins, std::span<const std::uint64_t> si,
                   std::uint64_t ksi = 0);
/// Value-returning form.
std::pair<ChipState, ScanOut> clock_step(const ScanDesign& sd, const ChipState& st, const ModePins& pins,
                                         std::span<const std::uint64_t> si, std::uint64_t ksi = 0);

struct BurstOut {
  bool masked = false;
  /// so[c][t] is chain c's scan-out in cycle t.
  std::vector<std::vector<std::uint64_t>> so;
};

/// `cycles` clocks with constant pins. `si[c][t]` feeds chain c in cycle t and
/// `ksi[t]` the key chain (both may be empty: zeros). Pure shift modes take
/// an O(length + cycles) path; the result equals repeated clock_step.
BurstOut clock_burst(const ScanDesign& sd, ChipState& st, const ModePins& pins, std::size_t cycles,
                     const std::vector<std::vector<std::uint64_t>>& si, std::span<const std::uint64_t> ksi = {});

/// One mixed-chain shift caused by a Test glitch that slipped past the MR_DFS
/// shift-disable latch. Test is low again afterwards.
ScanOut glitch_shift(const ScanDesign& sd, ChipState& st, std::span<const std::uint64_t> si);

/// MR_DFS (and R_DFS/OPEN_SCAN): clears RCs, SC storage and every control
/// latch, reloads the temporary registers; counters survive. Throws
/// UnsupportedForArch on KT_DFS.
void sys_rst(const ScanDesign& sd, ChipState& st);

void set_inputs(const ScanDesign& sd, ChipState& st, std::span<const std::uint64_t> pi_words);
/// Words driving each netlist source (inputs then q-nets) in the current state.
std::vector<std::uint64_t> source_words(const ScanDesign& sd, const ChipState& st);
/// Primary outputs under the current state and inputs, without a clock.
std::vector<std::uint64_t> read_po(const ScanDesign& sd, const ChipState& st);

/// Would a clock with these pins shift the RC cells?
bool shifts_rcs(const ScanDesign& sd, const ChipState& st, const ModePins& pins);

/// Area added by scan and security circuitry, as a percentage of the
/// original design's gate equivalents.
struct AreaBreakdown {
  double original_ge = 0;
  double rc_ge = 0;
  double sc_ge = 0;
  double blockage_ge = 0;
  double other_ge = 0;  // key register, MSSD, clock gate
  double plain_dff_ge = 0;
  double overhead_pct = 0;
};
AreaBreakdown area_breakdown(const ScanDesign& sd);
double area_overhead(const ScanDesign& sd);

/// Debug dump of a state (lane 0).
std::string chip_state_json(const ChipState& st);

}  // namespace secscan
