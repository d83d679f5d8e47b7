// SPDX-License-Identifier: Apache-2.0
//
// A powered chip seen through its pins only. The secret key never leaves
// this object; callers get PO and SO values and the public scan layout.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secscan/scan.hpp"
#include "secscan/timing.hpp"

namespace secscan {

struct QueryLog {
  std::uint64_t power_cycles = 0;
  std::uint64_t clocks = 0;
  std::uint64_t shift_clocks = 0;
  std::uint64_t input_sets = 0;
  std::uint64_t po_reads = 0;
  std::uint64_t pulse_tests = 0;
  std::uint64_t sys_rsts = 0;
  std::uint64_t total() const { return clocks + input_sets + po_reads + pulse_tests + sys_rsts + power_cycles; }
};

enum class PulseOutcome { ShiftHappened, Nothing, Tripped };
std::string_view to_string(PulseOutcome p);

/// Scan-out of one clock: per-chain bits, or nullopt when masked.
using SoBits = std::optional<std::vector<bool>>;

class Oracle {
 public:
  /// The chip is powered on with `seed` right away.
  explicit Oracle(const ScanDesign& sd, std::uint64_t seed = 0, DelayModel dm = {});

  /// Layout visible to an attacker: netlist, chains, key chain. The key
  /// fields carry no information.
  const ScanDesign& layout() const { return public_; }
  ArchKind arch() const { return sd_.arch; }
  const DelayModel& delay_model() const { return dm_; }

  /// Power cycle. R_DFS boots with one M0 clock, which captures the key.
  void power_cycle(std::uint64_t seed);
  SoBits clock(const ModePins& pins, const std::vector<bool>& si, bool ksi = false);
  /// `cycles` clocks with constant pins; si[c][t] may be short (zeros).
  std::optional<std::vector<std::vector<bool>>> clock_burst(const ModePins& pins, std::size_t cycles,
                                                             const std::vector<std::vector<bool>>& si,
                                                             const std::vector<bool>& ksi = {});
  void set_inputs(const std::vector<bool>& pi);
  std::vector<bool> read_po();

  /// One Test pulse of `width_ps` with SE high, simulated on the MSSD timing
  /// model from the current latch state. MR_DFS only.
  PulseOutcome pulse_test(Ps width_ps, const std::vector<bool>& si);
  /// MR_DFS only.
  void sys_rst();

  const QueryLog& log() const { return log_; }
  /// Cycle and reload counters since the last power cycle.
  const ChipCounters& counters() const { return state_.counters; }

  /// Transcript of calls, one JSON object per entry, when recording is on.
  void record(bool on) { recording_ = on; }
  std::string transcript_json() const;

 private:
  void note(std::string entry);

  ScanDesign sd_;
  ScanDesign public_;
  Key secret_;
  DelayModel dm_;
  TimedCircuit mssd_;
  ChipState state_;
  QueryLog log_;
  bool recording_ = false;
  std::vector<std::string> transcript_;
};

}  // namespace secscan
