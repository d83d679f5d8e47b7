// SPDX-License-Identifier: Apache-2.0
//
// Structural and functional test flows per scan architecture, single
// stuck-at fault simulation and test-cost accounting.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secscan/scan.hpp"
#include "secscan/sim.hpp"

namespace secscan {

/// One test vector: a value per RC (DFF index order) and per functional PI.
struct Pattern {
  std::vector<bool> rc;
  std::vector<bool> pi;
  bool operator==(const Pattern&) const = default;
};

std::vector<Pattern> random_patterns(std::size_t count, std::size_t rc_width, std::size_t pi_width,
                                     std::uint64_t seed);
/// Every assignment of rc_width + pi_width bits (at most 20, else TooLarge).
std::vector<Pattern> exhaustive_patterns(std::size_t rc_width, std::size_t pi_width);

/// One `<rc bits>|<pi bits>` line per pattern.
std::string write_patterns(const std::vector<Pattern>& patterns);
/// Throws FormatError on malformed lines or widths other than the given ones.
std::vector<Pattern> parse_patterns(std::string_view text, std::size_t rc_width, std::size_t pi_width);

/// Stuck-at-0 and stuck-at-1 on every net, plus both on each branch of a net
/// with more than one reader. No collapsing.
std::vector<Fault> enumerate_faults(const Netlist& n);
/// Empty for a stem; otherwise `<reader>/<pin>` where the reader is a gate
/// output net, `DFF:<q>` or `PO:<net>`.
std::string fault_branch_label(const Netlist& n, const Fault& f);

/// Tester clocks by what they were spent on. Key-chain shifts from KSI count
/// as shift cycles; tpNVM transfers count as key-load cycles.
struct TestCost {
  std::uint64_t shift_cycles = 0;
  std::uint64_t capture_cycles = 0;  // functional clocks, register and gated cycles
  std::uint64_t keyload_cycles = 0;
  std::uint64_t tpnvm_loads = 0;
  std::uint64_t sys_rst_count = 0;
  std::uint64_t total_cycles() const { return shift_cycles + capture_cycles + keyload_cycles; }
};

struct PatternResponse {
  std::vector<bool> po;        // after load, before any capture
  std::vector<bool> po_after;  // functional flows: after one capture clock
  std::vector<bool> rc;        // structural flows: captured state as shifted out, per DFF
};

struct FlowResult {
  std::vector<PatternResponse> responses;
  TestCost cost;
  ChipCounters counters;  // as counted by the chip model
};

enum class Flow { Structural, Functional };
std::string_view to_string(Flow f);
/// "structural" or "functional"; throws InvalidArgument.
Flow parse_flow(std::string_view s);

/// Test-mode flow under a dummy key (zeros when empty): the key never comes
/// from the tpNVM and scan-out stays observable. Throws BlockedScanOut if
/// the sequence ever reads a masked scan-out.
FlowResult structural_test_flow(const ScanDesign& sd, const std::vector<Pattern>& patterns, const Key& dummy = {});

/// Mission-key flow that observes primary outputs only. The tpNVM holds the
/// design's secret key.
FlowResult functional_test_flow(const ScanDesign& sd, const std::vector<Pattern>& patterns);

struct CoverageResult {
  std::vector<Fault> faults;
  std::vector<bool> detected;
  std::size_t detected_count() const;
  /// 0 when there are no faults.
  double percent() const;
  /// `fault_net,branch,stuck,detected` with a header line.
  std::string csv(const Netlist& n) const;
};

/// Fault simulation of a flow, 63 faults per pass plus a fault-free lane.
/// A fault is detected iff some observed response differs from the
/// fault-free one. `faults` defaults to enumerate_faults of the locked netlist.
CoverageResult fault_coverage(const ScanDesign& sd, const std::vector<Pattern>& patterns, Flow flow,
                              const Key& dummy = {}, std::optional<std::vector<Fault>> faults = std::nullopt);

}  // namespace secscan
