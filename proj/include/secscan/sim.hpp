// SPDX-License-Identifier: Apache-2.0
//
// Flattened word-parallel evaluator with per-lane stuck-at fault injection.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "secscan/netlist.hpp"

namespace secscan {

/// Single stuck-at fault: on the stem of `net` (every reader sees it) or on
/// one fanout branch.
struct Fault {
  NetId net;
  std::optional<Consumer> branch;
  bool stuck;
  bool operator==(const Fault&) const = default;
};

class CompiledNetlist;

/// Faults bound to lanes of a CompiledNetlist evaluation.
class FaultMasks {
 public:
  FaultMasks() = default;
  FaultMasks(const CompiledNetlist& c, std::span<const Fault> faults, std::span<const std::uint64_t> lanes);

  bool empty() const { return empty_; }

 private:
  friend class CompiledNetlist;
  bool empty_ = true;
  std::vector<std::uint64_t> stem_and, stem_or;  // per net
  std::vector<std::uint64_t> pin_and, pin_or;    // per flattened gate pin
  std::vector<char> gate_pins;                   // gate (topo slot) has a pin fault
  std::vector<std::uint64_t> dff_and, dff_or;    // per DFF data pin
  std::vector<std::uint64_t> po_and, po_or;      // per output port
};

class CompiledNetlist {
 public:
  explicit CompiledNetlist(Netlist n);

  const Netlist& netlist() const { return n_; }

  /// `values` holds one word per net. Source words (primary inputs and DFF
  /// q-nets) must be filled in; gate outputs are overwritten.
  void evaluate(std::span<std::uint64_t> values, const FaultMasks* faults = nullptr) const;
  std::uint64_t output(std::span<const std::uint64_t> values, std::size_t po, const FaultMasks* faults = nullptr) const;
  std::uint64_t next_state(std::span<const std::uint64_t> values, std::size_t dff,
                           const FaultMasks* faults = nullptr) const;

 private:
  friend class FaultMasks;
  struct Slot {
    GateKind kind;
    NetId out;
    std::uint32_t begin, end;  // into pins_
  };
  Netlist n_;
  std::vector<Slot> slots_;
  std::vector<NetId> pins_;
  std::vector<std::uint32_t> slot_of_gate_;  // gate index -> slot
  std::vector<NetId> sources_;
};

}  // namespace secscan
