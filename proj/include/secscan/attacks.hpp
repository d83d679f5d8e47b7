// SPDX-License-Identifier: Apache-2.0
//
// Key-recovery attacks: the oracle-guided SAT attack, leak-condition search,
// shift-and-leak on R_DFS, its glitch variant on MR_DFS, cone-wise SAT over
// PO reads, and an exhaustive key search used as a cross-check.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "secscan/locking.hpp"
#include "secscan/netlist.hpp"
#include "secscan/oracle.hpp"
#include "secscan/scan.hpp"
#include "secscan/timing.hpp"

namespace secscan {

/// Maps the non-key sources of a locked netlist (functional inputs, then
/// q-nets, in Netlist::sources() order) to every sink (outputs, then d-nets)
/// under the correct key.
using IoOracle = std::function<std::vector<bool>(const std::vector<bool>&)>;

/// Oracle answering from an unlocked reference netlist with the same
/// non-key source and sink order.
IoOracle reference_oracle(const Netlist& reference);

struct SatAttackOptions {
  std::size_t max_iterations = 0;  // 0: 10 * key size (at least 10)
  std::int64_t conflict_budget = -1;
};

struct SatAttackResult {
  Key key;
  std::size_t dips = 0;
};

/// Throws Unsatisfiable (no key explains the oracle), IterationLimit.
SatAttackResult sat_attack(const LockedDesign& ld, const IoOracle& oracle, const SatAttackOptions& opt = {});

/// Tries every key (size <= 20, else TooLarge) against the oracle on all
/// inputs when there are at most 16 non-key sources, else on 4096 seeded
/// samples. Throws Unsatisfiable when no key matches.
Key brute_force_key(const LockedDesign& ld, const IoOracle& oracle, std::uint64_t seed = 1);

/// Assignment of scan cells and inputs under which a primary output copies
/// one RC (the leaky cell) whatever the key bits are.
struct LeakCondition {
  std::uint32_t lc = 0;            // DFF index
  std::size_t po = 0;              // output position
  std::vector<Tri> rc_assignment;  // per DFF; X at lc and at cells left free
  std::vector<Tri> pi_assignment;  // per functional input
  bool inverted = false;           // PO = NOT lc
  std::size_t distance = 0;        // chain positions between target SC and lc
};

struct LeakSearchOptions {
  std::int64_t conflict_budget = 50000;  // per LC
  std::size_t max_outputs = 4;           // outputs tried per LC
  std::size_t probe_rounds = 64;         // 64 random assignments per round
  std::uint64_t seed = 1;
};

/// Searches assignments of the other RCs and the PIs so that, with every key
/// input and every cell in `forced_x` unknown, some PO takes definite
/// opposite values for lc = 0 and lc = 1. nullopt rules the cell out.
std::optional<LeakCondition> find_leak_condition(const ScanDesign& sd, std::uint32_t lc,
                                                 const std::vector<std::uint32_t>& forced_x = {},
                                                 const LeakSearchOptions& opt = {});

/// Independent three-valued check of a condition.
bool leak_condition_holds(const ScanDesign& sd, const LeakCondition& c);

struct AttackReport {
  std::string attack;
  std::vector<Tri> recovered;  // per key bit
  std::uint64_t dip_count = 0;
  std::uint64_t shift_cycles = 0;
  std::uint64_t power_cycles = 0;
  std::uint64_t oracle_queries = 0;
  double wall_ms = 0;
  bool completed = true;  // false when a budget cut the attack short

  std::size_t recovered_count() const;
  /// Every definite bit equals the key.
  bool consistent_with(const Key& key) const;
  std::size_t wrong_bits(const Key& key) const;
  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

struct LeakAttackOptions {
  LeakSearchOptions search;
  std::size_t max_lc_per_bit = 12;
  std::uint64_t power_seed = 1000;
  /// Glitch variant only: delay model the attacker assumes (defaults to the
  /// chip's).
  std::optional<DelayModel> delay_model;
};

/// Shift-and-leak through the R_DFS bypass mode. On any other architecture
/// the procedure's self-check fails and every bit stays X.
AttackReport shift_and_leak(Oracle& o, const LeakAttackOptions& opt = {});

/// Shift-and-leak with every post-capture shift replaced by a short Test
/// pulse. Throws WindowNotFound when the assumed delay model has no safe
/// pulse width.
AttackReport glitch_and_leak(Oracle& o, const LeakAttackOptions& opt = {});

/// Oracle-guided SAT attack through OPEN_SCAN pins: each evaluation loads the
/// q-nets by shifting, reads the POs, captures and shifts the next state out.
/// Reports the bits every key consistent with the responses agrees on; any
/// other architecture gives all X.
AttackReport open_scan_sat(Oracle& o, const SatAttackOptions& opt = {});

/// SAT attack per PO cone, with RCs as inputs and each evaluation done by a
/// power cycle, an M1a load and a PO read. R_DFS only; other architectures
/// give all X. Bits are reported only when every key consistent with the
/// observed responses agrees on them.
AttackReport cone_sat_preprocess(Oracle& o, const SatAttackOptions& opt = {});

}  // namespace secscan
