// SPDX-License-Identifier: Apache-2.0
//
// XOR/XNOR key-gate insertion and correct-key verification.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secscan/netlist.hpp"

namespace secscan {

/// Bit i drives `keyinput_i`.
using Key = std::vector<bool>;

enum class LockStrategy { Rll, SllLike };

std::string_view to_string(LockStrategy s);
/// Accepts "RLL" and "SLL_LIKE" (case-insensitive); throws InvalidArgument.
LockStrategy parse_lock_strategy(std::string_view s);

struct KeyPlacement {
  std::string net;  // the locked net; the key gate now drives this name
  GateKind kind;    // Xor or Xnor
  std::size_t key_index;
  bool operator==(const KeyPlacement&) const = default;
};

struct LockedDesign {
  Netlist netlist;
  Key secret_key;
  std::vector<KeyPlacement> placements;
  LockStrategy strategy = LockStrategy::Rll;
  std::uint64_t seed = 0;

  std::size_t key_size() const { return secret_key.size(); }
  /// Net ids of keyinput_0 .. keyinput_{K-1}.
  std::vector<NetId> key_inputs() const;
};

std::string key_input_name(std::size_t i);

/// Inserts `k` key gates in-line on gate-output nets that are neither primary
/// outputs nor key inputs. XNOR pairs with secret bit 1, XOR with 0. Throws
/// TooManyKeys.
LockedDesign insert_key_gates(const Netlist& n, std::size_t k, LockStrategy strategy, std::uint64_t seed);

/// Ties the key inputs to `key` and folds the constants away. Throws
/// KeyLengthMismatch.
Netlist apply_key(const LockedDesign& ld, const Key& key);

/// A distinguishing source assignment (Netlist::sources() order of `a`) when
/// `a` and `b` differ on any primary output or DFF d-net; sources, outputs
/// and DFFs are matched by name. Throws SignatureMismatch.
std::optional<std::vector<bool>> find_difference(const Netlist& a, const Netlist& b);

/// apply_key(ld, secret) is equivalent to `original`. Exhaustive when
/// sources <= 20, otherwise by miter unsatisfiability. Throws
/// SignatureMismatch.
bool verify_lock(const LockedDesign& ld, const Netlist& original);

std::string key_to_hex(const Key& key);
/// Inverse of key_to_hex for a key of `bits` bits; throws FormatError.
Key key_from_hex(std::string_view hex, std::size_t bits);

/// `{key_size, secret_key_hex, placements, strategy, seed}`.
std::string sidecar_json(const LockedDesign& ld);
/// Pairs a locked netlist with its sidecar; throws FormatError.
LockedDesign load_locked(Netlist netlist, std::string_view sidecar);

}  // namespace secscan
