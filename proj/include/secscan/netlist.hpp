// SPDX-License-Identifier: Apache-2.0
//
// Gate-level netlists: BENCH parsing/writing, two- and three-valued
// evaluation, fan-in cone extraction and gate-equivalent area accounting.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace secscan {

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf };

std::string_view to_string(GateKind kind);
/// Case-insensitive; accepts INV for NOT and BUFF for BUF. DFF is not a gate.
std::optional<GateKind> parse_gate_kind(std::string_view word);

using NetId = std::uint32_t;

struct Gate {
  NetId output;
  GateKind kind;
  std::vector<NetId> inputs;
};

struct Dff {
  NetId q;
  NetId d;
};

enum class DriverKind : std::uint8_t { PrimaryInput, DffOutput, Gate };

struct Driver {
  DriverKind kind;
  std::uint32_t index;  // into inputs(), dffs() or gates()
};

/// One reader of a net. Gate pins, DFF data pins and primary-output ports
/// are all fanout branches.
struct Consumer {
  enum class Kind : std::uint8_t { GatePin, DffData, PrimaryOutput };
  Kind kind;
  std::uint32_t index;  // gate index, dff index or output position
  std::uint32_t pin;    // input position for GatePin, else 0
  bool operator==(const Consumer&) const = default;
};

/// Immutable gate-level DAG. DFF q-nets act as pseudo-inputs and d-nets as
/// pseudo-outputs of the combinational core, which is acyclic.
class Netlist {
 public:
  Netlist() = default;

  const std::string& name() const { return name_; }
  std::size_t num_nets() const { return names_.size(); }
  const std::string& net_name(NetId id) const { return names_[id]; }
  std::optional<NetId> find_net(std::string_view name) const;
  /// Throws UnknownNet.
  NetId net(std::string_view name) const;

  std::span<const NetId> inputs() const { return inputs_; }
  std::span<const NetId> outputs() const { return outputs_; }
  std::span<const Dff> dffs() const { return dffs_; }
  /// Declaration order.
  std::span<const Gate> gates() const { return gates_; }
  /// Gate indices in a topological order of the combinational core.
  std::span<const std::uint32_t> topo_order() const { return topo_; }

  const Driver& driver(NetId id) const { return drivers_[id]; }
  std::span<const Consumer> consumers(NetId id) const { return consumers_[id]; }

  /// Primary inputs followed by DFF q-nets: the evaluation order of sources.
  std::vector<NetId> sources() const;
  /// Primary outputs followed by DFF d-nets.
  std::vector<NetId> sinks() const;
  std::size_t num_sources() const { return inputs_.size() + dffs_.size(); }

  /// Longest path (in gates) from each net to any primary output; -1 when
  /// the net reaches no primary output.
  std::vector<int> distance_to_outputs() const;

 private:
  friend class NetlistBuilder;

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NetId> index_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<Dff> dffs_;
  std::vector<Gate> gates_;
  std::vector<std::uint32_t> topo_;
  std::vector<Driver> drivers_;
  std::vector<std::vector<Consumer>> consumers_;
};

/// Collects declarations by name and validates them into a Netlist.
class NetlistBuilder {
 public:
  explicit NetlistBuilder(std::string name = {});

  /// Source line attached to subsequent declarations (diagnostics only).
  NetlistBuilder& at_line(std::size_t line);
  NetlistBuilder& add_input(std::string_view net);
  NetlistBuilder& add_output(std::string_view net);
  NetlistBuilder& add_gate(std::string_view output, GateKind kind, std::vector<std::string> inputs);
  NetlistBuilder& add_dff(std::string_view q, std::string_view d);

  /// Throws DuplicateNet, UndefinedNet, ArityError or CycleError.
  Netlist build() const;

 private:
  struct GateDecl {
    std::string output;
    GateKind kind;
    std::vector<std::string> inputs;
    std::size_t line;
  };
  struct SimpleDecl {
    std::string net;
    std::string other;
    std::size_t line;
  };

  std::string name_;
  std::size_t line_ = 0;
  std::vector<SimpleDecl> inputs_;
  std::vector<SimpleDecl> outputs_;
  std::vector<SimpleDecl> dffs_;
  std::vector<GateDecl> gates_;
};

Netlist parse_bench(std::string_view text, std::string name = {});
Netlist read_bench_file(const std::filesystem::path& path);
std::string write_bench(const Netlist& netlist);

// ---------------------------------------------------------------------------
// Evaluation

enum class Tri : std::uint8_t { Zero, One, X };

constexpr Tri tri_of(bool b) { return b ? Tri::One : Tri::Zero; }
constexpr Tri tri_not(Tri a) { return a == Tri::X ? Tri::X : (a == Tri::One ? Tri::Zero : Tri::One); }
constexpr Tri tri_and(Tri a, Tri b) {
  if (a == Tri::Zero || b == Tri::Zero) return Tri::Zero;
  if (a == Tri::One && b == Tri::One) return Tri::One;
  return Tri::X;
}
constexpr Tri tri_or(Tri a, Tri b) {
  if (a == Tri::One || b == Tri::One) return Tri::One;
  if (a == Tri::Zero && b == Tri::Zero) return Tri::Zero;
  return Tri::X;
}
constexpr Tri tri_xor(Tri a, Tri b) {
  if (a == Tri::X || b == Tri::X) return Tri::X;
  return a == b ? Tri::Zero : Tri::One;
}
char tri_char(Tri t);

Tri eval_gate3(GateKind kind, std::span<const Tri> inputs);
std::uint64_t eval_gate_word(GateKind kind, std::span<const std::uint64_t> inputs);

/// Word-parallel evaluation: 64 independent assignments per word. `source_words`
/// follows Netlist::sources(). Returns one word per net.
std::vector<std::uint64_t> eval_words(const Netlist& netlist, std::span<const std::uint64_t> source_words);

/// Three-valued (Kleene) evaluation; `source_values` follows Netlist::sources().
std::vector<Tri> eval3_values(const Netlist& netlist, std::span<const Tri> source_values);

using BitAssignment = std::map<std::string, bool, std::less<>>;
using TriAssignment = std::map<std::string, Tri, std::less<>>;

/// Requires every primary input and DFF q-net; throws MissingAssignment.
BitAssignment eval_comb(const Netlist& netlist, const BitAssignment& assign);
TriAssignment eval3(const Netlist& netlist, const TriAssignment& assign);

/// Transitive fan-in of `roots` as a combinational netlist: reached primary
/// inputs and DFF q-nets become inputs (original source order), roots become
/// outputs. Roots must be primary outputs or DFF d-nets; throws UnknownNet.
Netlist extract_cone(const Netlist& netlist, std::span<const std::string> roots);

// ---------------------------------------------------------------------------
// Area in NAND2 gate equivalents.

namespace ge {
inline constexpr double kNand2 = 1.0;
inline constexpr double kNor2 = 1.0;
inline constexpr double kAnd2 = 1.5;
inline constexpr double kOr2 = 1.5;
inline constexpr double kNot = 0.5;
inline constexpr double kBuf = 0.5;
inline constexpr double kXor2 = 2.5;
inline constexpr double kXnor2 = 2.5;
inline constexpr double kMux21 = 2.0;
inline constexpr double kMux41 = 5.0;
inline constexpr double kDff = 6.0;
inline constexpr double kDffReset = 7.0;

/// k-input gates cost (k-1) times the 2-input weight.
double gate(GateKind kind, std::size_t arity);
}  // namespace ge

double gate_equivalents(const Netlist& netlist);

}  // namespace secscan
