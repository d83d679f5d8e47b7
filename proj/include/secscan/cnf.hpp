// SPDX-License-Identifier: Apache-2.0
//
// Tseitin encoding of netlists into clauses.
#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secscan/netlist.hpp"
#include "secscan/sat.hpp"

namespace secscan {

/// An explicit clause list. Variables of encoded netlist copies are recorded
/// under "<tag>/<net>".
class CnfFormula final : public ClauseSink {
 public:
  using ClauseSink::add_clause;

  int new_var() override { return ++num_vars_; }
  /// Throws InvalidArgument on an empty clause or an out-of-range literal.
  void add_clause(std::span<const int> lits) override;

  int num_vars() const { return num_vars_; }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }
  const std::map<std::string, int, std::less<>>& var_of_net() const { return var_of_net_; }
  /// Throws UnknownNet.
  int var(std::string_view tag, std::string_view net) const;
  void name_var(std::string_view tag, std::string_view net, int var);

  std::string to_dimacs() const;
  /// Clauses go to `sink` with this formula's variables offset by a fresh block.
  void copy_into(ClauseSink& sink) const;

 private:
  int num_vars_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::map<std::string, int, std::less<>> var_of_net_;
};

/// Clauses for out <-> kind(ins). XOR/XNOR above five inputs are chained
/// through auxiliary variables; everything else uses none.
void encode_gate(ClauseSink& sink, GateKind kind, int out, std::span<const int> ins);

/// Encodes every gate of `n`. `source_lits` follows Netlist::sources(); an
/// entry of 0 (or an empty span) allocates a fresh variable. Source entries
/// may be any literal, so copies can share or invert inputs. Returns one
/// literal per net.
std::vector<int> encode_netlist(ClauseSink& sink, const Netlist& n, std::span<const int> source_lits = {});

/// Self-contained formula for one copy; variable count equals the net count
/// (plus chain auxiliaries for wide XOR gates).
CnfFormula to_cnf(const Netlist& n, std::string_view copy_tag);
/// Appends one tagged copy to an existing formula; returns per-net variables.
std::vector<int> to_cnf(CnfFormula& f, const Netlist& n, std::string_view copy_tag);

/// Fresh literal equal to XOR(a, b).
int encode_xor2(ClauseSink& sink, int a, int b);
/// Fresh literal equal to OR(lits); false constant when `lits` is empty.
int encode_or(ClauseSink& sink, std::span<const int> lits);

}  // namespace secscan
