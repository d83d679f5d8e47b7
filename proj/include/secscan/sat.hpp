// SPDX-License-Identifier: Apache-2.0
//
// Satisfiability backends. Literals use DIMACS conventions: variables are
// positive integers, negative values are negated literals.
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace secscan {

/// Anything clauses can be written into: a formula under construction or a
/// live solver.
class ClauseSink {
 public:
  virtual ~ClauseSink() = default;
  virtual int new_var() = 0;
  virtual void add_clause(std::span<const int> lits) = 0;

  void add_clause(std::initializer_list<int> lits) { add_clause(std::span<const int>(lits.begin(), lits.size())); }
  /// A variable fixed to true; cached per sink.
  int true_var();

 private:
  int true_var_ = 0;
};

enum class SatResult { Sat, Unsat, Unknown };

class SatSolver : public ClauseSink {
 public:
  using ClauseSink::add_clause;

  /// `conflict_budget` < 0 means unlimited; Unknown when exhausted.
  virtual SatResult solve(std::span<const int> assumptions = {}, std::int64_t conflict_budget = -1) = 0;
  /// Valid after Sat. Unconstrained variables read as false.
  virtual bool model_value(int var) const = 0;
  virtual int num_vars() const = 0;
  virtual std::uint64_t conflicts() const = 0;

  bool model_lit(int lit) const { return lit > 0 ? model_value(lit) : !model_value(-lit); }
};

/// Conflict-driven clause learning: two watched literals, first-UIP learning,
/// VSIDS with phase saving, Luby restarts, activity-based clause deletion.
class CdclSolver final : public SatSolver {
 public:
  using SatSolver::add_clause;

  CdclSolver();
  ~CdclSolver() override;
  CdclSolver(const CdclSolver&) = delete;
  CdclSolver& operator=(const CdclSolver&) = delete;

  int new_var() override;
  void add_clause(std::span<const int> lits) override;
  SatResult solve(std::span<const int> assumptions = {}, std::int64_t conflict_budget = -1) override;
  bool model_value(int var) const override;
  int num_vars() const override;
  std::uint64_t conflicts() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs an external DIMACS solver per solve() call. The program receives the
/// CNF file path as its only argument and must print `s SATISFIABLE` /
/// `s UNSATISFIABLE` and `v` lines on stdout (SAT competition format).
/// Assumptions become unit clauses; the conflict budget is ignored.
class ExternalSolver final : public SatSolver {
 public:
  using SatSolver::add_clause;

  explicit ExternalSolver(std::string program);

  int new_var() override;
  void add_clause(std::span<const int> lits) override;
  SatResult solve(std::span<const int> assumptions = {}, std::int64_t conflict_budget = -1) override;
  bool model_value(int var) const override;
  int num_vars() const override { return num_vars_; }
  std::uint64_t conflicts() const override { return 0; }

 private:
  std::string program_;
  int num_vars_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::vector<char> model_;
};

/// Environment variable naming an external solver binary.
inline constexpr const char* kExternalSolverEnv = "SECSCAN_SAT_SOLVER";

/// CdclSolver unless SECSCAN_SAT_SOLVER is set.
std::unique_ptr<SatSolver> make_solver();

}  // namespace secscan
