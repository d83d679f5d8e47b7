// SPDX-License-Identifier: Apache-2.0
#include "secscan/sat.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "secscan/error.hpp"

namespace secscan {

int ClauseSink::true_var() {
  if (true_var_ == 0) {
    true_var_ = new_var();
    add_clause({true_var_});
  }
  return true_var_;
}

// ---------------------------------------------------------------------------
// CDCL

namespace {

using Lit = std::uint32_t;  // 2*var + negated
constexpr Lit kNoLit = ~0U;
constexpr int kNoReason = -1;

inline Lit lit_from_dimacs(int x) { return x > 0 ? 2U * static_cast<Lit>(x - 1) : 2U * static_cast<Lit>(-x - 1) + 1U; }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline Lit neg(Lit l) { return l ^ 1U; }

// Luby sequence element i (0-based).
double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    seq++;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct CdclSolver::Impl {
  struct Clause {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    int cref;
    Lit blocker;
  };

  std::vector<Clause> clauses;
  std::vector<int> learnts;
  std::vector<std::vector<Watcher>> watches;  // watches[l]: clauses with l in the first two slots
  std::vector<std::int8_t> value;             // per var: 0 unassigned, 1 true, -1 false
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<char> phase;
  std::vector<double> activity;
  std::vector<char> seen;
  std::vector<Lit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  bool ok = true;
  double var_inc = 1.0;
  double cla_inc = 1.0;
  double max_learnts = 0;
  std::uint64_t total_conflicts = 0;
  std::vector<char> model;

  // Binary max-heap of unassigned variables keyed by activity.
  std::vector<std::uint32_t> heap;
  std::vector<int> heap_pos;  // -1 when absent

  std::int8_t lit_value(Lit l) const {
    std::int8_t v = value[var_of(l)];
    return (l & 1U) ? static_cast<std::int8_t>(-v) : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  bool heap_less(std::uint32_t a, std::uint32_t b) const { return activity[a] > activity[b]; }
  void heap_up(std::size_t i) {
    std::uint32_t v = heap[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!heap_less(v, heap[p])) break;
      heap[i] = heap[p];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    std::uint32_t v = heap[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap.size()) break;
      if (c + 1 < heap.size() && heap_less(heap[c + 1], heap[c])) ++c;
      if (!heap_less(heap[c], v)) break;
      heap[i] = heap[c];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(std::uint32_t v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  std::uint32_t heap_pop() {
    std::uint32_t top = heap[0];
    heap_pos[top] = -1;
    std::uint32_t last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump_var(std::uint32_t v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (double& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }
  void bump_clause(Clause& c) {
    c.activity += cla_inc;
    if (c.activity > 1e20) {
      for (int cr : learnts) clauses[cr].activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  int new_var() {
    auto v = static_cast<std::uint32_t>(value.size());
    value.push_back(0);
    level.push_back(0);
    reason.push_back(kNoReason);
    phase.push_back(0);
    activity.push_back(0);
    seen.push_back(0);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return static_cast<int>(v) + 1;
  }

  void enqueue(Lit l, int from) {
    std::uint32_t v = var_of(l);
    value[v] = (l & 1U) ? -1 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  int attach(std::vector<Lit> lits, bool learnt) {
    int cref = static_cast<int>(clauses.size());
    clauses.push_back({std::move(lits), 0.0, learnt, false});
    const Clause& c = clauses.back();
    watches[c.lits[0]].push_back({cref, c.lits[1]});
    watches[c.lits[1]].push_back({cref, c.lits[0]});
    if (learnt) learnts.push_back(cref);
    return cref;
  }

  int propagate() {
    int conflict = kNoReason;
    while (qhead < trail.size()) {
      Lit false_lit = neg(trail[qhead++]);
      std::vector<Watcher>& ws = watches[false_lit];
      std::size_t i = 0, j = 0;
      const std::size_t n = ws.size();
      while (i < n) {
        Watcher w = ws[i++];
        Clause& c = clauses[w.cref];
        if (c.deleted) continue;
        if (lit_value(w.blocker) == 1) {
          ws[j++] = w;
          continue;
        }
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        Lit first = c.lits[0];
        if (first != w.blocker && lit_value(first) == 1) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (lit_value(c.lits[k]) != -1) {
            std::swap(c.lits[1], c.lits[k]);
            watches[c.lits[1]].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (lit_value(first) == -1) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < n) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  bool redundant(Lit l, std::uint32_t abstract_levels, std::vector<Lit>& to_clear) {
    std::vector<Lit> stack{l};
    std::size_t top = to_clear.size();
    while (!stack.empty()) {
      Lit p = stack.back();
      stack.pop_back();
      const Clause& c = clauses[reason[var_of(p)]];
      for (std::size_t k = 1; k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        std::uint32_t v = var_of(q);
        if (seen[v] || level[v] == 0) continue;
        if (reason[v] != kNoReason && (abstract_levels & (1U << (level[v] & 31))) != 0) {
          seen[v] = 1;
          stack.push_back(q);
          to_clear.push_back(q);
        } else {
          for (std::size_t t = top; t < to_clear.size(); ++t) seen[var_of(to_clear[t])] = 0;
          to_clear.resize(top);
          return false;
        }
      }
    }
    return true;
  }

  void analyze(int conflict, std::vector<Lit>& learnt, int& back_level) {
    learnt.clear();
    learnt.push_back(kNoLit);
    int path = 0;
    Lit p = kNoLit;
    std::size_t index = trail.size();
    int cref = conflict;
    do {
      Clause& c = clauses[cref];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = (p == kNoLit ? 0 : 1); k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        std::uint32_t v = var_of(q);
        if (seen[v] || level[v] == 0) continue;
        bump_var(v);
        seen[v] = 1;
        if (level[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
      do {
        --index;
      } while (!seen[var_of(trail[index])]);
      p = trail[index];
      cref = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = neg(p);

    // Recursive minimization.
    std::vector<Lit> to_clear(learnt.begin(), learnt.end());
    std::uint32_t abstract_levels = 0;
    for (std::size_t k = 1; k < learnt.size(); ++k) abstract_levels |= 1U << (level[var_of(learnt[k])] & 31);
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      Lit q = learnt[k];
      if (reason[var_of(q)] == kNoReason || !redundant(q, abstract_levels, to_clear)) learnt[keep++] = q;
    }
    learnt.resize(keep);
    for (Lit q : to_clear) seen[var_of(q)] = 0;

    back_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[var_of(learnt[k])] > level[var_of(learnt[max_i])]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      back_level = level[var_of(learnt[1])];
    }
  }

  void backtrack(int to_level) {
    if (decision_level() <= to_level) return;
    for (std::size_t k = trail.size(); k-- > trail_lim[static_cast<std::size_t>(to_level)];) {
      std::uint32_t v = var_of(trail[k]);
      phase[v] = static_cast<char>(trail[k] & 1U);
      value[v] = 0;
      reason[v] = kNoReason;
      heap_insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(to_level)]);
    trail_lim.resize(static_cast<std::size_t>(to_level));
    qhead = trail.size();
  }

  bool locked(int cref) const {
    const Clause& c = clauses[cref];
    std::uint32_t v = var_of(c.lits[0]);
    return reason[v] == cref && lit_value(c.lits[0]) == 1;
  }

  void reduce_db() {
    std::vector<int> live;
    for (int cr : learnts)
      if (!clauses[cr].deleted) live.push_back(cr);
    std::sort(live.begin(), live.end(), [&](int a, int b) {
      const Clause& x = clauses[a];
      const Clause& y = clauses[b];
      if ((x.lits.size() <= 2) != (y.lits.size() <= 2)) return x.lits.size() > 2;
      return x.activity < y.activity;
    });
    std::vector<int> kept;
    const std::size_t half = live.size() / 2;
    for (std::size_t k = 0; k < live.size(); ++k) {
      Clause& c = clauses[live[k]];
      if (k < half && c.lits.size() > 2 && !locked(live[k])) {
        c.deleted = true;
        std::vector<Lit>().swap(c.lits);
      } else {
        kept.push_back(live[k]);
      }
    }
    learnts.swap(kept);
  }

  Lit pick_branch() {
    while (!heap.empty()) {
      std::uint32_t v = heap_pop();
      if (value[v] == 0) return 2U * v + static_cast<Lit>(phase[v]);
    }
    return kNoLit;
  }

  void add_clause(std::span<const int> in) {
    if (!ok) return;
    backtrack(0);
    std::vector<Lit> lits;
    lits.reserve(in.size());
    for (int x : in) {
      if (x == 0 || std::abs(x) > static_cast<int>(value.size()))
        throw InvalidArgument("literal " + std::to_string(x) + " out of range");
      lits.push_back(lit_from_dimacs(x));
    }
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> out;
    for (std::size_t k = 0; k < lits.size(); ++k) {
      if (k > 0 && lits[k] == lits[k - 1]) continue;
      if (k > 0 && lits[k] == neg(lits[k - 1])) return;  // tautology
      std::int8_t v = lit_value(lits[k]);
      if (v == 1) return;
      if (v == -1) continue;
      out.push_back(lits[k]);
    }
    if (out.empty()) {
      ok = false;
      return;
    }
    if (out.size() == 1) {
      enqueue(out[0], kNoReason);
      if (propagate() != kNoReason) ok = false;
      return;
    }
    attach(std::move(out), false);
  }

  SatResult search(std::int64_t max_conflicts, const std::vector<Lit>& assumptions, std::int64_t& budget) {
    std::int64_t local = 0;
    std::vector<Lit> learnt;
    for (;;) {
      int conflict = propagate();
      if (conflict != kNoReason) {
        ++total_conflicts;
        ++local;
        if (budget > 0) --budget;
        if (decision_level() == 0) {
          ok = false;
          return SatResult::Unsat;
        }
        int back_level = 0;
        analyze(conflict, learnt, back_level);
        backtrack(back_level);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          int cref = attach(learnt, true);
          bump_clause(clauses[cref]);
          enqueue(learnt[0], cref);
        }
        var_inc *= 1.0 / 0.95;
        cla_inc *= 1.0 / 0.999;
        continue;
      }
      if (budget == 0) {
        backtrack(0);
        return SatResult::Unknown;
      }
      if (local >= max_conflicts) {
        backtrack(0);
        return SatResult::Unknown;  // restart
      }
      if (static_cast<double>(learnts.size()) - static_cast<double>(trail.size()) >= max_learnts) {
        reduce_db();
        max_learnts *= 1.1;
      }
      Lit next = kNoLit;
      while (decision_level() < static_cast<int>(assumptions.size())) {
        Lit a = assumptions[static_cast<std::size_t>(decision_level())];
        std::int8_t v = lit_value(a);
        if (v == 1) {
          trail_lim.push_back(trail.size());
        } else if (v == -1) {
          return SatResult::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == kNoLit) {
        next = pick_branch();
        if (next == kNoLit) {
          model.assign(value.size(), 0);
          for (std::size_t v = 0; v < value.size(); ++v) model[v] = value[v] == 1;
          return SatResult::Sat;
        }
      }
      trail_lim.push_back(trail.size());
      enqueue(next, kNoReason);
    }
  }

  SatResult solve(std::span<const int> assumptions_in, std::int64_t conflict_budget) {
    model.clear();
    if (!ok) return SatResult::Unsat;
    backtrack(0);
    if (propagate() != kNoReason) {
      ok = false;
      return SatResult::Unsat;
    }
    std::vector<Lit> assumptions;
    for (int x : assumptions_in) {
      if (x == 0 || std::abs(x) > static_cast<int>(value.size()))
        throw InvalidArgument("assumption " + std::to_string(x) + " out of range");
      assumptions.push_back(lit_from_dimacs(x));
    }
    if (max_learnts == 0) max_learnts = std::max(5000.0, static_cast<double>(clauses.size()) / 3.0);
    std::int64_t budget = conflict_budget < 0 ? -1 : conflict_budget;
    if (budget == 0) return SatResult::Unknown;
    for (int restart = 0;; ++restart) {
      auto limit = static_cast<std::int64_t>(luby(2.0, restart) * 100.0);
      SatResult r = search(limit, assumptions, budget);
      if (r == SatResult::Sat) {
        backtrack(0);
        return r;
      }
      if (r == SatResult::Unsat) {
        backtrack(0);
        return r;
      }
      if (budget == 0) return SatResult::Unknown;
    }
  }
};

CdclSolver::CdclSolver() : impl_(std::make_unique<Impl>()) {}
CdclSolver::~CdclSolver() = default;
int CdclSolver::new_var() { return impl_->new_var(); }
void CdclSolver::add_clause(std::span<const int> lits) { impl_->add_clause(lits); }
SatResult CdclSolver::solve(std::span<const int> assumptions, std::int64_t conflict_budget) {
  return impl_->solve(assumptions, conflict_budget);
}
bool CdclSolver::model_value(int var) const {
  auto v = static_cast<std::size_t>(var - 1);
  return v < impl_->model.size() && impl_->model[v] != 0;
}
int CdclSolver::num_vars() const { return static_cast<int>(impl_->value.size()); }
std::uint64_t CdclSolver::conflicts() const { return impl_->total_conflicts; }

// ---------------------------------------------------------------------------
// External DIMACS solver

ExternalSolver::ExternalSolver(std::string program) : program_(std::move(program)) {}

int ExternalSolver::new_var() { return ++num_vars_; }

void ExternalSolver::add_clause(std::span<const int> lits) {
  for (int x : lits)
    if (x == 0 || std::abs(x) > num_vars_) throw InvalidArgument("literal " + std::to_string(x) + " out of range");
  clauses_.emplace_back(lits.begin(), lits.end());
}

SatResult ExternalSolver::solve(std::span<const int> assumptions, std::int64_t) {
  model_.clear();
  char tmpl[] = "/tmp/secscan-cnf-XXXXXX";
  int fd = mkstemp(tmpl);
  if (fd < 0) throw Error("IoError", "cannot create temporary CNF file");
  close(fd);
  const std::string path = tmpl;
  {
    std::ofstream out(path);
    out << "p cnf " << num_vars_ << " " << clauses_.size() + assumptions.size() << "\n";
    for (const auto& c : clauses_) {
      for (int x : c) out << x << " ";
      out << "0\n";
    }
    for (int a : assumptions) out << a << " 0\n";
  }

  int pipefd[2];
  if (pipe(pipefd) != 0) throw Error("IoError", "pipe failed");
  pid_t pid = fork();
  if (pid < 0) throw Error("IoError", "fork failed");
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    execlp(program_.c_str(), program_.c_str(), path.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(pipefd[1]);
  std::string output;
  std::array<char, 4096> buf{};
  for (;;) {
    ssize_t got = read(pipefd[0], buf.data(), buf.size());
    if (got <= 0) break;
    output.append(buf.data(), static_cast<std::size_t>(got));
  }
  close(pipefd[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  std::filesystem::remove(path);

  std::istringstream lines(output);
  std::string line;
  SatResult result = SatResult::Unknown;
  model_.assign(static_cast<std::size_t>(num_vars_), 0);
  while (std::getline(lines, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        result = SatResult::Unsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        result = SatResult::Sat;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream vs(line.substr(2));
      int x = 0;
      while (vs >> x)
        if (x > 0 && x <= num_vars_) model_[static_cast<std::size_t>(x - 1)] = 1;
    }
  }
  if (result == SatResult::Unknown && WIFEXITED(status) && WEXITSTATUS(status) == 127)
    throw Error("IoError", "cannot run external solver " + program_);
  if (result != SatResult::Sat) model_.clear();
  return result;
}

bool ExternalSolver::model_value(int var) const {
  auto v = static_cast<std::size_t>(var - 1);
  return v < model_.size() && model_[v] != 0;
}

std::unique_ptr<SatSolver> make_solver() {
  if (const char* path = std::getenv(kExternalSolverEnv); path != nullptr && *path != '\0')
    return std::make_unique<ExternalSolver>(path);
  return std::make_unique<CdclSolver>();
}

}  // namespace secscan
