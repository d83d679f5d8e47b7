// SPDX-License-Identifier: Apache-2.0
//
// Result rows, aggregated tables and lock -> stitch -> attack -> test
// campaigns driven by a JSON config.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secscan/attacks.hpp"
#include "secscan/dft.hpp"
#include "secscan/locking.hpp"
#include "secscan/scan.hpp"
#include "secscan/timing.hpp"

namespace secscan {

struct ResultRow {
  std::string benchmark;
  ArchKind arch = ArchKind::OpenScan;
  std::uint64_t seed = 0;
  std::string attack = "-";
  std::size_t key_size = 0;
  double area_overhead_pct = 0;
  std::optional<double> coverage_pct;
  std::optional<std::size_t> keys_recovered;
  std::optional<std::size_t> wrong_bits;
  std::optional<std::uint64_t> tpnvm_loads;
  double wall_ms = 0;

  static std::string csv_header();
  std::string csv_row() const;
  std::string to_json() const;
};

/// Parses rows written by csv_row (header line required); throws FormatError.
std::vector<ResultRow> parse_rows(std::string_view csv);

/// Drops repeated (benchmark, arch, seed, attack) rows, keeping the first.
std::vector<ResultRow> dedupe_rows(const std::vector<ResultRow>& rows);

struct TableRow {
  std::string benchmark;
  ArchKind arch;
  std::size_t seeds = 0;
  std::size_t key_size = 0;
  double area_overhead_pct = 0;            // mean over seeds
  std::optional<double> coverage_pct;      // mean over rows that have it
  std::optional<double> keys_recovered;    // best attack, mean over its seeds
  std::string best_attack;
  std::optional<double> tpnvm_loads;       // mean
  std::optional<double> area_reduction_vs_r_pct;  // against the R_DFS row of the benchmark
};

/// One row per benchmark and architecture, benchmarks in first-seen order.
std::vector<TableRow> aggregate(const std::vector<ResultRow>& rows);
std::string table_csv(const std::vector<TableRow>& t);
std::string table_text(const std::vector<TableRow>& t);

struct ExperimentConfig {
  std::vector<std::string> benchmarks;  // BENCH paths
  std::size_t key_size = 128;
  LockStrategy strategy = LockStrategy::SllLike;
  std::vector<ArchKind> archs{ArchKind::RDfs, ArchKind::MrDfs, ArchKind::KtDfs};
  std::size_t num_chains = 1;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> attacks{"shift-and-leak", "glitch-and-leak"};
  std::size_t pattern_count = 0;  // 0 skips coverage and cost
  Flow flow = Flow::Structural;
  DelayModel delay;
  std::string output_dir = "out";
  bool timing = false;  // wall_ms stays 0 otherwise, for byte-identical outputs
  std::size_t jobs = 0;  // worker threads, 0 = hardware concurrency
};

/// Known attack names: shift-and-leak, glitch-and-leak, cone-sat, sat.
const std::vector<std::string>& attack_names();
/// Throws InvalidArgument for unknown names.
AttackReport run_attack(std::string_view name, Oracle& o, const DelayModel& dm);

/// Throws FormatError on a malformed document or key_size 0.
ExperimentConfig parse_config(std::string_view json);

/// Rows for every benchmark x seed x arch x attack, in that order. Each
/// benchmark x seed unit runs on a worker thread.
std::vector<ResultRow> run_campaign(const ExperimentConfig& cfg);

}  // namespace secscan
