// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "secscan/error.hpp"
#include "secscan/report.hpp"
#include "support.hpp"

using namespace secscan;

namespace {

ResultRow row(std::string bench, ArchKind a, std::uint64_t seed, std::string attack, double area,
              std::optional<std::size_t> rec = std::nullopt) {
  ResultRow r;
  r.benchmark = std::move(bench);
  r.arch = a;
  r.seed = seed;
  r.attack = std::move(attack);
  r.key_size = 16;
  r.area_overhead_pct = area;
  r.keys_recovered = rec;
  if (rec) r.wrong_bits = 0;
  return r;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string s = ResultRow::csv_header() + "\n";
  for (const auto& r : rows) s += r.csv_row() + "\n";
  return s;
}

}  // namespace

TEST(Rows, CsvRoundTrip) {
  auto a = row("s27", ArchKind::RDfs, 3, "shift-and-leak", 12.5, 14);
  a.coverage_pct = 97.25;
  a.tpnvm_loads = 10;
  auto b = row("c17", ArchKind::KtDfs, 1, "-", 3.0);
  const auto back = parse_rows(to_csv({a, b}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].csv_row(), a.csv_row());
  EXPECT_EQ(back[1].csv_row(), b.csv_row());
  EXPECT_FALSE(back[1].coverage_pct.has_value());
  EXPECT_FALSE(back[1].keys_recovered.has_value());
  EXPECT_EQ(back[0].tpnvm_loads, 10u);
  EXPECT_NE(a.to_json().find("\"coverage_pct\":97.25"), std::string::npos);
  EXPECT_NE(b.to_json().find("\"keys_recovered\":null"), std::string::npos);
}

TEST(Rows, ParseErrors) {
  const std::string h = ResultRow::csv_header() + "\n";
  EXPECT_THROW(parse_rows(""), FormatError);
  EXPECT_THROW(parse_rows("a,b\n"), FormatError);
  EXPECT_THROW(parse_rows(h + "s27,R_DFS,1\n"), FormatError);
  EXPECT_THROW(parse_rows(h + "s27,Q_DFS,1,-,4,1.0,,,,,0\n"), FormatError);
  EXPECT_THROW(parse_rows(h + "s27,R_DFS,x,-,4,1.0,,,,,0\n"), FormatError);
  EXPECT_THROW(parse_rows(h + "s27,R_DFS,1,-,4,abc,,,,,0\n"), FormatError);
  EXPECT_THROW(parse_rows(h + "s27,R_DFS,1,-,4,1.0,,5,0,,0\n"), FormatError);
  EXPECT_EQ(parse_rows(h + "\ns27,R_DFS,1,-,4,1.0,,4,0,,0\n").size(), 1u);
}

TEST(Rows, DedupeKeepsFirst) {
  const auto rows = dedupe_rows({row("a", ArchKind::RDfs, 1, "x", 1.0), row("a", ArchKind::RDfs, 1, "x", 2.0),
                                 row("a", ArchKind::RDfs, 2, "x", 3.0), row("a", ArchKind::MrDfs, 1, "x", 4.0)});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(rows[0].area_overhead_pct, 1.0);
  EXPECT_DOUBLE_EQ(rows[1].area_overhead_pct, 3.0);
}

TEST(Table, SingleRowPassesThrough) {
  auto r = row("s27", ArchKind::MrDfs, 7, "glitch-and-leak", 8.25, 11);
  r.coverage_pct = 90.0;
  const auto t = aggregate({r});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].seeds, 1u);
  EXPECT_DOUBLE_EQ(t[0].area_overhead_pct, 8.25);
  EXPECT_DOUBLE_EQ(*t[0].coverage_pct, 90.0);
  EXPECT_DOUBLE_EQ(*t[0].keys_recovered, 11.0);
  EXPECT_EQ(t[0].best_attack, "glitch-and-leak");
  EXPECT_FALSE(t[0].area_reduction_vs_r_pct.has_value());
}

TEST(Table, MeansBestAttackAndReduction) {
  const std::vector<ResultRow> rows{
      row("b", ArchKind::RDfs, 1, "shift-and-leak", 10.0, 16), row("b", ArchKind::RDfs, 2, "shift-and-leak", 12.0, 14),
      row("b", ArchKind::RDfs, 1, "cone-sat", 10.0, 4),        row("b", ArchKind::RDfs, 2, "cone-sat", 12.0, 6),
      row("b", ArchKind::KtDfs, 1, "shift-and-leak", 8.0, 0),  row("b", ArchKind::KtDfs, 2, "shift-and-leak", 8.8, 0),
      row("b", ArchKind::RDfs, 1, "shift-and-leak", 99.0, 0),  // duplicate, dropped
  };
  const auto t = aggregate(rows);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].arch, ArchKind::RDfs);
  EXPECT_EQ(t[0].seeds, 2u);
  EXPECT_DOUBLE_EQ(t[0].area_overhead_pct, 11.0);
  EXPECT_DOUBLE_EQ(*t[0].keys_recovered, 15.0);
  EXPECT_EQ(t[0].best_attack, "shift-and-leak");
  EXPECT_NEAR(t[1].area_overhead_pct, 8.4, 1e-12);
  // positive means smaller than R
  EXPECT_NEAR(*t[1].area_reduction_vs_r_pct, (11.0 - 8.4) / 11.0 * 100.0, 1e-9);
  const auto csv = table_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "benchmark,arch,seeds,key_size,area_overhead_pct,coverage_pct,keys_recovered,best_attack,tpnvm_loads,"
            "area_reduction_vs_r_pct");
  EXPECT_NE(table_text(t).find("KT_DFS"), std::string::npos);
}

TEST(Config, DefaultsAndErrors) {
  const auto c = parse_config(R"({"benchmark": "x.bench"})");
  EXPECT_EQ(c.benchmarks, std::vector<std::string>{"x.bench"});
  EXPECT_EQ(c.key_size, 128u);
  EXPECT_EQ(c.archs.size(), 3u);
  const auto d = parse_config(
      R"({"benchmarks": ["a","b"], "key_size": 8, "archs": ["KT_DFS"], "seeds": [4,5], "attacks": ["sat"],
          "pattern_count": 3, "flow": "functional", "delay": {"d_not": 12}, "timing": true})");
  EXPECT_EQ(d.benchmarks.size(), 2u);
  EXPECT_EQ(d.archs, std::vector<ArchKind>{ArchKind::KtDfs});
  EXPECT_EQ(d.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(d.flow, Flow::Functional);
  EXPECT_EQ(d.delay.d_not, 12);
  EXPECT_EQ(d.delay.d_and, DelayModel{}.d_and);
  EXPECT_TRUE(d.timing);
  EXPECT_THROW(parse_config("{"), FormatError);
  EXPECT_THROW(parse_config("[]"), FormatError);
  EXPECT_THROW(parse_config(R"({})"), FormatError);
  EXPECT_THROW(parse_config(R"({"benchmark": "x", "key_size": 0})"), FormatError);
  EXPECT_THROW(parse_config(R"({"benchmark": "x", "key_size": "8"})"), FormatError);
  EXPECT_THROW(parse_config(R"({"benchmark": "x", "archs": ["Z"]})"), FormatError);
  EXPECT_THROW(parse_config(R"({"benchmark": "x", "attacks": ["guess"]})"), FormatError);
}

TEST(Campaign, DeterministicAndOrdered) {
  ExperimentConfig cfg;
  cfg.benchmarks = {secscan::testing::fixture("s27.bench")};
  cfg.key_size = 4;
  cfg.strategy = LockStrategy::Rll;
  cfg.archs = {ArchKind::RDfs, ArchKind::MrDfs, ArchKind::KtDfs};
  cfg.seeds = {1, 2};
  cfg.attacks = {"shift-and-leak", "cone-sat"};
  cfg.pattern_count = 8;
  cfg.jobs = 1;
  const auto a = run_campaign(cfg);
  cfg.jobs = 3;
  const auto b = run_campaign(cfg);
  ASSERT_EQ(a.size(), 2u * 3u * 2u);
  EXPECT_EQ(to_csv(a), to_csv(b));
  for (const auto& r : a) {
    EXPECT_EQ(r.benchmark, "s27");
    EXPECT_EQ(r.wall_ms, 0.0);
    ASSERT_TRUE(r.coverage_pct && r.keys_recovered && r.wrong_bits && r.tpnvm_loads);
    EXPECT_EQ(*r.wrong_bits, 0u);
    if (r.arch == ArchKind::KtDfs) {
      EXPECT_EQ(*r.keys_recovered, 0u);
      EXPECT_EQ(*r.tpnvm_loads, 1u);
    }
    if (r.arch == ArchKind::MrDfs) {
      EXPECT_EQ(*r.tpnvm_loads, 8u);
    }
  }
  const auto t = aggregate(a);
  ASSERT_EQ(t.size(), 3u);
  // MR's fixed MSSD cost outweighs four keys, so only KT is compared here
  EXPECT_GT(t[0].area_overhead_pct, t[2].area_overhead_pct);
  EXPECT_GT(t[1].area_overhead_pct, t[2].area_overhead_pct);
  EXPECT_GT(*t[2].area_reduction_vs_r_pct, 0.0);
}

TEST(Campaign, UnknownAttackAndMissingBench) {
  const auto ld = insert_key_gates(read_bench_file(secscan::testing::fixture("s27.bench")), 2, LockStrategy::Rll, 1);
  Oracle o(build_scan_design(ld, ArchKind::RDfs, 1, 1));
  EXPECT_THROW(run_attack("guess", o, DelayModel{}), InvalidArgument);
  ExperimentConfig cfg;
  cfg.benchmarks = {secscan::testing::fixture("nope.bench")};
  EXPECT_THROW(run_campaign(cfg), FormatError);
}
