// SPDX-License-Identifier: Apache-2.0
//
// secscan: lock, stitch, attack, test, report, glitch-sweep, campaign.
// Exit codes: 0 ok, 1 usage, 2 bad input data, 3 internal failure.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "secscan/error.hpp"
#include "secscan/report.hpp"

namespace fs = std::filesystem;
using namespace secscan;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
}

struct DesignArgs {
  std::string bench;
  std::string key;  // sidecar of an already locked netlist
  std::size_t keys = 0;
  std::string strategy = "SLL_LIKE";
  std::uint64_t seed = 1;

  void add(CLI::App* c) {
    c->add_option("--bench", bench, "BENCH netlist")->required();
    c->add_option("--key", key, "key sidecar JSON from `lock`; otherwise --bench is locked here");
    c->add_option("--keys", keys, "key bits to insert when no --key is given");
    c->add_option("--strategy", strategy, "RLL or SLL_LIKE");
    c->add_option("--seed", seed, "seed for locking, stitching and the oracle");
  }

  std::string name() const {
    std::string s = fs::path(bench).stem().string();
    const std::string suffix = ".locked";
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0)
      s.resize(s.size() - suffix.size());
    return s;
  }

  // a `.locked` suffix from `lock` output is not part of the design name
  Netlist netlist() const { return parse_bench(read_file(bench), name()); }

  LockedDesign load() const {
    Netlist n = netlist();
    if (!key.empty()) return load_locked(std::move(n), read_file(key));
    return insert_key_gates(n, keys, parse_lock_strategy(strategy), seed);
  }
};

struct ScanArgs {
  std::string arch = "R_DFS";
  std::size_t chains = 1;
  void add(CLI::App* c) {
    c->add_option("--arch", arch, "OPEN_SCAN, R_DFS, MR_DFS or KT_DFS");
    c->add_option("--chains", chains, "number of scan chains");
  }
};

struct DelayArgs {
  DelayModel dm;
  void add(CLI::App* c) {
    c->add_option("--delay-not", dm.d_not, "inverter delay, ps");
    c->add_option("--delay-and", dm.d_and, "AND delay, ps");
    c->add_option("--delay-nor", dm.d_nor, "NOR delay, ps");
    c->add_option("--delay-clkq", dm.d_clkq, "flip-flop clock-to-q, ps");
    c->add_option("--delay-setup", dm.t_setup, "flip-flop setup time, ps");
  }
  const DelayModel& get() const {
    validate(dm);
    return dm;
  }
};

std::string format_rows(const std::vector<ResultRow>& rows, const std::string& format) {
  std::string s;
  if (format == "json") {
    s = "[";
    for (std::size_t i = 0; i < rows.size(); ++i) s += (i ? ",\n " : "") + rows[i].to_json();
    return s + "]\n";
  }
  s = ResultRow::csv_header() + "\n";
  for (const auto& r : rows) s += r.csv_row() + "\n";
  return s;
}

void emit_rows(const std::vector<ResultRow>& rows, const std::string& format, const std::string& out,
               const std::string& file) {
  const std::string text = format_rows(rows, format);
  std::cout << text;
  if (!out.empty()) write_file(fs::path(out) / (file + (format == "json" ? ".json" : ".csv")), text);
}

int exit_code_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == "InvalidArgument" || k == "InvalidPins" || k == "UnsupportedForArch") return 1;
  if (k == "BlockedScanOut" || k == "MissingAssignment") return 3;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure scan locking, attack and test experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "csv";
  std::string out;
  app.add_option("--format", format, "result format")->check(CLI::IsMember({"csv", "json"}));

  auto* lock = app.add_subcommand("lock", "insert key gates, write locked BENCH and key sidecar");
  DesignArgs lock_d;
  lock->add_option("--bench", lock_d.bench, "BENCH netlist")->required();
  lock->add_option("--keys", lock_d.keys, "key bits")->required();
  lock->add_option("--strategy", lock_d.strategy, "RLL or SLL_LIKE");
  lock->add_option("--seed", lock_d.seed, "seed");
  lock->add_option("--out", out, "output directory")->required();

  auto* stitch = app.add_subcommand("stitch", "build a scan design, print its layout and area");
  DesignArgs stitch_d;
  ScanArgs stitch_s;
  stitch_d.add(stitch);
  stitch_s.add(stitch);
  stitch->add_option("--out", out, "directory for the layout JSON");

  auto* attack = app.add_subcommand("attack", "run attacks through the oracle");
  DesignArgs attack_d;
  ScanArgs attack_s;
  DelayArgs attack_t;
  std::vector<std::string> attack_names_arg{"shift-and-leak"};
  bool timing = false;
  attack_d.add(attack);
  attack_s.add(attack);
  attack_t.add(attack);
  attack->add_option("--attack", attack_names_arg, "attack name(s) or `all`");
  attack->add_option("--out", out, "directory for attack.csv/json");
  attack->add_flag("--timing", timing, "record wall-clock time (outputs are no longer reproducible)");

  auto* test = app.add_subcommand("test", "fault coverage and test cost of a pattern set");
  DesignArgs test_d;
  ScanArgs test_s;
  std::string patterns = "32";
  std::string flow = "structural";
  test_d.add(test);
  test_s.add(test);
  test->add_option("--patterns", patterns, "random pattern count or a pattern file");
  test->add_option("--flow", flow, "structural or functional coverage flow");
  test->add_option("--out", out, "directory for test.csv/json and coverage.csv");

  auto* report = app.add_subcommand("report", "aggregate result CSVs into a table");
  std::vector<std::string> inputs;
  report->add_option("inputs", inputs, "result CSV files")->required();
  report->add_option("--out", out, "directory for table.csv and table.txt");

  auto* sweep = app.add_subcommand("glitch-sweep", "sweep Test pulse widths through the timed latch");
  DelayArgs sweep_t;
  Ps lo = 1, hi = 0, step = 1;
  std::string vcd;
  Ps vcd_width = 0;
  sweep_t.add(sweep);
  sweep->add_option("--lo", lo, "first width, ps");
  sweep->add_option("--hi", hi, "last width, ps (default 2*d_DU)");
  sweep->add_option("--step", step, "width step, ps");
  sweep->add_option("--vcd", vcd, "write a waveform for --vcd-width to this file");
  sweep->add_option("--vcd-width", vcd_width, "pulse width for the waveform (default: widest untripped)");

  auto* campaign = app.add_subcommand("campaign", "run a JSON-configured campaign");
  std::string config;
  std::size_t jobs = 0;
  campaign->add_option("--config", config, "config JSON")->required();
  campaign->add_option("--out", out, "output directory (overrides the config)");
  campaign->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*lock) {
      const Netlist n = lock_d.netlist();
      const LockedDesign ld = insert_key_gates(n, lock_d.keys, parse_lock_strategy(lock_d.strategy), lock_d.seed);
      const std::string name = lock_d.name();
      write_file(fs::path(out) / (name + ".locked.bench"), write_bench(ld.netlist));
      write_file(fs::path(out) / (name + ".key.json"), sidecar_json(ld));
      std::cout << name << ": " << ld.key_size() << " key gates (" << to_string(ld.strategy) << ", seed "
                << lock_d.seed << ")\n";
      for (const auto& p : ld.placements)
        std::cout << "  " << key_input_name(p.key_index) << " " << to_string(p.kind) << " " << p.net << "\n";
    } else if (*stitch) {
      const LockedDesign ld = stitch_d.load();
      const ScanDesign sd = build_scan_design(ld, parse_arch(stitch_s.arch), stitch_s.chains, stitch_d.seed);
      const std::string layout = scan_design_json(sd);
      if (!out.empty())
        write_file(fs::path(out) / (stitch_d.name() + "." + std::string(to_string(sd.arch)) + ".scan.json"), layout);
      else
        std::cout << layout << "\n";
      const AreaBreakdown a = area_breakdown(sd);
      std::cerr << to_string(sd.arch) << ": " << sd.num_chains() << " chain(s), longest " << sd.max_chain_length()
                << ", " << sd.num_rcs() << " RCs, " << sd.key_size() << " key cells, overhead " << a.overhead_pct
                << "%\n";
    } else if (*attack) {
      std::vector<std::string> names = attack_names_arg;
      if (names.size() == 1 && names[0] == "all") names = attack_names();
      for (const auto& nm : names)
        if (std::find(attack_names().begin(), attack_names().end(), nm) == attack_names().end())
          throw UsageError("unknown attack '" + nm + "'");
      const DelayModel& dm = attack_t.get();
      const LockedDesign ld = attack_d.load();
      const ScanDesign sd = build_scan_design(ld, parse_arch(attack_s.arch), attack_s.chains, attack_d.seed);
      std::vector<ResultRow> rows;
      for (const auto& nm : names) {
        ResultRow r;
        r.benchmark = attack_d.name();
        r.arch = sd.arch;
        r.seed = attack_d.seed;
        r.attack = nm;
        r.key_size = sd.key_size();
        r.area_overhead_pct = area_overhead(sd);
        Oracle o(sd, attack_d.seed, dm);
        const AttackReport rep = run_attack(nm, o, dm);
        r.keys_recovered = rep.recovered_count();
        r.wrong_bits = rep.wrong_bits(ld.secret_key);
        if (timing) r.wall_ms = rep.wall_ms;
        rows.push_back(std::move(r));
      }
      emit_rows(rows, format, out, "attack");
    } else if (*test) {
      const Flow f = parse_flow(flow);
      const LockedDesign ld = test_d.load();
      const ScanDesign sd = build_scan_design(ld, parse_arch(test_s.arch), test_s.chains, test_d.seed);
      std::vector<Pattern> pats;
      if (!patterns.empty() && std::all_of(patterns.begin(), patterns.end(), [](char c) { return c >= '0' && c <= '9'; }))
        pats = random_patterns(std::stoull(patterns), sd.num_rcs(), sd.num_pis(), test_d.seed);
      else
        pats = parse_patterns(read_file(patterns), sd.num_rcs(), sd.num_pis());
      const CoverageResult cov = fault_coverage(sd, pats, f);
      const FlowResult fr = f == Flow::Structural ? structural_test_flow(sd, pats) : functional_test_flow(sd, pats);
      const FlowResult fn = functional_test_flow(sd, pats);
      ResultRow r;
      r.benchmark = test_d.name();
      r.arch = sd.arch;
      r.seed = test_d.seed;
      r.key_size = sd.key_size();
      r.area_overhead_pct = area_overhead(sd);
      r.coverage_pct = cov.percent();
      r.tpnvm_loads = fn.cost.tpnvm_loads;
      emit_rows({r}, format, out, "test");
      std::cerr << pats.size() << " patterns, " << cov.detected_count() << "/" << cov.faults.size()
                << " faults detected; " << to_string(f) << " cycles " << fr.cost.total_cycles() << " (shift "
                << fr.cost.shift_cycles << ", capture " << fr.cost.capture_cycles << ", key load "
                << fr.cost.keyload_cycles << ")\n";
      if (!out.empty()) write_file(fs::path(out) / "coverage.csv", cov.csv(sd.locked.netlist));
    } else if (*report) {
      std::vector<ResultRow> rows;
      for (const auto& in : inputs) {
        auto part = parse_rows(read_file(in));
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const auto t = aggregate(rows);
      std::cout << table_text(t);
      if (!out.empty()) {
        write_file(fs::path(out) / "table.csv", table_csv(t));
        write_file(fs::path(out) / "table.txt", table_text(t));
      }
    } else if (*sweep) {
      const DelayModel& dm = sweep_t.get();
      if (hi == 0) hi = 2 * dm.d_du();
      if (step < 1 || lo < 1 || hi < lo) throw UsageError("need 1 <= lo <= hi and step >= 1");
      const auto pts = glitch_sweep(dm, lo, hi, step);
      std::size_t thresholds = 0;
      Ps threshold = 0;
      for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].tripped != pts[i - 1].tripped) {
          ++thresholds;
          threshold = pts[i].width;
        }
      if (format == "json") {
        nlohmann::ordered_json j;
        j["thresholds"] = thresholds;
        j["threshold_ps"] = thresholds == 1 ? nlohmann::ordered_json(threshold) : nlohmann::ordered_json(nullptr);
        auto& arr = j["points"] = nlohmann::ordered_json::array();
        for (const auto& p : pts) arr.push_back({{"width", p.width}, {"tripped", p.tripped}, {"sd_pulses", p.sd_pulses}});
        std::cout << j.dump(1) << "\n";
      } else {
        std::cout << "width_ps,tripped,sd_pulses\n";
        for (const auto& p : pts) std::cout << p.width << "," << p.tripped << "," << p.sd_pulses << "\n";
        std::cerr << thresholds << " threshold(s)";
        if (thresholds == 1) std::cerr << ", first tripping width " << threshold << " ps";
        std::cerr << "\n";
      }
      if (!vcd.empty()) {
        const Ps w = vcd_width > 0 ? vcd_width : glitch_window(dm);
        Ps horizon = 0;
        const Stimulus stim = glitch_stimulus(dm, w, &horizon);
        write_file(vcd, write_vcd(simulate(build_mssd(dm), stim, horizon), "mssd"));
      }
    } else if (*campaign) {
      ExperimentConfig cfg = parse_config(read_file(config));
      if (!out.empty()) cfg.output_dir = out;
      if (jobs) cfg.jobs = jobs;
      const auto rows = run_campaign(cfg);
      const auto t = aggregate(rows);
      write_file(fs::path(cfg.output_dir) / (format == "json" ? "results.json" : "results.csv"),
                 format_rows(rows, format));
      write_file(fs::path(cfg.output_dir) / "table.csv", table_csv(t));
      write_file(fs::path(cfg.output_dir) / "table.txt", table_text(t));
      std::cout << table_text(t);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
