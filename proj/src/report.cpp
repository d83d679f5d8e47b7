// SPDX-License-Identifier: Apache-2.0
#include "secscan/report.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "secscan/error.hpp"
#include "secscan/netlist.hpp"
#include "secscan/oracle.hpp"

namespace secscan {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return fixed(*v);
  else
    return std::to_string(*v);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = line.find(sep, start);
    out.emplace_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("row " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

std::uint64_t to_u64(const std::string& s, std::size_t line) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw FormatError("row " + std::to_string(line) + ": bad integer '" + s + "'");
  return std::stoull(s);
}

}  // namespace

std::string ResultRow::csv_header() {
  return "benchmark,arch,seed,attack,key_size,area_overhead_pct,coverage_pct,keys_recovered,wrong_bits,tpnvm_loads,"
         "wall_ms";
}

std::string ResultRow::csv_row() const {
  return benchmark + "," + std::string(to_string(arch)) + "," + std::to_string(seed) + "," + attack + "," +
         std::to_string(key_size) + "," + fixed(area_overhead_pct) + "," + opt_str(coverage_pct) + "," +
         opt_str(keys_recovered) + "," + opt_str(wrong_bits) + "," + opt_str(tpnvm_loads) + "," + fixed(wall_ms, 1);
}

std::string ResultRow::to_json() const {
  nlohmann::ordered_json j;
  j["benchmark"] = benchmark;
  j["arch"] = std::string(to_string(arch));
  j["seed"] = seed;
  j["attack"] = attack;
  j["key_size"] = key_size;
  j["area_overhead_pct"] = area_overhead_pct;
  j["coverage_pct"] = coverage_pct ? nlohmann::ordered_json(*coverage_pct) : nlohmann::ordered_json(nullptr);
  j["keys_recovered"] = keys_recovered ? nlohmann::ordered_json(*keys_recovered) : nlohmann::ordered_json(nullptr);
  j["wrong_bits"] = wrong_bits ? nlohmann::ordered_json(*wrong_bits) : nlohmann::ordered_json(nullptr);
  j["tpnvm_loads"] = tpnvm_loads ? nlohmann::ordered_json(*tpnvm_loads) : nlohmann::ordered_json(nullptr);
  j["wall_ms"] = wall_ms;
  return j.dump();
}

std::vector<ResultRow> parse_rows(std::string_view csv) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != ResultRow::csv_header()) throw FormatError("unexpected result header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 11) throw FormatError("row " + std::to_string(lineno) + ": expected 11 fields");
    ResultRow r;
    r.benchmark = f[0];
    try {
      r.arch = parse_arch(f[1]);
    } catch (const Error&) {
      throw FormatError("row " + std::to_string(lineno) + ": unknown architecture '" + f[1] + "'");
    }
    r.seed = to_u64(f[2], lineno);
    r.attack = f[3];
    r.key_size = to_u64(f[4], lineno);
    r.area_overhead_pct = to_double(f[5], lineno);
    if (!f[6].empty()) r.coverage_pct = to_double(f[6], lineno);
    if (!f[7].empty()) r.keys_recovered = to_u64(f[7], lineno);
    if (!f[8].empty()) r.wrong_bits = to_u64(f[8], lineno);
    if (!f[9].empty()) r.tpnvm_loads = to_u64(f[9], lineno);
    r.wall_ms = to_double(f[10], lineno);
    if (r.keys_recovered && *r.keys_recovered > r.key_size)
      throw FormatError("row " + std::to_string(lineno) + ": more keys recovered than key bits");
    rows.push_back(std::move(r));
  }
  if (!header) throw FormatError("missing result header");
  return rows;
}

std::vector<ResultRow> dedupe_rows(const std::vector<ResultRow>& rows) {
  std::set<std::tuple<std::string, ArchKind, std::uint64_t, std::string>> seen;
  std::vector<ResultRow> out;
  for (const auto& r : rows)
    if (seen.insert({r.benchmark, r.arch, r.seed, r.attack}).second) out.push_back(r);
  return out;
}

std::vector<TableRow> aggregate(const std::vector<ResultRow>& in) {
  const auto rows = dedupe_rows(in);
  std::vector<std::string> benches;
  for (const auto& r : rows)
    if (std::find(benches.begin(), benches.end(), r.benchmark) == benches.end()) benches.push_back(r.benchmark);
  std::vector<TableRow> out;
  for (const auto& b : benches) {
    const std::size_t first = out.size();
    for (ArchKind a : {ArchKind::OpenScan, ArchKind::RDfs, ArchKind::MrDfs, ArchKind::KtDfs}) {
      std::map<std::uint64_t, const ResultRow*> per_seed;
      std::map<std::string, std::pair<double, std::size_t>> per_attack;
      std::vector<std::string> attack_order;
      for (const auto& r : rows) {
        if (r.benchmark != b || r.arch != a) continue;
        per_seed.emplace(r.seed, &r);
        if (r.keys_recovered) {
          if (!per_attack.count(r.attack)) attack_order.push_back(r.attack);
          auto& acc = per_attack[r.attack];
          acc.first += static_cast<double>(*r.keys_recovered);
          ++acc.second;
        }
      }
      if (per_seed.empty()) continue;
      TableRow t;
      t.benchmark = b;
      t.arch = a;
      t.seeds = per_seed.size();
      t.key_size = per_seed.begin()->second->key_size;
      double area = 0, cov = 0, loads = 0;
      std::size_t ncov = 0, nloads = 0;
      for (const auto& [seed, r] : per_seed) {
        area += r->area_overhead_pct;
        if (r->coverage_pct) cov += *r->coverage_pct, ++ncov;
        if (r->tpnvm_loads) loads += static_cast<double>(*r->tpnvm_loads), ++nloads;
      }
      t.area_overhead_pct = area / static_cast<double>(per_seed.size());
      if (ncov) t.coverage_pct = cov / static_cast<double>(ncov);
      if (nloads) t.tpnvm_loads = loads / static_cast<double>(nloads);
      for (const auto& name : attack_order) {
        const auto& [sum, n] = per_attack[name];
        const double mean = sum / static_cast<double>(n);
        if (!t.keys_recovered || mean > *t.keys_recovered) {
          t.keys_recovered = mean;
          t.best_attack = name;
        }
      }
      out.push_back(std::move(t));
    }
    const TableRow* r = nullptr;
    for (std::size_t i = first; i < out.size(); ++i)
      if (out[i].arch == ArchKind::RDfs) r = &out[i];
    if (r && r->area_overhead_pct > 0) {
      const double base = r->area_overhead_pct;
      for (std::size_t i = first; i < out.size(); ++i)
        if (out[i].arch != ArchKind::RDfs)
          out[i].area_reduction_vs_r_pct = (base - out[i].area_overhead_pct) / base * 100.0;
    }
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> table_cells(const std::vector<TableRow>& t) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"benchmark", "arch", "seeds", "key_size", "area_overhead_pct", "coverage_pct", "keys_recovered",
                   "best_attack", "tpnvm_loads", "area_reduction_vs_r_pct"});
  for (const auto& r : t)
    cells.push_back({r.benchmark, std::string(to_string(r.arch)), std::to_string(r.seeds), std::to_string(r.key_size),
                     fixed(r.area_overhead_pct, 2), r.coverage_pct ? fixed(*r.coverage_pct, 2) : "",
                     r.keys_recovered ? fixed(*r.keys_recovered, 1) : "", r.best_attack,
                     r.tpnvm_loads ? fixed(*r.tpnvm_loads, 1) : "",
                     r.area_reduction_vs_r_pct ? fixed(*r.area_reduction_vs_r_pct, 2) : ""});
  return cells;
}

}  // namespace

std::string table_csv(const std::vector<TableRow>& t) {
  std::string s;
  for (const auto& row : table_cells(t)) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += "\n";
  }
  return s;
}

std::string table_text(const std::vector<TableRow>& t) {
  const auto cells = table_cells(t);
  std::vector<std::size_t> w(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], row[i].size());
  std::string s;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i] + std::string(w[i] - row[i].size(), ' ');
      if (i + 1 < row.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    s += line + "\n";
  }
  return s;
}

const std::vector<std::string>& attack_names() {
  static const std::vector<std::string> names{"shift-and-leak", "glitch-and-leak", "cone-sat", "sat"};
  return names;
}

AttackReport run_attack(std::string_view name, Oracle& o, const DelayModel& dm) {
  if (name == "shift-and-leak") return shift_and_leak(o);
  if (name == "glitch-and-leak") {
    LeakAttackOptions opt;
    opt.delay_model = dm;
    return glitch_and_leak(o, opt);
  }
  if (name == "cone-sat") return cone_sat_preprocess(o);
  if (name == "sat") return open_scan_sat(o);
  throw InvalidArgument("unknown attack '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  try {
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    if (j.contains("benchmark")) c.benchmarks.push_back(j["benchmark"].get<std::string>());
    if (j.contains("benchmarks"))
      for (const auto& b : j["benchmarks"]) c.benchmarks.push_back(b.get<std::string>());
    if (c.benchmarks.empty()) throw FormatError("config names no benchmark");
    if (j.contains("key_size")) c.key_size = j["key_size"].get<std::size_t>();
    if (c.key_size < 1) throw FormatError("key_size must be at least 1");
    if (j.contains("strategy")) c.strategy = parse_lock_strategy(j["strategy"].get<std::string>());
    if (j.contains("archs")) {
      c.archs.clear();
      for (const auto& a : j["archs"]) c.archs.push_back(parse_arch(a.get<std::string>()));
    }
    if (j.contains("num_chains")) c.num_chains = j["num_chains"].get<std::size_t>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("attacks")) c.attacks = j["attacks"].get<std::vector<std::string>>();
    for (const auto& a : c.attacks)
      if (std::find(attack_names().begin(), attack_names().end(), a) == attack_names().end())
        throw FormatError("unknown attack '" + a + "'");
    if (j.contains("pattern_count")) c.pattern_count = j["pattern_count"].get<std::size_t>();
    if (j.contains("flow")) c.flow = parse_flow(j["flow"].get<std::string>());
    if (j.contains("delay")) {
      const auto& d = j["delay"];
      if (d.contains("d_not")) c.delay.d_not = d["d_not"].get<Ps>();
      if (d.contains("d_and")) c.delay.d_and = d["d_and"].get<Ps>();
      if (d.contains("d_nor")) c.delay.d_nor = d["d_nor"].get<Ps>();
      if (d.contains("d_clkq")) c.delay.d_clkq = d["d_clkq"].get<Ps>();
      if (d.contains("t_setup")) c.delay.t_setup = d["t_setup"].get<Ps>();
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("timing")) c.timing = j["timing"].get<bool>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

namespace {

std::vector<ResultRow> campaign_unit(const ExperimentConfig& cfg, const Netlist& n, const std::string& name,
                                     std::uint64_t seed) {
  std::vector<ResultRow> rows;
  const LockedDesign ld = insert_key_gates(n, cfg.key_size, cfg.strategy, seed);
  for (ArchKind arch : cfg.archs) {
    const ScanDesign sd = build_scan_design(ld, arch, cfg.num_chains, seed);
    ResultRow base;
    base.benchmark = name;
    base.arch = arch;
    base.seed = seed;
    base.key_size = cfg.key_size;
    base.area_overhead_pct = area_overhead(sd);
    if (cfg.pattern_count > 0) {
      const auto pats = random_patterns(cfg.pattern_count, sd.num_rcs(), sd.num_pis(), seed);
      base.coverage_pct = fault_coverage(sd, pats, cfg.flow).percent();
      base.tpnvm_loads = functional_test_flow(sd, pats).cost.tpnvm_loads;
    }
    if (cfg.attacks.empty()) rows.push_back(base);
    for (const auto& attack : cfg.attacks) {
      ResultRow r = base;
      r.attack = attack;
      Oracle o(sd, seed, cfg.delay);
      try {
        const AttackReport rep = run_attack(attack, o, cfg.delay);
        r.keys_recovered = rep.recovered_count();
        r.wrong_bits = rep.wrong_bits(ld.secret_key);
        if (cfg.timing) r.wall_ms = rep.wall_ms;
      } catch (const WindowNotFound&) {
        r.keys_recovered = 0;
        r.wrong_bits = 0;
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_campaign(const ExperimentConfig& cfg) {
  struct Unit {
    std::size_t bench;
    std::uint64_t seed;
    std::vector<ResultRow> rows;
    std::exception_ptr error;
  };
  std::vector<Netlist> nets;
  std::vector<std::string> names;
  std::vector<Unit> units;
  for (const auto& path : cfg.benchmarks) {
    nets.push_back(read_bench_file(path));
    names.push_back(std::filesystem::path(path).stem().string());
    for (std::uint64_t seed : cfg.seeds) units.push_back({nets.size() - 1, seed, {}, nullptr});
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < units.size();) {
      auto& u = units[i];
      try {
        u.rows = campaign_unit(cfg, nets[u.bench], names[u.bench], u.seed);
      } catch (...) {
        u.error = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(units.size(), cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  // results keep config order whatever the scheduling was
  std::vector<ResultRow> rows;
  for (auto& u : units) {
    if (u.error) std::rethrow_exception(u.error);
    for (auto& r : u.rows) rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace secscan
