// SPDX-License-Identifier: Apache-2.0
#include "secscan/timing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

#include "secscan/error.hpp"

namespace secscan {

std::uint32_t TimedCircuit::get_or_add(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::uint32_t TimedCircuit::add_net(const std::string& name) { return get_or_add(name); }

std::uint32_t TimedCircuit::add_input(const std::string& name) {
  const auto id = get_or_add(name);
  inputs_.push_back(id);
  return id;
}

std::uint32_t TimedCircuit::add_const(const std::string& name, bool value) {
  const auto id = get_or_add(name);
  consts_[id] = value;
  return id;
}

void TimedCircuit::add_gate(TimedKind kind, std::vector<std::string> inputs, const std::string& output, Ps delay) {
  if (delay <= 0) throw InvalidArgument("gate delay must be positive");
  const bool unary = kind == TimedKind::Not || kind == TimedKind::Buf;
  if (inputs.empty() || (unary && inputs.size() != 1)) throw ArityError("bad input count for timed gate " + output);
  TimedGate g{kind, {}, get_or_add(output), delay};
  for (const auto& in : inputs) g.inputs.push_back(get_or_add(in));
  gates_.push_back(std::move(g));
}

void TimedCircuit::add_dff(const std::string& d, const std::string& clk, const std::string& rst,
                           const std::string& q, Ps clk_to_q, Ps setup) {
  if (clk_to_q <= 0 || setup < 0) throw InvalidArgument("bad flip-flop timing");
  dffs_.push_back({get_or_add(d), get_or_add(clk), get_or_add(rst), get_or_add(q), clk_to_q, setup});
}

void TimedCircuit::mark_output(const std::string& name) { outputs_.push_back(get_or_add(name)); }

std::uint32_t TimedCircuit::net(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownNet("no timed net '" + name + "'");
  return it->second;
}

bool timed_eval(TimedKind kind, const std::vector<bool>& in) {
  switch (kind) {
    case TimedKind::Not: return !in[0];
    case TimedKind::Buf: return in[0];
    case TimedKind::And: return std::all_of(in.begin(), in.end(), [](bool b) { return b; });
    case TimedKind::Nand: return !std::all_of(in.begin(), in.end(), [](bool b) { return b; });
    case TimedKind::Or: return std::any_of(in.begin(), in.end(), [](bool b) { return b; });
    case TimedKind::Nor: return !std::any_of(in.begin(), in.end(), [](bool b) { return b; });
  }
  return false;
}

void validate(const DelayModel& dm) {
  if (dm.d_not <= 0 || dm.d_and <= 0 || dm.d_nor <= 0 || dm.d_clkq <= 0 || dm.t_setup < 0)
    throw InvalidArgument("delays must be positive and setup non-negative");
}

TimedCircuit build_mssd(const DelayModel& dm) {
  validate(dm);
  TimedCircuit tc;
  tc.add_input("Test");
  tc.add_input("SE");
  tc.add_input("rst");
  tc.add_const("one", true);
  std::string prev = "Test";
  for (int i = 1; i <= 10; ++i) {
    std::string out = i == 10 ? "Test_d" : "du" + std::to_string(i);
    tc.add_gate(TimedKind::Not, {prev}, out, dm.d_not);
    prev = out;
  }
  tc.add_gate(TimedKind::And, {"Test", "Test_d"}, "clk_ff", dm.d_and);
  tc.add_dff("one", "clk_ff", "rst", "Q_FF", dm.d_clkq, dm.t_setup);
  tc.add_gate(TimedKind::Not, {"Test"}, "Test_not", dm.d_not);
  tc.add_gate(TimedKind::Nor, {"Q_FF", "Test_not"}, "mask", dm.d_nor);
  tc.add_gate(TimedKind::And, {"SE", "mask"}, "SD", dm.d_and);
  tc.mark_output("SD");
  return tc;
}

bool value_at(const Edges& e, Ps t) {
  bool v = false;
  for (const auto& [time, val] : e) {
    if (time > t) break;
    v = val;
  }
  return v;
}

std::size_t rising_edges(const Edges& e) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i].second && !e[i - 1].second) ++n;
  return n;
}

namespace {

struct Event {
  Ps t;
  std::uint64_t seq;
  std::uint32_t net;
  bool value;
  std::int64_t owner;  // -1 input, gate index, or -(2 + dff index)
  std::uint64_t token;
  bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct Pending {
  bool active = false;
  bool value = false;
  std::uint64_t token = 0;
};

}  // namespace

Waveform simulate(const TimedCircuit& tc, const Stimulus& stim, Ps horizon, const SimOptions& opt) {
  const std::size_t n = tc.num_nets();
  std::vector<char> val(n, 0);
  std::vector<Ps> last_change(n, std::numeric_limits<Ps>::min() / 2);
  std::priority_queue<Event, std::vector<Event>, std::greater<>> q;
  std::uint64_t seq = 0;

  std::vector<char> is_input(n, 0);
  for (auto id : tc.inputs()) is_input[id] = 1;
  for (const auto& [name, edges] : stim) {
    const auto id = tc.net(name);
    if (!is_input[id]) throw InvalidArgument("'" + name + "' is not a timed-circuit input");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].first < 0 || (i > 0 && edges[i].first <= edges[i - 1].first))
        throw InvalidArgument("stimulus for '" + name + "' is not strictly increasing");
      if (edges[i].first > horizon) throw InvalidArgument("horizon precedes the last stimulus edge");
      if (edges[i].first == 0)
        val[id] = edges[i].second;
      else
        q.push({edges[i].first, seq++, id, edges[i].second, -1, 0});
    }
  }
  for (const auto& [id, v] : tc.constants()) val[id] = v;
  for (const auto& d : tc.dffs()) {
    auto it = opt.initial_q.find(tc.net_name(d.q));
    val[d.q] = it != opt.initial_q.end() && it->second;
  }
  for (const auto& [name, v] : opt.initial_q) (void)tc.net(name);

  // Readers of each net.
  std::vector<std::vector<std::uint32_t>> gate_readers(n), dff_readers(n);
  for (std::uint32_t g = 0; g < tc.gates().size(); ++g)
    for (auto in : tc.gates()[g].inputs) gate_readers[in].push_back(g);
  for (std::uint32_t d = 0; d < tc.dffs().size(); ++d) {
    dff_readers[tc.dffs()[d].clk].push_back(d);
    dff_readers[tc.dffs()[d].rst].push_back(d);
  }
  auto eval = [&](const TimedGate& g) {
    std::vector<bool> in;
    for (auto i : g.inputs) in.push_back(val[i]);
    return timed_eval(g.kind, in);
  };

  // Settle the combinational logic at t = 0.
  for (std::size_t iter = 0;; ++iter) {
    if (iter > tc.gates().size() + 1) throw InvalidArgument("timed circuit does not settle");
    bool changed = false;
    for (const auto& g : tc.gates()) {
      const bool v = eval(g);
      if (val[g.output] != v) {
        val[g.output] = v;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (std::uint32_t d = 0; d < tc.dffs().size(); ++d)
    if (val[tc.dffs()[d].rst]) val[tc.dffs()[d].q] = 0;

  Waveform wave;
  for (std::uint32_t id = 0; id < n; ++id) wave[tc.net_name(id)].push_back({0, val[id] != 0});

  std::vector<Pending> gate_pending(tc.gates().size()), dff_pending(tc.dffs().size());
  std::uint64_t next_token = 1;
  std::vector<char> prev(n);

  while (!q.empty() && q.top().t <= horizon) {
    const Ps t = q.top().t;
    std::vector<std::uint32_t> changed;
    while (!q.empty() && q.top().t == t) {
      Event e = q.top();
      q.pop();
      if (e.owner >= 0) {
        auto& p = gate_pending[static_cast<std::size_t>(e.owner)];
        if (!p.active || p.token != e.token) continue;
        p.active = false;
      } else if (e.owner <= -2) {
        auto& p = dff_pending[static_cast<std::size_t>(-e.owner - 2)];
        if (!p.active || p.token != e.token) continue;
        p.active = false;
      }
      if (val[e.net] == e.value) continue;
      prev[e.net] = val[e.net];
      val[e.net] = e.value;
      last_change[e.net] = t;
      wave[tc.net_name(e.net)].push_back({t, e.value});
      changed.push_back(e.net);
    }
    std::vector<std::uint32_t> gates, dffs;
    for (auto id : changed) {
      gates.insert(gates.end(), gate_readers[id].begin(), gate_readers[id].end());
      dffs.insert(dffs.end(), dff_readers[id].begin(), dff_readers[id].end());
    }
    std::sort(gates.begin(), gates.end());
    gates.erase(std::unique(gates.begin(), gates.end()), gates.end());
    std::sort(dffs.begin(), dffs.end());
    dffs.erase(std::unique(dffs.begin(), dffs.end()), dffs.end());

    for (auto gi : gates) {
      const TimedGate& g = tc.gates()[gi];
      const bool f = eval(g);
      Pending& p = gate_pending[gi];
      if (p.active && p.value == f) continue;
      p.active = false;  // inertial: a newer evaluation cancels the pending change
      if (f != static_cast<bool>(val[g.output])) {
        p = {true, f, next_token++};
        q.push({t + g.delay, seq++, g.output, f, gi, p.token});
      }
    }
    auto just_changed = [&](std::uint32_t id) { return last_change[id] == t; };
    for (auto di : dffs) {
      const TimedDff& d = tc.dffs()[di];
      Pending& p = dff_pending[di];
      if (val[d.rst]) {
        if (just_changed(d.rst)) {
          p = {true, false, next_token++};
          q.push({t + d.clk_to_q, seq++, d.q, false, -2 - static_cast<std::int64_t>(di), p.token});
        }
        continue;
      }
      if (!(just_changed(d.clk) && val[d.clk] && !prev[d.clk])) continue;
      // Setup violation keeps the old value.
      if (last_change[d.d] > t - d.setup) continue;
      const bool v = val[d.d];
      if (v == static_cast<bool>(val[d.q]) && !p.active) continue;
      p = {true, v, next_token++};
      q.push({t + d.clk_to_q, seq++, d.q, v, -2 - static_cast<std::int64_t>(di), p.token});
    }
  }
  return wave;
}

std::string write_vcd(const Waveform& w, const std::string& module) {
  std::ostringstream os;
  os << "$timescale 1ps $end\n$scope module " << module << " $end\n";
  std::map<std::string, std::string> code;
  int i = 0;
  for (const auto& [name, edges] : w) {
    std::string c;
    int k = i++;
    do {
      c += static_cast<char>('!' + k % 94);
      k /= 94;
    } while (k > 0);
    code[name] = c;
    os << "$var wire 1 " << c << " " << name << " $end\n";
  }
  os << "$upscope $end\n$enddefinitions $end\n";
  std::map<Ps, std::vector<std::pair<std::string, bool>>> by_time;
  for (const auto& [name, edges] : w)
    for (const auto& [t, v] : edges) by_time[t].push_back({code[name], v});
  for (const auto& [t, changes] : by_time) {
    os << "#" << t << "\n";
    for (const auto& [c, v] : changes) os << (v ? '1' : '0') << c << "\n";
  }
  return os.str();
}

Stimulus glitch_stimulus(const DelayModel& dm, Ps w, Ps* horizon) {
  if (w <= 0) throw InvalidArgument("pulse width must be positive");
  const Ps settle = dm.d_du() + 2 * dm.d_and + 2 * dm.d_not + dm.d_nor + dm.d_clkq + 50;
  const Ps rst_end = 2 * dm.d_clkq + 10;
  Stimulus s;
  s["rst"] = {{0, true}, {rst_end, false}};
  s["SE"] = {{0, true}};
  Edges test{{0, false}};
  Ps t = rst_end + settle;
  for (int k = 0; k < 8; ++k) {
    test.push_back({t, true});
    test.push_back({t + w, false});
    t += w + settle;
  }
  s["Test"] = test;
  if (horizon) *horizon = t;
  return s;
}

std::vector<SweepPoint> glitch_sweep(const DelayModel& dm, Ps w_lo, Ps w_hi, Ps step) {
  if (w_lo <= 0 || w_hi < w_lo || step <= 0) throw InvalidArgument("bad sweep range");
  const TimedCircuit tc = build_mssd(dm);
  std::vector<SweepPoint> out;
  for (Ps w = w_lo; w <= w_hi; w += step) {
    Ps horizon = 0;
    Stimulus s = glitch_stimulus(dm, w, &horizon);
    Waveform wave = simulate(tc, s, horizon);
    out.push_back({w, value_at(wave.at("Q_FF"), horizon), rising_edges(wave.at("SD"))});
  }
  return out;
}

Ps glitch_window(const DelayModel& dm) {
  validate(dm);
  const auto pts = glitch_sweep(dm, 1, 4 * (dm.d_du() + dm.d_and + dm.d_clkq));
  std::size_t switches = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].tripped != pts[i - 1].tripped) ++switches;
  if (pts.front().tripped || !pts.back().tripped || switches != 1)
    throw WindowNotFound("no single trip threshold in the pulse-width sweep");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].tripped) return pts[i - 1].width;
  throw WindowNotFound("unreachable");
}

}  // namespace secscan
