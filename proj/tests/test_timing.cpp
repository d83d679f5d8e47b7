// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "secscan/error.hpp"
#include "secscan/timing.hpp"

using namespace secscan;

namespace {

// Dense reference: evaluates every net at every picosecond. A gate output
// takes value v at t when its function has been v over all of [t-d, t).
std::vector<std::vector<char>> dense_simulate(const TimedCircuit& tc, const Stimulus& stim, Ps horizon,
                                              const std::map<std::string, bool>& init_q = {}) {
  const std::size_t n = tc.num_nets();
  std::vector<std::vector<char>> v(static_cast<std::size_t>(horizon) + 1, std::vector<char>(n, 0));
  auto in_at = [&](std::uint32_t id, Ps t) {
    auto it = stim.find(tc.net_name(id));
    return it != stim.end() && value_at(it->second, t);
  };
  auto& v0 = v[0];
  for (auto id : tc.inputs()) v0[id] = in_at(id, 0);
  for (const auto& [id, c] : tc.constants()) v0[id] = c;
  for (const auto& d : tc.dffs()) {
    auto it = init_q.find(tc.net_name(d.q));
    v0[d.q] = it != init_q.end() && it->second;
  }
  for (std::size_t k = 0; k <= tc.gates().size(); ++k)
    for (const auto& g : tc.gates()) {
      std::vector<bool> in;
      for (auto i : g.inputs) in.push_back(v0[i]);
      v0[g.output] = timed_eval(g.kind, in);
    }
  for (const auto& d : tc.dffs())
    if (v0[d.rst]) v0[d.q] = 0;

  auto f_at = [&](const TimedGate& g, Ps t) {
    const auto& row = v[static_cast<std::size_t>(std::max<Ps>(t, 0))];
    std::vector<bool> in;
    for (auto i : g.inputs) in.push_back(row[i]);
    return timed_eval(g.kind, in);
  };
  std::vector<std::pair<Ps, bool>> dff_next(tc.dffs().size(), {-1, false});
  for (Ps t = 1; t <= horizon; ++t) {
    auto& row = v[static_cast<std::size_t>(t)];
    row = v[static_cast<std::size_t>(t - 1)];
    for (auto id : tc.inputs()) row[id] = in_at(id, t);
    for (const auto& g : tc.gates()) {
      const bool first = f_at(g, t - g.delay);
      bool constant = true;
      for (Ps s = t - g.delay; s < t && constant; ++s) constant = f_at(g, s) == first;
      if (constant) row[g.output] = first;
    }
    for (std::size_t di = 0; di < tc.dffs().size(); ++di) {
      const auto& d = tc.dffs()[di];
      if (dff_next[di].first == t) row[d.q] = dff_next[di].second;
    }
    // Edges seen at t schedule flip-flop updates.
    const auto& before = v[static_cast<std::size_t>(t - 1)];
    for (std::size_t di = 0; di < tc.dffs().size(); ++di) {
      const auto& d = tc.dffs()[di];
      if (row[d.rst]) {
        if (!before[d.rst]) dff_next[di] = {t + d.clk_to_q, false};
        continue;
      }
      if (row[d.clk] && !before[d.clk]) {
        bool stable = true;
        for (Ps s = t - d.setup; s < t && stable; ++s) stable = v[static_cast<std::size_t>(std::max<Ps>(s, 0))][d.d] == row[d.d];
        if (stable) dff_next[di] = {t + d.clk_to_q, static_cast<bool>(row[d.d])};
      }
    }
  }
  return v;
}

void expect_same(const TimedCircuit& tc, const Waveform& w, const std::vector<std::vector<char>>& dense) {
  for (std::uint32_t id = 0; id < tc.num_nets(); ++id) {
    const auto& e = w.at(tc.net_name(id));
    for (std::size_t t = 0; t < dense.size(); ++t)
      ASSERT_EQ(value_at(e, static_cast<Ps>(t)), dense[t][id] != 0) << tc.net_name(id) << " @" << t;
  }
}

}  // namespace

TEST(Timing, InverterDelay) {
  TimedCircuit tc;
  tc.add_input("a");
  tc.add_gate(TimedKind::Not, {"a"}, "y", 7);
  Waveform w = simulate(tc, {{"a", {{0, false}, {20, true}}}}, 100);
  EXPECT_EQ(w.at("y"), (Edges{{0, true}, {27, false}}));
}

TEST(Timing, InertialFilter) {
  TimedCircuit tc;
  tc.add_input("a");
  tc.add_gate(TimedKind::Buf, {"a"}, "y", 10);
  EXPECT_EQ(simulate(tc, {{"a", {{5, true}, {14, false}}}}, 100).at("y").size(), 1u);
  EXPECT_EQ(simulate(tc, {{"a", {{5, true}, {15, false}}}}, 100).at("y"), (Edges{{0, false}, {15, true}, {25, false}}));
}

TEST(Timing, DelayedCopyOverlap) {
  TimedCircuit tc;
  tc.add_input("a");
  tc.add_gate(TimedKind::Buf, {"a"}, "ad", 40);
  tc.add_gate(TimedKind::And, {"a", "ad"}, "y", 1);
  for (Ps w : {10, 39, 40, 41, 60, 100}) {
    Waveform wave = simulate(tc, {{"a", {{10, true}, {10 + w, false}}}}, 300);
    const auto& y = wave.at("y");
    if (w <= 40) {
      EXPECT_EQ(rising_edges(y), 0u) << w;
    } else {
      ASSERT_EQ(y.size(), 3u) << w;
      EXPECT_EQ(y[2].first - y[1].first, w - 40) << w;
    }
    expect_same(tc, wave, dense_simulate(tc, {{"a", {{10, true}, {10 + w, false}}}}, 300));
  }
}

TEST(Timing, MatchesDenseReferenceOnRandomCircuits) {
  std::mt19937_64 rng(7);
  const TimedKind kinds[] = {TimedKind::Not, TimedKind::Buf, TimedKind::And, TimedKind::Nor, TimedKind::Or,
                             TimedKind::Nand};
  for (int trial = 0; trial < 60; ++trial) {
    TimedCircuit tc;
    std::vector<std::string> nets{"a", "b", "c"};
    for (auto& n : nets) tc.add_input(n);
    for (int g = 0; g < 8; ++g) {
      TimedKind k = kinds[rng() % 6];
      std::vector<std::string> ins{nets[rng() % nets.size()]};
      if (k != TimedKind::Not && k != TimedKind::Buf) ins.push_back(nets[rng() % nets.size()]);
      std::string out = "g" + std::to_string(g);
      tc.add_gate(k, ins, out, 1 + static_cast<Ps>(rng() % 12));
      nets.push_back(out);
    }
    tc.add_dff(nets[3 + rng() % 8], nets[3 + rng() % 8], "c", "q", 1 + static_cast<Ps>(rng() % 6),
               static_cast<Ps>(rng() % 4));
    Stimulus s;
    for (const char* in : {"a", "b", "c"}) {
      Edges e;
      Ps t = 0;
      for (int k = 0; k < 12; ++k) {
        t += 1 + static_cast<Ps>(rng() % 15);
        e.push_back({t, (rng() & 1) != 0});
      }
      s[in] = e;
    }
    Waveform w = simulate(tc, s, 260);
    expect_same(tc, w, dense_simulate(tc, s, 260));
  }
}

TEST(Timing, Deterministic) {
  DelayModel dm;
  TimedCircuit tc = build_mssd(dm);
  Ps h = 0;
  Stimulus s = glitch_stimulus(dm, 50, &h);
  EXPECT_EQ(simulate(tc, s, h), simulate(tc, s, h));
}

TEST(Mssd, ResetHoldsLatchLowAndSdLow) {
  DelayModel dm;
  TimedCircuit tc = build_mssd(dm);
  Stimulus s{{"rst", {{0, true}, {60, false}}}, {"Test", {{0, false}}}, {"SE", {{0, false}}}};
  Waveform w = simulate(tc, s, 500);
  EXPECT_FALSE(value_at(w.at("Q_FF"), 500));
  EXPECT_EQ(rising_edges(w.at("SD")), 0u);
}

TEST(Mssd, LongPulseTripsForever) {
  DelayModel dm;
  TimedCircuit tc = build_mssd(dm);
  Stimulus s{{"rst", {{0, true}, {60, false}}},
             {"SE", {{0, true}}},
             {"Test", {{0, false}, {200, true}, {200 + 10 * dm.d_du(), false}, {2000, true}, {2600, false}}}};
  Waveform w = simulate(tc, s, 4000);
  const auto& q = w.at("Q_FF");
  EXPECT_TRUE(value_at(q, 4000));
  Ps trip = q.back().first;
  for (const auto& [t, v] : w.at("SD"))
    if (t > trip + dm.d_nor + dm.d_and) {
      EXPECT_FALSE(v);
    }
  EXPECT_FALSE(value_at(w.at("SD"), 2300));
}

TEST(Mssd, ShortPulsesPassThroughWithFixedDelay) {
  DelayModel dm;
  TimedCircuit tc = build_mssd(dm);
  const Ps w = dm.d_du() / 2;
  Ps h = 0;
  Stimulus stim = glitch_stimulus(dm, w, &h);
  Waveform wave = simulate(tc, stim, h);
  EXPECT_FALSE(value_at(wave.at("Q_FF"), h));
  const auto& test = wave.at("Test");
  const auto& sd = wave.at("SD");
  ASSERT_EQ(rising_edges(sd), 8u);
  std::vector<Ps> test_rise, sd_rise;
  for (std::size_t i = 1; i < test.size(); ++i)
    if (test[i].second) test_rise.push_back(test[i].first);
  for (std::size_t i = 1; i < sd.size(); ++i)
    if (sd[i].second) sd_rise.push_back(sd[i].first);
  ASSERT_EQ(test_rise.size(), sd_rise.size());
  for (std::size_t i = 0; i < sd_rise.size(); ++i)
    EXPECT_EQ(sd_rise[i] - test_rise[i], dm.d_not + dm.d_nor + dm.d_and);
}

TEST(Mssd, WindowBracketsAndScales) {
  for (DelayModel dm : {DelayModel{}, DelayModel{7, 11, 9, 13, 3}, DelayModel{20, 30, 25, 40, 8}}) {
    const Ps w = glitch_window(dm);
    EXPECT_GE(w, dm.d_du() - dm.t_setup - 1);
    EXPECT_LT(w, dm.d_du() + dm.d_and);
    auto pts = glitch_sweep(dm, w + 2 * dm.d_and, w + 2 * dm.d_and);
    EXPECT_TRUE(pts[0].tripped);
    // Monotone: one threshold.
    auto sweep = glitch_sweep(dm, 1, 3 * dm.d_du());
    std::size_t switches = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i) switches += sweep[i].tripped != sweep[i - 1].tripped;
    EXPECT_EQ(switches, 1u);
  }
  DelayModel a{10, 15, 15, 20, 5}, b{40, 15, 15, 20, 5};
  EXPECT_EQ(glitch_window(b) - glitch_window(a), 10 * (b.d_not - a.d_not));
}

TEST(Mssd, MssdOnDenseReference) {
  DelayModel dm{3, 4, 4, 5, 2};
  TimedCircuit tc = build_mssd(dm);
  for (Ps w : {5, 29, 33, 34, 40}) {
    Ps h = 0;
    Stimulus s = glitch_stimulus(dm, w, &h);
    expect_same(tc, simulate(tc, s, h), dense_simulate(tc, s, h));
  }
}

TEST(Timing, ErrorsAndVcd) {
  TimedCircuit tc;
  tc.add_input("a");
  tc.add_gate(TimedKind::Not, {"a"}, "y", 3);
  EXPECT_THROW(simulate(tc, {{"a", {{5, true}, {5, false}}}}, 10), InvalidArgument);
  EXPECT_THROW(simulate(tc, {{"a", {{20, true}}}}, 10), InvalidArgument);
  EXPECT_THROW(simulate(tc, {{"zz", {{1, true}}}}, 10), UnknownNet);
  EXPECT_THROW(tc.add_gate(TimedKind::Not, {"a"}, "z", 0), InvalidArgument);
  EXPECT_THROW(glitch_window(DelayModel{0, 1, 1, 1, 1}), InvalidArgument);
  std::string vcd = write_vcd(simulate(tc, {{"a", {{2, true}}}}, 10));
  EXPECT_NE(vcd.find("$var wire 1 ! a $end"), std::string::npos);
  EXPECT_NE(vcd.find("#5\n0\""), std::string::npos);
}
