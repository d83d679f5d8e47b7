// SPDX-License-Identifier: Apache-2.0
//
// Event-driven simulation with inertial gate delays, sized for small control
// circuits such as the MR_DFS shift-disable latch. Times are integer
// picoseconds.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace secscan {

using Ps = std::int64_t;

enum class TimedKind { Not, Buf, And, Nor, Or, Nand };

struct TimedGate {
  TimedKind kind;
  std::vector<std::uint32_t> inputs;
  std::uint32_t output;
  Ps delay;
};

/// Rising-edge flip-flop with asynchronous active-high reset.
struct TimedDff {
  std::uint32_t d, clk, rst, q;
  Ps clk_to_q;
  Ps setup;
};

class TimedCircuit {
 public:
  std::uint32_t add_net(const std::string& name);
  std::uint32_t add_input(const std::string& name);
  /// Net tied to a constant.
  std::uint32_t add_const(const std::string& name, bool value);
  void add_gate(TimedKind kind, std::vector<std::string> inputs, const std::string& output, Ps delay);
  void add_dff(const std::string& d, const std::string& clk, const std::string& rst, const std::string& q, Ps clk_to_q,
               Ps setup);
  void mark_output(const std::string& name);

  std::uint32_t net(const std::string& name) const;  // throws UnknownNet
  const std::string& net_name(std::uint32_t id) const { return names_[id]; }
  std::size_t num_nets() const { return names_.size(); }
  const std::vector<TimedGate>& gates() const { return gates_; }
  const std::vector<TimedDff>& dffs() const { return dffs_; }
  const std::vector<std::uint32_t>& inputs() const { return inputs_; }
  const std::vector<std::uint32_t>& outputs() const { return outputs_; }
  const std::map<std::uint32_t, bool>& constants() const { return consts_; }

 private:
  std::uint32_t get_or_add(const std::string& name);
  std::vector<std::string> names_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
  std::vector<TimedGate> gates_;
  std::vector<TimedDff> dffs_;
  std::vector<std::uint32_t> inputs_, outputs_;
  std::map<std::uint32_t, bool> consts_;
};

bool timed_eval(TimedKind kind, const std::vector<bool>& in);

struct DelayModel {
  Ps d_not = 10;
  Ps d_and = 15;
  Ps d_nor = 15;
  Ps d_clkq = 20;
  Ps t_setup = 5;
  Ps d_du() const { return 10 * d_not; }
};

/// Throws InvalidArgument for non-positive delays or negative setup.
void validate(const DelayModel& dm);

/// Inputs Test, SE, rst; output SD. Internal nets Test_d (ten inverters in
/// series, named du1..du9 in between), Test_not, clk_ff, Q_FF, mask.
TimedCircuit build_mssd(const DelayModel& dm);

using Edges = std::vector<std::pair<Ps, bool>>;
/// Per input name: time-sorted edges. A value at time 0 sets the initial
/// level (default 0).
using Stimulus = std::map<std::string, Edges>;
/// Per net name: value at time 0 followed by every change.
using Waveform = std::map<std::string, Edges>;

struct SimOptions {
  /// Initial flip-flop outputs by q-net name (default 0).
  std::map<std::string, bool> initial_q;
};

/// Throws InvalidArgument (unsorted stimulus, horizon before last edge),
/// UnknownNet.
Waveform simulate(const TimedCircuit& tc, const Stimulus& stim, Ps horizon, const SimOptions& opt = {});

/// Level of a net at time t in a waveform.
bool value_at(const Edges& e, Ps t);
/// Number of rising edges.
std::size_t rising_edges(const Edges& e);

std::string write_vcd(const Waveform& w, const std::string& module = "top");

/// Eight Test pulses of width `w` with SE held high, after a reset pulse.
Stimulus glitch_stimulus(const DelayModel& dm, Ps w, Ps* horizon = nullptr);

struct SweepPoint {
  Ps width;
  bool tripped;          // Q_FF ended at 1
  std::size_t sd_pulses;  // SD rising edges
};
std::vector<SweepPoint> glitch_sweep(const DelayModel& dm, Ps w_lo, Ps w_hi, Ps step = 1);

/// Widest Test pulse that never trips the latch. Throws WindowNotFound when
/// the sweep shows no trip or more than one threshold.
Ps glitch_window(const DelayModel& dm);

}  // namespace secscan
