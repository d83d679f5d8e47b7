// SPDX-License-Identifier: Apache-2.0
#include "secscan/oracle.hpp"

#include <json.hpp>

#include "secscan/error.hpp"
#include "secscan/rng.hpp"

namespace secscan {

std::string_view to_string(PulseOutcome p) {
  switch (p) {
    case PulseOutcome::ShiftHappened: return "ShiftHappened";
    case PulseOutcome::Nothing: return "Nothing";
    case PulseOutcome::Tripped: return "Tripped";
  }
  return "?";
}

namespace {

std::vector<std::uint64_t> to_words(const std::vector<bool>& b) {
  std::vector<std::uint64_t> w;
  w.reserve(b.size());
  for (bool x : b) w.push_back(broadcast(x));
  return w;
}

std::vector<bool> to_bits(const std::vector<std::uint64_t>& w) {
  std::vector<bool> b;
  b.reserve(w.size());
  for (auto x : w) b.push_back((x & 1) != 0);
  return b;
}

std::string bit_string(const std::vector<bool>& b) {
  std::string s;
  for (bool x : b) s += x ? '1' : '0';
  return s;
}

}  // namespace

Oracle::Oracle(const ScanDesign& sd, std::uint64_t seed, DelayModel dm)
    : sd_(sd), public_(sd), secret_(sd.locked.secret_key), dm_(dm) {
  public_.locked.secret_key.assign(secret_.size(), false);
  public_.locked.placements.clear();
  if (sd_.arch == ArchKind::MrDfs) mssd_ = build_mssd(dm_);
  power_cycle(seed);
}

void Oracle::note(std::string entry) {
  if (recording_) transcript_.push_back(std::move(entry));
}

void Oracle::power_cycle(std::uint64_t seed) {
  ++log_.power_cycles;
  state_ = power_on(sd_, mix_seed(seed, 0x0a11), secret_);
  if (sd_.arch == ArchKind::RDfs) {
    std::vector<std::uint64_t> si(sd_.num_chains(), 0);
    clock_step(sd_, state_, ModePins{}, si);
  }
  note(nlohmann::json{{"op", "power_cycle"}, {"seed", seed}}.dump());
}

SoBits Oracle::clock(const ModePins& pins, const std::vector<bool>& si, bool ksi) {
  if (si.size() != sd_.num_chains()) throw InvalidPins("one scan-in bit per chain expected");
  const bool shifts = shifts_rcs(sd_, state_, pins);
  ScanOut o = clock_step(sd_, state_, pins, to_words(si), broadcast(ksi));
  ++log_.clocks;
  if (shifts) ++log_.shift_clocks;
  SoBits out;
  if (!o.masked) out = to_bits(o.bits);
  if (recording_) {
    nlohmann::json j{{"op", "clock"},
                     {"test", pins.test},
                     {"reg", pins.reg},
                     {"se", pins.se},
                     {"kse", pins.kse},
                     {"si", bit_string(si)},
                     {"ksi", ksi}};
    j["so"] = out ? nlohmann::json(bit_string(*out)) : nlohmann::json("MASKED");
    note(j.dump());
  }
  return out;
}

std::optional<std::vector<std::vector<bool>>> Oracle::clock_burst(const ModePins& pins, std::size_t cycles,
                                                                   const std::vector<std::vector<bool>>& si,
                                                                   const std::vector<bool>& ksi) {
  if (!si.empty() && si.size() != sd_.num_chains()) throw InvalidPins("one scan-in stream per chain expected");
  const bool shifts = shifts_rcs(sd_, state_, pins);
  std::vector<std::vector<std::uint64_t>> w;
  for (const auto& s : si) w.push_back(to_words(s));
  const auto kw = to_words(ksi);
  const auto before = state_.counters.shift_cycles;
  BurstOut b = secscan::clock_burst(sd_, state_, pins, cycles, w, kw);
  log_.clocks += cycles;
  log_.shift_clocks += shifts ? state_.counters.shift_cycles - before : 0;
  if (recording_) {
    nlohmann::json j{{"op", "clock_burst"}, {"test", pins.test}, {"reg", pins.reg}, {"se", pins.se},
                     {"kse", pins.kse},     {"cycles", cycles}};
    note(j.dump());
  }
  if (b.masked) return std::nullopt;
  std::vector<std::vector<bool>> out;
  for (const auto& s : b.so) out.push_back(to_bits(s));
  return out;
}

void Oracle::set_inputs(const std::vector<bool>& pi) {
  secscan::set_inputs(sd_, state_, to_words(pi));
  ++log_.input_sets;
  note(nlohmann::json{{"op", "set_inputs"}, {"pi", bit_string(pi)}}.dump());
}

std::vector<bool> Oracle::read_po() {
  ++log_.po_reads;
  auto po = to_bits(secscan::read_po(sd_, state_));
  note(nlohmann::json{{"op", "read_po"}, {"po", bit_string(po)}}.dump());
  return po;
}

PulseOutcome Oracle::pulse_test(Ps width_ps, const std::vector<bool>& si) {
  if (sd_.arch != ArchKind::MrDfs) throw UnsupportedForArch("pulse tests target the MR_DFS shift-disable latch");
  if (width_ps <= 0) throw InvalidArgument("pulse width must be positive");
  if (si.size() != sd_.num_chains()) throw InvalidPins("one scan-in bit per chain expected");
  ++log_.pulse_tests;
  const Ps start = dm_.d_du() + 2 * dm_.d_and + dm_.d_nor + dm_.d_not + dm_.d_clkq;
  const Ps horizon = start + width_ps + start;
  Stimulus stim{{"rst", {{0, false}}}, {"SE", {{0, true}}}, {"Test", {{0, false}, {start, true}, {start + width_ps, false}}}};
  SimOptions opt;
  opt.initial_q["Q_FF"] = state_.mssd_q;
  Waveform w = simulate(mssd_, stim, horizon, opt);
  const bool q_high = value_at(w.at("Q_FF"), horizon);
  PulseOutcome r = PulseOutcome::Nothing;
  if (q_high && !state_.mssd_q && state_.key_captured) {
    state_.mssd_q = true;
    state_.prev_test = false;
    r = PulseOutcome::Tripped;
  } else if (rising_edges(w.at("SD")) > 0) {
    glitch_shift(sd_, state_, to_words(si));
    ++log_.shift_clocks;
    r = PulseOutcome::ShiftHappened;
  } else {
    state_.prev_test = false;
  }
  note(nlohmann::json{{"op", "pulse_test"}, {"width_ps", width_ps}, {"outcome", std::string(to_string(r))}}.dump());
  return r;
}

void Oracle::sys_rst() {
  if (sd_.arch != ArchKind::MrDfs) throw UnsupportedForArch("sys_rst is an MR_DFS pin");
  secscan::sys_rst(sd_, state_);
  ++log_.sys_rsts;
  note(R"({"op":"sys_rst"})");
}

std::string Oracle::transcript_json() const {
  std::string s = "[";
  for (std::size_t i = 0; i < transcript_.size(); ++i) s += (i ? ",\n " : "\n ") + transcript_[i];
  return s + "\n]\n";
}

}  // namespace secscan
