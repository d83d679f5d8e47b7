// SPDX-License-Identifier: Apache-2.0
#include "secscan/sim.hpp"

#include "secscan/error.hpp"

namespace secscan {

CompiledNetlist::CompiledNetlist(Netlist netlist) : n_(std::move(netlist)), sources_(n_.sources()) {
  const Netlist& n = n_;
  slot_of_gate_.assign(n.gates().size(), 0);
  for (std::uint32_t gi : n.topo_order()) {
    const Gate& g = n.gates()[gi];
    slot_of_gate_[gi] = static_cast<std::uint32_t>(slots_.size());
    const auto begin = static_cast<std::uint32_t>(pins_.size());
    pins_.insert(pins_.end(), g.inputs.begin(), g.inputs.end());
    slots_.push_back({g.kind, g.output, begin, static_cast<std::uint32_t>(pins_.size())});
  }
}

namespace {

inline std::uint64_t reduce(GateKind kind, const std::uint64_t* v, std::uint32_t n) {
  std::uint64_t acc = v[0];
  switch (kind) {
    case GateKind::Buf: return acc;
    case GateKind::Not: return ~acc;
    case GateKind::And:
      for (std::uint32_t i = 1; i < n; ++i) acc &= v[i];
      return acc;
    case GateKind::Nand:
      for (std::uint32_t i = 1; i < n; ++i) acc &= v[i];
      return ~acc;
    case GateKind::Or:
      for (std::uint32_t i = 1; i < n; ++i) acc |= v[i];
      return acc;
    case GateKind::Nor:
      for (std::uint32_t i = 1; i < n; ++i) acc |= v[i];
      return ~acc;
    case GateKind::Xor:
      for (std::uint32_t i = 1; i < n; ++i) acc ^= v[i];
      return acc;
    case GateKind::Xnor:
      for (std::uint32_t i = 1; i < n; ++i) acc ^= v[i];
      return ~acc;
  }
  return 0;
}

}  // namespace

void CompiledNetlist::evaluate(std::span<std::uint64_t> values, const FaultMasks* fm) const {
  if (values.size() != n_.num_nets()) throw InvalidArgument("value buffer size mismatch");
  std::uint64_t buf[64];
  std::vector<std::uint64_t> wide;
  if (fm == nullptr || fm->empty()) {
    for (const Slot& s : slots_) {
      const std::uint32_t n = s.end - s.begin;
      std::uint64_t* in = n <= 64 ? buf : (wide.resize(n), wide.data());
      for (std::uint32_t i = 0; i < n; ++i) in[i] = values[pins_[s.begin + i]];
      values[s.out] = reduce(s.kind, in, n);
    }
    return;
  }
  for (NetId id : sources_) values[id] = (values[id] & fm->stem_and[id]) | fm->stem_or[id];
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    const Slot& s = slots_[k];
    const std::uint32_t n = s.end - s.begin;
    std::uint64_t* in = n <= 64 ? buf : (wide.resize(n), wide.data());
    if (fm->gate_pins[k]) {
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t p = s.begin + i;
        in[i] = (values[pins_[p]] & fm->pin_and[p]) | fm->pin_or[p];
      }
    } else {
      for (std::uint32_t i = 0; i < n; ++i) in[i] = values[pins_[s.begin + i]];
    }
    values[s.out] = (reduce(s.kind, in, n) & fm->stem_and[s.out]) | fm->stem_or[s.out];
  }
}

std::uint64_t CompiledNetlist::output(std::span<const std::uint64_t> values, std::size_t po,
                                      const FaultMasks* fm) const {
  std::uint64_t v = values[n_.outputs()[po]];
  if (fm != nullptr && !fm->empty()) v = (v & fm->po_and[po]) | fm->po_or[po];
  return v;
}

std::uint64_t CompiledNetlist::next_state(std::span<const std::uint64_t> values, std::size_t dff,
                                          const FaultMasks* fm) const {
  std::uint64_t v = values[n_.dffs()[dff].d];
  if (fm != nullptr && !fm->empty()) v = (v & fm->dff_and[dff]) | fm->dff_or[dff];
  return v;
}

FaultMasks::FaultMasks(const CompiledNetlist& c, std::span<const Fault> faults, std::span<const std::uint64_t> lanes) {
  if (faults.size() != lanes.size()) throw InvalidArgument("one lane mask per fault expected");
  const Netlist& n = c.netlist();
  stem_and.assign(n.num_nets(), ~0ULL);
  stem_or.assign(n.num_nets(), 0);
  pin_and.assign(c.pins_.size(), ~0ULL);
  pin_or.assign(c.pins_.size(), 0);
  gate_pins.assign(c.slots_.size(), 0);
  dff_and.assign(n.dffs().size(), ~0ULL);
  dff_or.assign(n.dffs().size(), 0);
  po_and.assign(n.outputs().size(), ~0ULL);
  po_or.assign(n.outputs().size(), 0);
  empty_ = faults.empty();
  for (std::size_t i = 0; i < faults.size(); ++i) {
    const Fault& f = faults[i];
    const std::uint64_t m = lanes[i];
    std::uint64_t* a = nullptr;
    std::uint64_t* o = nullptr;
    if (!f.branch) {
      a = &stem_and[f.net];
      o = &stem_or[f.net];
    } else {
      const Consumer& b = *f.branch;
      switch (b.kind) {
        case Consumer::Kind::GatePin: {
          const std::uint32_t slot = c.slot_of_gate_[b.index];
          const std::uint32_t p = c.slots_[slot].begin + b.pin;
          gate_pins[slot] = 1;
          a = &pin_and[p];
          o = &pin_or[p];
          break;
        }
        case Consumer::Kind::DffData:
          a = &dff_and[b.index];
          o = &dff_or[b.index];
          break;
        case Consumer::Kind::PrimaryOutput:
          a = &po_and[b.index];
          o = &po_or[b.index];
          break;
      }
    }
    if (f.stuck)
      *o |= m;
    else
      *a &= ~m;
  }
}

}  // namespace secscan
