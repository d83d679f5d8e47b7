// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "secscan/attacks.hpp"
#include "support.hpp"

namespace secscan::testing {

// Exhaustive check of a condition: every completion of the X sources (keys
// included) must make the PO follow lc.
inline bool holds_exhaustively(const ScanDesign& sd, const LeakCondition& c) {
  const Netlist& n = sd.locked.netlist;
  const std::size_t ni = n.inputs().size();
  std::vector<int> fixed(n.num_sources(), -1);
  for (std::size_t f = 0; f < sd.functional_inputs.size(); ++f)
    if (c.pi_assignment[f] != Tri::X) fixed[sd.functional_inputs[f]] = c.pi_assignment[f] == Tri::One;
  for (std::size_t d = 0; d < n.dffs().size(); ++d)
    if (c.rc_assignment[d] != Tri::X) fixed[ni + d] = c.rc_assignment[d] == Tri::One;
  std::vector<std::size_t> free;
  for (std::size_t p = 0; p < fixed.size(); ++p)
    if (fixed[p] < 0 && p != ni + c.lc) free.push_back(p);
  if (free.size() > 16) throw std::runtime_error("too many free sources");
  const auto src = n.sources();
  for (std::uint64_t m = 0; m < (1ULL << free.size()); ++m) {
    for (bool b : {false, true}) {
      std::map<std::string, bool> a;
      for (std::size_t p = 0; p < fixed.size(); ++p)
        if (fixed[p] >= 0) a[n.net_name(src[p])] = fixed[p];
      for (std::size_t i = 0; i < free.size(); ++i) a[n.net_name(src[free[i]])] = (m >> i) & 1U;
      a[n.net_name(src[ni + c.lc])] = b;
      const auto v = reference_eval(n, a);
      if (v.at(n.net_name(n.outputs()[c.po])) != (b != c.inverted)) return false;
    }
  }
  return true;
}

}  // namespace secscan::testing
