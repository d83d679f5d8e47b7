// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "secscan/cnf.hpp"
#include "secscan/error.hpp"
#include "secscan/netlist.hpp"
#include "support.hpp"

using namespace secscan;
using secscan::testing::fixture;
using secscan::testing::random_netlist;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Counts declarations by scanning the raw file text, without the parser.
struct RawCounts {
  int inputs = 0, outputs = 0, dffs = 0, gates = 0;
};
RawCounts count_lines(const std::string& text) {
  RawCounts c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("INPUT(", 0) == 0)
      ++c.inputs;
    else if (line.rfind("OUTPUT(", 0) == 0)
      ++c.outputs;
    else if (line.find("DFF(") != std::string::npos)
      ++c.dffs;
    else if (line.find('=') != std::string::npos)
      ++c.gates;
  }
  return c;
}

}  // namespace

TEST(Parse, MinimalNot) {
  Netlist n = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)");
  ASSERT_EQ(n.gates().size(), 1u);
  ASSERT_EQ(n.inputs().size(), 1u);
  EXPECT_EQ(n.net_name(n.inputs()[0]), "a");
  EXPECT_EQ(n.net_name(n.outputs()[0]), "y");
}

TEST(Parse, S27Counts) {
  const std::string text = slurp(fixture("s27.bench"));
  RawCounts raw = count_lines(text);
  EXPECT_EQ(raw.inputs, 4);
  EXPECT_EQ(raw.outputs, 1);
  EXPECT_EQ(raw.dffs, 3);
  Netlist n = parse_bench(text);
  EXPECT_EQ(static_cast<int>(n.inputs().size()), raw.inputs);
  EXPECT_EQ(static_cast<int>(n.outputs().size()), raw.outputs);
  EXPECT_EQ(static_cast<int>(n.dffs().size()), raw.dffs);
  EXPECT_EQ(static_cast<int>(n.gates().size()), raw.gates);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_bench("OUTPUT(y)\ny = NOT(a)"), UndefinedNet);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUF(a)"), DuplicateNet);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, z)\nz = OR(y, a)"), CycleError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a)"), ArityError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a)"), SyntaxError);
  try {
    parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Parse, DialectVariants) {
  Netlist n = parse_bench("# c\ninput( a )\n  output(y)\nt = inv(a)  # trailing\ny=buff(t)\n");
  EXPECT_EQ(n.gates()[0].kind, GateKind::Not);
  EXPECT_EQ(n.gates()[1].kind, GateKind::Buf);
}

TEST(Parse, RoundTripFixtures) {
  for (const char* f : {"s27.bench", "c17.bench", "s13207.bench", "s38417.bench", "s38584.bench"}) {
    Netlist a = read_bench_file(fixture(f));
    Netlist b = parse_bench(write_bench(a), a.name());
    EXPECT_EQ(write_bench(a), write_bench(b)) << f;
    EXPECT_EQ(a.gates().size(), b.gates().size());
    EXPECT_EQ(a.dffs().size(), b.dffs().size());
  }
}

TEST(Eval, TrivialGates) {
  Netlist n = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)");
  EXPECT_FALSE(eval_comb(n, {{"a", true}}).at("y"));
  Netlist x = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = XOR(a, b)");
  EXPECT_FALSE(eval_comb(x, {{"a", true}, {"b", true}}).at("y"));
  EXPECT_THROW(eval_comb(x, {{"a", true}}), MissingAssignment);
}

TEST(Eval, S27HandTrace) {
  // All inputs and state zero, traced gate by gate by hand:
  // G14=1 G8=0 G12=1 G15=1 G16=0 G9=1 G11=0 G17=1 G10=0 G13=0.
  Netlist n = read_bench_file(fixture("s27.bench"));
  BitAssignment a;
  for (NetId id : n.sources()) a[n.net_name(id)] = false;
  auto v = eval_comb(n, a);
  EXPECT_TRUE(v.at("G17"));
  EXPECT_TRUE(v.at("G14"));
  EXPECT_TRUE(v.at("G9"));
  EXPECT_FALSE(v.at("G10"));
  EXPECT_FALSE(v.at("G11"));
  EXPECT_FALSE(v.at("G13"));
}

TEST(Eval, MatchesReferenceOnRandomNetlists) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Netlist n = random_netlist(seed, 6, 3, 40);
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 20; ++t) {
      BitAssignment a = secscan::testing::random_sources(n, rng);
      auto got = eval_comb(n, a);
      auto ref = secscan::testing::reference_eval(n, {a.begin(), a.end()});
      for (const auto& [net, val] : ref) ASSERT_EQ(got.at(net), val) << "seed " << seed << " net " << net;
    }
  }
}

TEST(Eval3, KleeneBasics) {
  Netlist a = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  EXPECT_EQ(eval3(a, {{"a", Tri::Zero}, {"b", Tri::X}}).at("y"), Tri::Zero);
  Netlist x = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = XOR(a, b)");
  EXPECT_EQ(eval3(x, {{"a", Tri::One}, {"b", Tri::X}}).at("y"), Tri::X);
  Netlist o = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = OR(a, b)");
  EXPECT_EQ(eval3(o, {{"a", Tri::One}, {"b", Tri::X}}).at("y"), Tri::One);
  EXPECT_EQ(tri_not(Tri::X), Tri::X);
}

TEST(Eval3, DefiniteInputsMatchEvalComb) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Netlist n = random_netlist(seed, 4, 0, 8);
    std::mt19937_64 rng(seed);
    BitAssignment a = secscan::testing::random_sources(n, rng);
    TriAssignment t;
    for (const auto& [k, v] : a) t[k] = tri_of(v);
    auto two = eval_comb(n, a);
    auto three = eval3(n, t);
    for (const auto& [net, v] : two) ASSERT_EQ(three.at(net), tri_of(v));
  }
}

TEST(Cone, DirectPath) {
  Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(z)\ny = BUF(a)\nz = NOT(b)");
  const std::string roots[] = {"y"};
  Netlist c = extract_cone(n, roots);
  EXPECT_EQ(c.gates().size(), 1u);
  ASSERT_EQ(c.inputs().size(), 1u);
  EXPECT_EQ(c.net_name(c.inputs()[0]), "a");
  const std::string bad[] = {"a"};
  EXPECT_THROW(extract_cone(n, bad), UnknownNet);
  const std::string missing[] = {"nope"};
  EXPECT_THROW(extract_cone(n, missing), UnknownNet);
}

TEST(Cone, S27SubsetAndAgreement) {
  Netlist n = read_bench_file(fixture("s27.bench"));
  const std::string roots[] = {"G17"};
  Netlist c = extract_cone(n, roots);
  EXPECT_LE(c.gates().size(), n.gates().size());
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    BitAssignment a = secscan::testing::random_sources(n, rng);
    BitAssignment sub;
    for (NetId id : c.inputs()) sub[c.net_name(id)] = a.at(c.net_name(id));
    EXPECT_EQ(eval_comb(c, sub).at("G17"), eval_comb(n, a).at("G17"));
  }
}

TEST(Cone, RandomAgreement) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Netlist n = random_netlist(seed, 5, 4, 30);
    std::vector<std::string> roots;
    for (NetId id : n.sinks())
      if (roots.size() < 2) roots.push_back(n.net_name(id));
    Netlist c = extract_cone(n, roots);
    std::mt19937_64 rng(seed * 31);
    for (int t = 0; t < 100; ++t) {
      BitAssignment a = secscan::testing::random_sources(n, rng);
      BitAssignment sub;
      for (NetId id : c.inputs()) sub[c.net_name(id)] = a.at(c.net_name(id));
      auto full = eval_comb(n, a);
      auto part = eval_comb(c, sub);
      for (const auto& r : roots) ASSERT_EQ(part.at(r), full.at(r));
    }
  }
}

TEST(Cnf, ClauseCounts) {
  Netlist a = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  CnfFormula fa = to_cnf(a, "c0");
  EXPECT_EQ(fa.clauses().size(), 3u);
  EXPECT_EQ(fa.num_vars(), 3);
  Netlist n = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)");
  EXPECT_EQ(to_cnf(n, "c0").clauses().size(), 2u);
}

TEST(Cnf, CopiesAreNamespaced) {
  Netlist n = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)");
  CnfFormula f;
  to_cnf(f, n, "A");
  to_cnf(f, n, "B");
  EXPECT_EQ(f.num_vars(), 4);
  EXPECT_NE(f.var("A", "y"), f.var("B", "y"));
  EXPECT_THROW(f.var("C", "y"), UnknownNet);
  EXPECT_NE(f.to_dimacs().find("p cnf 4 4"), std::string::npos);
}

TEST(Cnf, S27ProjectedSolutionCount) {
  Netlist n = read_bench_file(fixture("s27.bench"));
  CnfFormula f = to_cnf(n, "s27");
  EXPECT_EQ(f.num_vars(), static_cast<int>(n.num_nets()));
  CdclSolver s;
  f.copy_into(s);  // variables map 1:1 onto a fresh solver
  std::vector<int> src;
  for (NetId id : n.sources()) src.push_back(f.var("s27", n.net_name(id)));
  int count = 0;
  while (s.solve() == SatResult::Sat) {
    ++count;
    std::vector<int> block;
    for (int v : src) block.push_back(s.model_value(v) ? -v : v);
    s.add_clause(block);
    ASSERT_LE(count, 1 << 7);
  }
  EXPECT_EQ(count, 1 << (n.inputs().size() + n.dffs().size()));
}

TEST(Cnf, WideXorMatchesEvaluation) {
  Netlist n = parse_bench(
      "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nINPUT(e)\nINPUT(f)\nINPUT(g)\nOUTPUT(y)\nOUTPUT(z)\n"
      "y = XOR(a, b, c, d, e, f, g)\nz = XNOR(a, b, c)\n");
  for (unsigned m = 0; m < 128; ++m) {
    CdclSolver s;
    auto lits = encode_netlist(s, n);
    std::vector<int> assume;
    BitAssignment a;
    int k = 0;
    for (NetId id : n.sources()) {
      bool b = (m >> k++) & 1U;
      a[n.net_name(id)] = b;
      assume.push_back(b ? lits[id] : -lits[id]);
    }
    ASSERT_EQ(s.solve(assume), SatResult::Sat);
    auto v = eval_comb(n, a);
    EXPECT_EQ(s.model_lit(lits[n.net("y")]), v.at("y"));
    EXPECT_EQ(s.model_lit(lits[n.net("z")]), v.at("z"));
  }
}

TEST(Area, GateEquivalents) {
  EXPECT_EQ(gate_equivalents(Netlist{}), 0.0);
  Netlist nand = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)");
  EXPECT_EQ(gate_equivalents(nand), 1.0);
  EXPECT_EQ(ge::kDff + ge::kMux21, 8.0);
  Netlist and3 = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = AND(a, b, c)");
  EXPECT_EQ(gate_equivalents(and3), 3.0);
}

TEST(Structure, DistanceAndConsumers) {
  Netlist n = read_bench_file(fixture("s27.bench"));
  auto dist = n.distance_to_outputs();
  EXPECT_EQ(dist[n.net("G17")], 0);
  EXPECT_EQ(dist[n.net("G11")], 1);
  // G11 feeds G17, G10 and the DFF G6.
  EXPECT_EQ(n.consumers(n.net("G11")).size(), 3u);
}
