// SPDX-License-Identifier: Apache-2.0
#include "secscan/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "secscan/error.hpp"

namespace secscan {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view word) {
  const std::string w = upper(word);
  if (w == "AND") return GateKind::And;
  if (w == "NAND") return GateKind::Nand;
  if (w == "OR") return GateKind::Or;
  if (w == "NOR") return GateKind::Nor;
  if (w == "XOR") return GateKind::Xor;
  if (w == "XNOR") return GateKind::Xnor;
  if (w == "NOT" || w == "INV") return GateKind::Not;
  if (w == "BUF" || w == "BUFF") return GateKind::Buf;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Netlist

std::optional<NetId> Netlist::find_net(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NetId Netlist::net(std::string_view name) const {
  auto id = find_net(name);
  if (!id) throw UnknownNet(std::string(name));
  return *id;
}

std::vector<NetId> Netlist::sources() const {
  std::vector<NetId> out(inputs_.begin(), inputs_.end());
  for (const Dff& d : dffs_) out.push_back(d.q);
  return out;
}

std::vector<NetId> Netlist::sinks() const {
  std::vector<NetId> out(outputs_.begin(), outputs_.end());
  for (const Dff& d : dffs_) out.push_back(d.d);
  return out;
}

std::vector<int> Netlist::distance_to_outputs() const {
  std::vector<int> dist(num_nets(), -1);
  for (NetId po : outputs_) dist[po] = 0;
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    const Gate& g = gates_[*it];
    if (dist[g.output] < 0) continue;
    for (NetId in : g.inputs) dist[in] = std::max(dist[in], dist[g.output] + 1);
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Builder

NetlistBuilder::NetlistBuilder(std::string name) : name_(std::move(name)) {}

NetlistBuilder& NetlistBuilder::at_line(std::size_t line) {
  line_ = line;
  return *this;
}

NetlistBuilder& NetlistBuilder::add_input(std::string_view net) {
  inputs_.push_back({std::string(net), {}, line_});
  return *this;
}

NetlistBuilder& NetlistBuilder::add_output(std::string_view net) {
  outputs_.push_back({std::string(net), {}, line_});
  return *this;
}

NetlistBuilder& NetlistBuilder::add_gate(std::string_view output, GateKind kind,
                                         std::vector<std::string> inputs) {
  gates_.push_back({std::string(output), kind, std::move(inputs), line_});
  return *this;
}

NetlistBuilder& NetlistBuilder::add_dff(std::string_view q, std::string_view d) {
  dffs_.push_back({std::string(q), std::string(d), line_});
  return *this;
}

Netlist NetlistBuilder::build() const {
  Netlist n;
  n.name_ = name_;

  auto where = [](std::size_t line) { return line ? " (line " + std::to_string(line) + ")" : std::string(); };

  // Definitions first: every driven net gets an id in declaration order.
  auto define = [&](const std::string& name, Driver drv, std::size_t line) {
    auto [it, fresh] = n.index_.emplace(name, static_cast<NetId>(n.names_.size()));
    if (!fresh) throw DuplicateNet(name + where(line));
    n.names_.push_back(name);
    n.drivers_.push_back(drv);
  };
  for (std::size_t i = 0; i < inputs_.size(); ++i)
    define(inputs_[i].net, {DriverKind::PrimaryInput, static_cast<std::uint32_t>(i)}, inputs_[i].line);
  for (std::size_t i = 0; i < dffs_.size(); ++i)
    define(dffs_[i].net, {DriverKind::DffOutput, static_cast<std::uint32_t>(i)}, dffs_[i].line);
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const GateDecl& g = gates_[i];
    const bool unary = g.kind == GateKind::Not || g.kind == GateKind::Buf;
    if ((unary && g.inputs.size() != 1) || (!unary && g.inputs.size() < 2))
      throw ArityError(std::string(to_string(g.kind)) + " with " + std::to_string(g.inputs.size()) +
                       " inputs driving " + g.output + where(g.line));
    define(g.output, {DriverKind::Gate, static_cast<std::uint32_t>(i)}, g.line);
  }

  auto lookup = [&](const std::string& name, std::size_t line) {
    auto it = n.index_.find(name);
    if (it == n.index_.end()) throw UndefinedNet(name + where(line));
    return it->second;
  };

  for (const auto& in : inputs_) n.inputs_.push_back(n.index_.at(in.net));
  for (const auto& d : dffs_) n.dffs_.push_back({n.index_.at(d.net), lookup(d.other, d.line)});
  for (const auto& g : gates_) {
    Gate gate{n.index_.at(g.output), g.kind, {}};
    for (const auto& in : g.inputs) gate.inputs.push_back(lookup(in, g.line));
    n.gates_.push_back(std::move(gate));
  }
  {
    std::unordered_set<NetId> seen;
    for (const auto& o : outputs_) {
      NetId id = lookup(o.net, o.line);
      if (!seen.insert(id).second) throw DuplicateNet("OUTPUT(" + o.net + ")" + where(o.line));
      n.outputs_.push_back(id);
    }
  }

  n.consumers_.assign(n.names_.size(), {});
  for (std::uint32_t gi = 0; gi < n.gates_.size(); ++gi)
    for (std::uint32_t p = 0; p < n.gates_[gi].inputs.size(); ++p)
      n.consumers_[n.gates_[gi].inputs[p]].push_back({Consumer::Kind::GatePin, gi, p});
  for (std::uint32_t di = 0; di < n.dffs_.size(); ++di)
    n.consumers_[n.dffs_[di].d].push_back({Consumer::Kind::DffData, di, 0});
  for (std::uint32_t oi = 0; oi < n.outputs_.size(); ++oi)
    n.consumers_[n.outputs_[oi]].push_back({Consumer::Kind::PrimaryOutput, oi, 0});

  // Kahn's algorithm over gates; leftover gates sit on a combinational loop.
  std::vector<std::uint32_t> pending(n.gates_.size());
  for (std::uint32_t gi = 0; gi < n.gates_.size(); ++gi) {
    for (NetId in : n.gates_[gi].inputs)
      if (n.drivers_[in].kind == DriverKind::Gate) ++pending[gi];
  }
  std::vector<std::uint32_t> ready;
  for (std::uint32_t gi = 0; gi < n.gates_.size(); ++gi)
    if (pending[gi] == 0) ready.push_back(gi);
  std::reverse(ready.begin(), ready.end());
  while (!ready.empty()) {
    std::uint32_t gi = ready.back();
    ready.pop_back();
    n.topo_.push_back(gi);
    for (const Consumer& c : n.consumers_[n.gates_[gi].output])
      if (c.kind == Consumer::Kind::GatePin && --pending[c.index] == 0) ready.push_back(c.index);
  }
  if (n.topo_.size() != n.gates_.size()) {
    for (std::uint32_t gi = 0; gi < n.gates_.size(); ++gi)
      if (pending[gi] != 0)
        throw CycleError("combinational loop through " + n.names_[n.gates_[gi].output] +
                         where(gates_[gi].line));
  }
  return n;
}

// ---------------------------------------------------------------------------
// BENCH I/O

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']' ||
         c == '$' || c == '/' || c == '\\' || c == ':' || c == '-' || c == '\'';
}

class LineScanner {
 public:
  LineScanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a net name");
    return std::string(text_.substr(start, pos_ - start));
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, pos_ + 1, what); }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

Netlist parse_bench(std::string_view text, std::string name) {
  NetlistBuilder b(std::move(name));
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    LineScanner s(line, line_no);
    if (s.at_end()) continue;
    b.at_line(line_no);
    std::string first = s.name();
    std::string key = upper(first);
    if ((key == "INPUT" || key == "OUTPUT") && s.accept('(')) {
      std::string net = s.name();
      s.expect(')');
      if (!s.at_end()) s.fail("trailing characters");
      if (key == "INPUT")
        b.add_input(net);
      else
        b.add_output(net);
      continue;
    }
    s.expect('=');
    std::string kind_word = s.name();
    s.expect('(');
    std::vector<std::string> args;
    if (!s.accept(')')) {
      do {
        args.push_back(s.name());
      } while (s.accept(','));
      s.expect(')');
    }
    if (!s.at_end()) s.fail("trailing characters");
    const std::string kw = upper(kind_word);
    if (kw == "DFF") {
      if (args.size() != 1)
        throw ArityError("DFF with " + std::to_string(args.size()) + " inputs driving " + first + " (line " +
                         std::to_string(line_no) + ")");
      b.add_dff(first, args[0]);
      continue;
    }
    auto kind = parse_gate_kind(kind_word);
    if (!kind) throw SyntaxError(line_no, 1, "unknown gate kind '" + kind_word + "'");
    b.add_gate(first, *kind, std::move(args));
  }
  return b.build();
}

Netlist read_bench_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bench(ss.str(), path.stem().string());
}

std::string write_bench(const Netlist& n) {
  std::ostringstream out;
  if (!n.name().empty()) out << "# " << n.name() << "\n";
  out << "# " << n.inputs().size() << " inputs, " << n.outputs().size() << " outputs, " << n.dffs().size()
      << " D-type flipflops, " << n.gates().size() << " gates\n\n";
  for (NetId id : n.inputs()) out << "INPUT(" << n.net_name(id) << ")\n";
  out << "\n";
  for (NetId id : n.outputs()) out << "OUTPUT(" << n.net_name(id) << ")\n";
  out << "\n";
  for (const Dff& d : n.dffs()) out << n.net_name(d.q) << " = DFF(" << n.net_name(d.d) << ")\n";
  if (!n.dffs().empty()) out << "\n";
  for (const Gate& g : n.gates()) {
    out << n.net_name(g.output) << " = " << to_string(g.kind) << "(";
    for (std::size_t i = 0; i < g.inputs.size(); ++i) out << (i ? ", " : "") << n.net_name(g.inputs[i]);
    out << ")\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Evaluation

char tri_char(Tri t) { return t == Tri::Zero ? '0' : (t == Tri::One ? '1' : 'X'); }

Tri eval_gate3(GateKind kind, std::span<const Tri> in) {
  Tri acc = in[0];
  switch (kind) {
    case GateKind::Buf: return acc;
    case GateKind::Not: return tri_not(acc);
    case GateKind::And:
    case GateKind::Nand:
      for (std::size_t i = 1; i < in.size(); ++i) acc = tri_and(acc, in[i]);
      return kind == GateKind::Nand ? tri_not(acc) : acc;
    case GateKind::Or:
    case GateKind::Nor:
      for (std::size_t i = 1; i < in.size(); ++i) acc = tri_or(acc, in[i]);
      return kind == GateKind::Nor ? tri_not(acc) : acc;
    case GateKind::Xor:
    case GateKind::Xnor:
      for (std::size_t i = 1; i < in.size(); ++i) acc = tri_xor(acc, in[i]);
      return kind == GateKind::Xnor ? tri_not(acc) : acc;
  }
  return Tri::X;
}

std::uint64_t eval_gate_word(GateKind kind, std::span<const std::uint64_t> in) {
  std::uint64_t acc = in[0];
  switch (kind) {
    case GateKind::Buf: return acc;
    case GateKind::Not: return ~acc;
    case GateKind::And:
      for (std::size_t i = 1; i < in.size(); ++i) acc &= in[i];
      return acc;
    case GateKind::Nand:
      for (std::size_t i = 1; i < in.size(); ++i) acc &= in[i];
      return ~acc;
    case GateKind::Or:
      for (std::size_t i = 1; i < in.size(); ++i) acc |= in[i];
      return acc;
    case GateKind::Nor:
      for (std::size_t i = 1; i < in.size(); ++i) acc |= in[i];
      return ~acc;
    case GateKind::Xor:
      for (std::size_t i = 1; i < in.size(); ++i) acc ^= in[i];
      return acc;
    case GateKind::Xnor:
      for (std::size_t i = 1; i < in.size(); ++i) acc ^= in[i];
      return ~acc;
  }
  return 0;
}

std::vector<std::uint64_t> eval_words(const Netlist& n, std::span<const std::uint64_t> source_words) {
  if (source_words.size() != n.num_sources())
    throw MissingAssignment("expected " + std::to_string(n.num_sources()) + " source words, got " +
                            std::to_string(source_words.size()));
  std::vector<std::uint64_t> v(n.num_nets(), 0);
  std::size_t k = 0;
  for (NetId id : n.inputs()) v[id] = source_words[k++];
  for (const Dff& d : n.dffs()) v[d.q] = source_words[k++];
  std::vector<std::uint64_t> buf;
  for (std::uint32_t gi : n.topo_order()) {
    const Gate& g = n.gates()[gi];
    buf.clear();
    for (NetId in : g.inputs) buf.push_back(v[in]);
    v[g.output] = eval_gate_word(g.kind, buf);
  }
  return v;
}

std::vector<Tri> eval3_values(const Netlist& n, std::span<const Tri> source_values) {
  if (source_values.size() != n.num_sources())
    throw MissingAssignment("expected " + std::to_string(n.num_sources()) + " source values, got " +
                            std::to_string(source_values.size()));
  std::vector<Tri> v(n.num_nets(), Tri::X);
  std::size_t k = 0;
  for (NetId id : n.inputs()) v[id] = source_values[k++];
  for (const Dff& d : n.dffs()) v[d.q] = source_values[k++];
  std::vector<Tri> buf;
  for (std::uint32_t gi : n.topo_order()) {
    const Gate& g = n.gates()[gi];
    buf.clear();
    for (NetId in : g.inputs) buf.push_back(v[in]);
    v[g.output] = eval_gate3(g.kind, buf);
  }
  return v;
}

namespace {

template <typename Value, typename Map>
std::vector<Value> gather_sources(const Netlist& n, const Map& assign) {
  std::vector<Value> src;
  src.reserve(n.num_sources());
  for (NetId id : n.sources()) {
    auto it = assign.find(n.net_name(id));
    if (it == assign.end()) throw MissingAssignment(n.net_name(id));
    src.push_back(it->second);
  }
  return src;
}

}  // namespace

BitAssignment eval_comb(const Netlist& n, const BitAssignment& assign) {
  std::vector<std::uint64_t> src;
  for (bool b : gather_sources<bool>(n, assign)) src.push_back(b ? ~0ULL : 0ULL);
  auto v = eval_words(n, src);
  BitAssignment out;
  for (NetId id = 0; id < n.num_nets(); ++id) out.emplace(n.net_name(id), (v[id] & 1) != 0);
  return out;
}

TriAssignment eval3(const Netlist& n, const TriAssignment& assign) {
  auto v = eval3_values(n, gather_sources<Tri>(n, assign));
  TriAssignment out;
  for (NetId id = 0; id < n.num_nets(); ++id) out.emplace(n.net_name(id), v[id]);
  return out;
}

Netlist extract_cone(const Netlist& n, std::span<const std::string> roots) {
  std::vector<char> is_sink(n.num_nets(), 0);
  for (NetId id : n.sinks()) is_sink[id] = 1;
  std::vector<char> in_cone(n.num_nets(), 0);
  std::vector<NetId> stack;
  std::vector<NetId> root_ids;
  for (const std::string& r : roots) {
    NetId id = n.net(r);
    if (!is_sink[id]) throw UnknownNet(r + " is neither a primary output nor a DFF d-net");
    root_ids.push_back(id);
    if (!in_cone[id]) {
      in_cone[id] = 1;
      stack.push_back(id);
    }
  }
  while (!stack.empty()) {
    NetId id = stack.back();
    stack.pop_back();
    const Driver& drv = n.driver(id);
    if (drv.kind != DriverKind::Gate) continue;
    for (NetId in : n.gates()[drv.index].inputs)
      if (!in_cone[in]) {
        in_cone[in] = 1;
        stack.push_back(in);
      }
  }
  NetlistBuilder b(n.name() + "_cone");
  for (NetId id : n.sources())
    if (in_cone[id]) b.add_input(n.net_name(id));
  std::unordered_set<NetId> emitted;
  for (NetId id : root_ids)
    if (emitted.insert(id).second) b.add_output(n.net_name(id));
  for (const Gate& g : n.gates()) {
    if (!in_cone[g.output]) continue;
    std::vector<std::string> ins;
    for (NetId in : g.inputs) ins.push_back(n.net_name(in));
    b.add_gate(n.net_name(g.output), g.kind, std::move(ins));
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Gate equivalents

double ge::gate(GateKind kind, std::size_t arity) {
  const double k = arity >= 2 ? static_cast<double>(arity - 1) : 1.0;
  switch (kind) {
    case GateKind::Nand: return k * kNand2;
    case GateKind::Nor: return k * kNor2;
    case GateKind::And: return k * kAnd2;
    case GateKind::Or: return k * kOr2;
    case GateKind::Xor: return k * kXor2;
    case GateKind::Xnor: return k * kXnor2;
    case GateKind::Not: return kNot;
    case GateKind::Buf: return kBuf;
  }
  return 0.0;
}

double gate_equivalents(const Netlist& n) {
  double total = 0.0;
  for (const Gate& g : n.gates()) total += ge::gate(g.kind, g.inputs.size());
  total += static_cast<double>(n.dffs().size()) * ge::kDff;
  return total;
}

}  // namespace secscan
