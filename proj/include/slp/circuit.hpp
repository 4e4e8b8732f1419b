#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "slp/common.hpp"

namespace slp {

enum class GateKind { var, constant, add, mul };

struct Gate {
  GateKind kind;
  int var = -1;               // index into Circuit::var_names (var gates)
  int value = 0;              // -1 or +1 (constant gates)
  std::vector<int> children;  // argument gate ids (add/mul), in slot order

  static Gate make_var(int v) { return Gate{GateKind::var, v, 0, {}}; }
  static Gate make_const(int c) { return Gate{GateKind::constant, -1, c, {}}; }
  static Gate make_add(std::vector<int> ch) {
    return Gate{GateKind::add, -1, 0, std::move(ch)};
  }
  static Gate make_mul(std::vector<int> ch) {
    return Gate{GateKind::mul, -1, 0, std::move(ch)};
  }
};

/// An arithmetic circuit: a DAG of gates in topological order (children have
/// smaller ids than their parents) with a single sink, the output gate.
/// Immutable after construction; all operations on circuits are pure.
///
/// Plain circuits carry only the constant -1. Circuits flagged
/// monotone-capable may additionally carry the constant +1, which is what
/// monotone formulas are made of. `const 0` in the netlist grammar is sugar
/// for the subcircuit (-1)+(+1).
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::vector<Gate> gates, int output,
          std::vector<std::string> var_names, bool monotone_capable,
          std::vector<std::string> gate_names = {})
      : gates_(std::move(gates)),
        output_(output),
        var_names_(std::move(var_names)),
        monotone_capable_(monotone_capable),
        gate_names_(std::move(gate_names)) {}

  const std::vector<Gate>& gates() const { return gates_; }
  const Gate& gate(int id) const { return gates_[static_cast<size_t>(id)]; }
  int output() const { return output_; }
  std::size_t size() const { return gates_.size(); }
  const std::vector<std::string>& var_names() const { return var_names_; }
  const std::string& var_name(int v) const {
    return var_names_[static_cast<size_t>(v)];
  }
  bool monotone_capable() const { return monotone_capable_; }

  bool unbounded_fanin() const {
    for (const Gate& g : gates_)
      if (g.children.size() > 2) return true;
    return false;
  }

  bool has_var(const std::string& name) const {
    return std::find(var_names_.begin(), var_names_.end(), name) !=
           var_names_.end();
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const Gate& g : gates_) n += g.children.size();
    return n;
  }

  /// Diagnostic name of a gate: the source name when the circuit was parsed
  /// from text, "g<id>" otherwise.
  std::string gate_name(int id) const {
    if (static_cast<size_t>(id) < gate_names_.size() &&
        !gate_names_[static_cast<size_t>(id)].empty())
      return gate_names_[static_cast<size_t>(id)];
    return "g" + std::to_string(id);
  }

 private:
  std::vector<Gate> gates_;
  int output_ = -1;
  std::vector<std::string> var_names_;
  bool monotone_capable_ = false;
  std::vector<std::string> gate_names_;  // side table, diagnostics only
};

/// Checks every structural invariant: ids in range and topological, fanin of
/// computation gates >= 2, constant values in {-1,+1} (+1 only when
/// monotone-capable), exactly one sink, var indices valid.
inline void validate(const Circuit& c) {
  const auto& gs = c.gates();
  if (gs.empty()) throw circuit_error("empty circuit");
  if (c.output() < 0 || static_cast<size_t>(c.output()) >= gs.size())
    throw circuit_error("output gate id out of range");
  std::vector<int> fanout(gs.size(), 0);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Gate& g = gs[i];
    switch (g.kind) {
      case GateKind::var:
        if (g.var < 0 || static_cast<size_t>(g.var) >= c.var_names().size())
          throw circuit_error("gate " + c.gate_name(static_cast<int>(i)) +
                              ": variable index out of range");
        break;
      case GateKind::constant:
        if (g.value != -1 && g.value != 1)
          throw circuit_error("gate " + c.gate_name(static_cast<int>(i)) +
                              ": constant must be -1 or +1");
        if (g.value == 1 && !c.monotone_capable())
          throw circuit_error("gate " + c.gate_name(static_cast<int>(i)) +
                              ": constant +1 requires a monotone-capable "
                              "circuit");
        break;
      case GateKind::add:
      case GateKind::mul:
        if (g.children.size() < 2)
          throw circuit_error("gate " + c.gate_name(static_cast<int>(i)) +
                              ": computation gate needs fanin >= 2");
        for (int ch : g.children) {
          if (ch < 0 || static_cast<size_t>(ch) >= i)
            throw circuit_error("gate " + c.gate_name(static_cast<int>(i)) +
                                ": child out of topological order");
          ++fanout[static_cast<size_t>(ch)];
        }
        break;
    }
  }
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const bool is_out = static_cast<int>(i) == c.output();
    if (is_out && fanout[i] != 0)
      throw circuit_error("output gate has fanout");
    if (!is_out && fanout[i] == 0)
      throw circuit_error("gate " + c.gate_name(static_cast<int>(i)) +
                          " is a second sink");
  }
}

/// Incremental construction of circuits. Gates are appended in topological
/// order; `finish(output)` validates and freezes the result.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(bool monotone_capable = false)
      : monotone_capable_(monotone_capable) {}

  int var_index(const std::string& name) {
    auto it = var_ids_.find(name);
    if (it != var_ids_.end()) return it->second;
    int id = static_cast<int>(var_names_.size());
    var_names_.push_back(name);
    var_ids_.emplace(name, id);
    return id;
  }

  /// Shared input gate for `name`: one gate per distinct variable.
  int var(const std::string& name) {
    int v = var_index(name);
    auto it = shared_var_gate_.find(v);
    if (it != shared_var_gate_.end()) return it->second;
    int g = push(Gate::make_var(v));
    shared_var_gate_.emplace(v, g);
    return g;
  }

  /// Fresh input gate for `name`; used when building formulas, where every
  /// occurrence of a variable is its own leaf.
  int var_leaf(const std::string& name) {
    return push(Gate::make_var(var_index(name)));
  }

  int constant(int v) {
    if (v != -1 && v != 1) throw circuit_error("constant must be -1 or +1");
    if (v == 1) monotone_capable_ = true;
    return push(Gate::make_const(v));
  }

  int minus_one() {
    if (shared_minus_one_ < 0) shared_minus_one_ = constant(-1);
    return shared_minus_one_;
  }

  /// The constant 1. Uses the +1 gate on monotone-capable circuits and the
  /// product (-1)*(-1) otherwise.
  int one() {
    if (shared_one_ < 0) {
      if (monotone_capable_) {
        shared_one_ = constant(1);
      } else {
        int m = minus_one();
        shared_one_ = mul({m, m});
      }
    }
    return shared_one_;
  }

  /// The constant 0, desugared to (-1)+(+1).
  int zero() {
    if (shared_zero_ < 0) {
      monotone_capable_ = true;
      shared_zero_ = add({minus_one(), constant(1)});
    }
    return shared_zero_;
  }

  int add(std::vector<int> children) {
    check_children(children);
    return push(Gate::make_add(std::move(children)));
  }

  int mul(std::vector<int> children) {
    check_children(children);
    return push(Gate::make_mul(std::move(children)));
  }

  /// Sum of the given gates; empty sums are 0, singletons pass through.
  int sum(const std::vector<int>& children) {
    if (children.empty()) return zero();
    if (children.size() == 1) return children[0];
    return add(children);
  }

  /// Product of the given gates; empty products are 1, singletons pass
  /// through.
  int product(const std::vector<int>& children) {
    if (children.empty()) return one();
    if (children.size() == 1) return children[0];
    return mul(children);
  }

  /// g^k by iterated squaring: O(log k) gates, shared (not a formula).
  int power(int g, const Integer& k) {
    if (k < 0) throw circuit_error("power: negative exponent");
    if (k == 0) return one();
    if (k == 1) return g;
    std::vector<bool> bits;
    for (Integer e = k; e > 0; e >>= 1) bits.push_back((e & 1) != 0);
    int acc = g;  // corresponds to the most significant bit
    for (std::size_t i = bits.size() - 1; i-- > 0;) {
      acc = mul({acc, acc});
      if (bits[i]) acc = mul({acc, g});
    }
    return acc;
  }

  /// The integer n from -1 gates via binary expansion (Horner), O(log|n|)
  /// gates. Shares subterms, so the result is not a formula.
  int scalar(const Integer& n) {
    if (n == 0) return zero();
    Integer a = n < 0 ? -n : n;
    std::vector<bool> bits;
    for (Integer e = a; e > 0; e >>= 1) bits.push_back((e & 1) != 0);
    int acc = one();  // most significant bit
    for (std::size_t i = bits.size() - 1; i-- > 0;) {
      acc = add({acc, acc});
      if (bits[i]) acc = add({acc, one()});
    }
    if (n < 0) acc = mul({minus_one(), acc});
    return acc;
  }

  /// Tree-shaped scalar: like scalar(n) but with no gate sharing, so formula
  /// gadgets stay formulas. Constants are sums of +-1 leaves per binary
  /// digit; size O(log^2 |n|).
  int tree_scalar(const Integer& n) {
    if (n == 0) return add({mul({constant(-1), constant(-1)}), constant(-1)});
    Integer a = n < 0 ? -n : n;
    std::vector<bool> bits;
    for (Integer e = a; e > 0; e >>= 1) bits.push_back((e & 1) != 0);
    std::vector<int> parts;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!bits[i]) continue;
      // +-2^i as a product of i tree-shaped 2s (and a sign leaf).
      std::vector<int> factors;
      if (n < 0) factors.push_back(constant(-1));
      for (std::size_t j = 0; j < i; ++j) {
        int m = constant(-1);
        int two = mul({add({constant(-1), constant(-1)}), m});
        factors.push_back(two);
      }
      if (factors.empty())
        parts.push_back(mul({constant(-1), constant(-1)}));  // +1
      else if (factors.size() == 1)
        parts.push_back(factors[0]);
      else
        parts.push_back(mul(factors));
    }
    return parts.size() == 1 ? parts[0] : add(parts);
  }

  /// Circuit computing a monomial, e.g. X1^2*X2; exponents may be huge
  /// (iterated squaring), so this is generally not a formula.
  int monomial(const std::vector<std::pair<std::string, Integer>>& exps) {
    std::vector<int> factors;
    for (const auto& [name, e] : exps) {
      if (e == 0) continue;
      factors.push_back(power(var(name), e));
    }
    return product(factors);
  }

  /// Splices a copy of `c` into this builder. Variables are unified by name;
  /// returns the id of the copied output gate.
  int append(const Circuit& c) {
    std::vector<int> remap(c.size(), -1);
    if (c.monotone_capable()) monotone_capable_ = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Gate& g = c.gate(static_cast<int>(i));
      switch (g.kind) {
        case GateKind::var:
          remap[i] = push(Gate::make_var(var_index(c.var_name(g.var))));
          break;
        case GateKind::constant:
          remap[i] = push(Gate::make_const(g.value));
          break;
        case GateKind::add:
        case GateKind::mul: {
          std::vector<int> ch;
          ch.reserve(g.children.size());
          for (int x : g.children) ch.push_back(remap[static_cast<size_t>(x)]);
          remap[i] = push(g.kind == GateKind::add ? Gate::make_add(ch)
                                                  : Gate::make_mul(ch));
          break;
        }
      }
    }
    return remap[static_cast<size_t>(c.output())];
  }

  std::size_t size() const { return gates_.size(); }

  Circuit finish(int output) {
    Circuit c = extract_reachable(output);
    validate(c);
    return c;
  }

 private:
  int push(Gate g) {
    gates_.push_back(std::move(g));
    return static_cast<int>(gates_.size() - 1);
  }

  void check_children(const std::vector<int>& children) const {
    if (children.size() < 2)
      throw circuit_error("computation gate needs fanin >= 2");
    for (int ch : children)
      if (ch < 0 || static_cast<size_t>(ch) >= gates_.size())
        throw circuit_error("child gate id out of range");
  }

  /// Keeps only gates reachable from the output (helpers like cached
  /// constants may be left over), renumbering densely and compacting the
  /// variable table.
  Circuit extract_reachable(int output) const {
    if (output < 0 || static_cast<size_t>(output) >= gates_.size())
      throw circuit_error("output gate id out of range");
    std::vector<bool> keep(gates_.size(), false);
    std::vector<int> stack{output};
    keep[static_cast<size_t>(output)] = true;
    while (!stack.empty()) {
      int g = stack.back();
      stack.pop_back();
      for (int ch : gates_[static_cast<size_t>(g)].children) {
        if (!keep[static_cast<size_t>(ch)]) {
          keep[static_cast<size_t>(ch)] = true;
          stack.push_back(ch);
        }
      }
    }
    std::vector<int> remap(gates_.size(), -1);
    std::vector<Gate> out_gates;
    std::vector<int> var_remap(var_names_.size(), -1);
    std::vector<std::string> out_vars;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      if (!keep[i]) continue;
      Gate g = gates_[i];
      if (g.kind == GateKind::var) {
        int& vr = var_remap[static_cast<size_t>(g.var)];
        if (vr < 0) {
          vr = static_cast<int>(out_vars.size());
          out_vars.push_back(var_names_[static_cast<size_t>(g.var)]);
        }
        g.var = vr;
      }
      for (int& ch : g.children) ch = remap[static_cast<size_t>(ch)];
      remap[i] = static_cast<int>(out_gates.size());
      out_gates.push_back(std::move(g));
    }
    return Circuit(std::move(out_gates), remap[static_cast<size_t>(output)],
                   std::move(out_vars), monotone_capable_);
  }

  std::vector<Gate> gates_;
  std::vector<std::string> var_names_;
  std::unordered_map<std::string, int> var_ids_;
  std::unordered_map<int, int> shared_var_gate_;
  int shared_minus_one_ = -1;
  int shared_one_ = -1;
  int shared_zero_ = -1;
  bool monotone_capable_;
};

// ---------------------------------------------------------------------------
// Netlist parsing and printing
//
// Grammar, one statement per line ('#' starts a comment, ';' also separates
// statements):
//   <id> = var <name>
//   <id> = const <-1|1|0>        ("const 0" desugars to (-1)+(+1))
//   <id> = add <id> <id> ...
//   <id> = mul <id> <id> ...
//   out <id>
// ---------------------------------------------------------------------------

namespace detail {

struct Statement {
  std::size_t line;
  std::string lhs;                  // empty for "out"
  std::string op;                   // var|const|add|mul|out
  std::vector<std::string> args;
};

inline std::vector<Statement> tokenize_netlist(const std::string& text) {
  std::vector<Statement> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t sep = line.find(';', start);
      if (sep == std::string::npos) sep = line.size();
      std::string stmt = line.substr(start, sep - start);
      start = sep + 1;
      // normalize "a=b" to "a = b"
      std::string norm;
      for (char ch : stmt) {
        if (ch == '=') {
          norm += " = ";
        } else {
          norm += ch;
        }
      }
      std::istringstream iss(norm);
      std::vector<std::string> words;
      for (std::string w; iss >> w;) words.push_back(w);
      if (words.empty()) continue;
      Statement s;
      s.line = line_no;
      if (words[0] == "out") {
        if (words.size() != 2) throw parse_error("malformed out statement", line_no);
        s.op = "out";
        s.args = {words[1]};
      } else {
        if (words.size() < 3 || words[1] != "=")
          throw parse_error("expected '<id> = <op> ...'", line_no);
        s.lhs = words[0];
        s.op = words[2];
        s.args.assign(words.begin() + 3, words.end());
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detail

/// Parses a netlist. Forward references are allowed; gates are renumbered
/// densely in topological (DFS) order from the output, the original names
/// kept in a diagnostic side table. Errors: syntax (with line), undefined
/// reference, cycle, missing/duplicate output, unreachable gate (a second
/// sink).
inline Circuit parse_circuit(const std::string& text) {
  auto stmts = detail::tokenize_netlist(text);
  struct Def {
    std::size_t line;
    std::string op;
    std::vector<std::string> args;
  };
  std::map<std::string, Def> defs;
  std::vector<std::string> def_order;
  std::string out_name;
  bool monotone_capable = false;
  for (auto& s : stmts) {
    if (s.op == "out") {
      if (!out_name.empty())
        throw parse_error("duplicate output declaration", s.line);
      out_name = s.args[0];
      continue;
    }
    if (defs.count(s.lhs))
      throw parse_error("gate '" + s.lhs + "' redefined", s.line);
    if (s.op == "var") {
      if (s.args.size() != 1) throw parse_error("var takes one name", s.line);
    } else if (s.op == "const") {
      if (s.args.size() != 1 ||
          (s.args[0] != "-1" && s.args[0] != "1" && s.args[0] != "0"))
        throw parse_error("const takes -1, 1 or 0", s.line);
      if (s.args[0] == "1" || s.args[0] == "0") monotone_capable = true;
    } else if (s.op == "add" || s.op == "mul") {
      if (s.args.size() < 2)
        throw parse_error(s.op + " needs at least two arguments", s.line);
    } else {
      throw parse_error("unknown operation '" + s.op + "'", s.line);
    }
    defs.emplace(s.lhs, Def{s.line, s.op, s.args});
    def_order.push_back(s.lhs);
  }
  if (out_name.empty()) throw parse_error("missing 'out' statement");
  if (!defs.count(out_name))
    throw parse_error("output references undefined gate '" + out_name + "'");

  CircuitBuilder b(monotone_capable);
  std::map<std::string, int> built;     // source name -> gate id
  std::map<std::string, int> visiting;  // cycle detection (0=in progress)
  std::vector<std::string> names;       // gate id -> source name

  // Iterative DFS from the output; detects cycles and undefined references.
  struct Frame {
    std::string name;
    std::size_t next_child = 0;
  };
  std::vector<Frame> stack{{out_name, 0}};
  visiting[out_name] = 0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    auto dit = defs.find(f.name);
    const Def& d = dit->second;
    if (d.op == "add" || d.op == "mul") {
      if (f.next_child < d.args.size()) {
        const std::string& ch = d.args[f.next_child++];
        auto cit = defs.find(ch);
        if (cit == defs.end())
          throw parse_error("reference to undefined gate '" + ch + "'",
                            d.line);
        if (built.count(ch)) continue;
        if (visiting.count(ch))
          throw parse_error("cycle detected through gate '" + ch + "'",
                            cit->second.line);
        visiting[ch] = 0;
        stack.push_back({ch, 0});
        continue;
      }
    }
    // All children built: emit this gate.
    int id;
    if (d.op == "var") {
      id = b.var_leaf(d.args[0]);
    } else if (d.op == "const") {
      if (d.args[0] == "0") {
        int m = b.constant(-1);
        int p = b.constant(1);
        names.resize(b.size());
        id = b.add({m, p});
      } else {
        id = b.constant(d.args[0] == "-1" ? -1 : 1);
      }
    } else {
      std::vector<int> ch;
      for (const std::string& a : d.args) ch.push_back(built.at(a));
      id = d.op == "add" ? b.add(ch) : b.mul(ch);
    }
    built[f.name] = id;
    names.resize(b.size());
    names[static_cast<size_t>(id)] = f.name;
    visiting.erase(f.name);
    stack.pop_back();
  }
  for (const std::string& n : def_order)
    if (!built.count(n))
      throw parse_error("gate '" + n + "' is not reachable from the output "
                        "(multiple sinks)", defs.at(n).line);

  Circuit raw = b.finish(built.at(out_name));
  // finish() may renumber; recover the name table by replaying the builder
  // order. CircuitBuilder::finish keeps reachable gates in builder order, and
  // everything the parser built is reachable, so ids are unchanged here.
  return Circuit(raw.gates(), raw.output(), raw.var_names(),
                 raw.monotone_capable(), names);
}

/// Canonical printer: topological order, gates named g0..g{n-1}. The
/// round-trip parse_circuit(print_circuit(c)) is structurally identical to c.
inline std::string print_circuit(const Circuit& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gate(static_cast<int>(i));
    os << 'g' << i << " = ";
    switch (g.kind) {
      case GateKind::var:
        os << "var " << c.var_name(g.var);
        break;
      case GateKind::constant:
        os << "const " << g.value;
        break;
      case GateKind::add:
      case GateKind::mul:
        os << (g.kind == GateKind::add ? "add" : "mul");
        for (int ch : g.children) os << " g" << ch;
        break;
    }
    os << '\n';
  }
  os << "out g" << c.output() << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural analysis
// ---------------------------------------------------------------------------

struct CircuitStats {
  std::size_t size = 0;
  std::size_t edge_count = 0;
  std::size_t depth = 0;
  bool is_formula = false;
  bool is_monotone = false;
  bool is_mult_disjoint = false;
  Integer total_degree;                        // syntactic (formal) bound
  std::map<std::string, Integer> var_degree;   // per-variable syntactic bound
};

/// Computes all structural statistics bottom-up: depth as the longest
/// input-to-output path, multiplicative disjointness via per-gate descendant
/// sets, and syntactic degree with var=1, const=0, add=max, mul=sum.
inline CircuitStats analyze(const Circuit& c) {
  CircuitStats st;
  const auto& gs = c.gates();
  const std::size_t n = gs.size();
  st.size = n;
  st.edge_count = c.edge_count();

  std::vector<std::size_t> depth(n, 0);
  std::vector<int> fanout(n, 0);
  st.is_monotone = true;

  // Descendant gate-sets as bitsets for the disjointness test.
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> desc(n * words, 0);
  auto desc_of = [&](std::size_t g) { return desc.data() + g * words; };

  std::vector<std::map<std::string, Integer>> vdeg(n);
  std::vector<Integer> tdeg(n);

  st.is_mult_disjoint = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Gate& g = gs[i];
    desc_of(i)[i / 64] |= 1ULL << (i % 64);
    switch (g.kind) {
      case GateKind::var:
        vdeg[i][c.var_name(g.var)] = 1;
        tdeg[i] = 1;
        break;
      case GateKind::constant:
        if (g.value == -1) st.is_monotone = false;
        break;
      case GateKind::add:
      case GateKind::mul: {
        std::size_t d = 0;
        for (int ch : g.children) {
          const std::size_t u = static_cast<size_t>(ch);
          d = std::max(d, depth[u] + 1);
          ++fanout[u];
        }
        depth[i] = d;
        if (g.kind == GateKind::mul) {
          // pairwise-disjoint argument subcircuits
          std::vector<std::uint64_t> acc(words, 0);
          for (int ch : g.children) {
            const std::uint64_t* cd = desc_of(static_cast<size_t>(ch));
            for (std::size_t w = 0; w < words; ++w) {
              if (acc[w] & cd[w]) st.is_mult_disjoint = false;
              acc[w] |= cd[w];
            }
          }
        }
        for (int ch : g.children) {
          const std::uint64_t* cd = desc_of(static_cast<size_t>(ch));
          std::uint64_t* gd = desc_of(i);
          for (std::size_t w = 0; w < words; ++w) gd[w] |= cd[w];
        }
        if (g.kind == GateKind::add) {
          for (int ch : g.children) {
            const std::size_t u = static_cast<size_t>(ch);
            tdeg[i] = std::max(tdeg[i], tdeg[u]);
            for (const auto& [v, e] : vdeg[u]) {
              Integer& cur = vdeg[i][v];
              if (e > cur) cur = e;
            }
          }
        } else {
          for (int ch : g.children) {
            const std::size_t u = static_cast<size_t>(ch);
            tdeg[i] += tdeg[u];
            for (const auto& [v, e] : vdeg[u]) vdeg[i][v] += e;
          }
        }
        break;
      }
    }
  }
  st.depth = depth[static_cast<size_t>(c.output())];
  st.total_degree = tdeg[static_cast<size_t>(c.output())];
  st.var_degree = vdeg[static_cast<size_t>(c.output())];

  st.is_formula = true;
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_out = static_cast<int>(i) == c.output();
    if ((is_out && fanout[i] != 0) || (!is_out && fanout[i] != 1))
      st.is_formula = false;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

using SubstValue = std::variant<Integer, std::string>;

/// Replaces bound variables by constants (spliced scalar subcircuits; 0 uses
/// the (-1)+(+1) sugar) or by other variables. Unknown variables are an
/// error.
inline Circuit substitute(const Circuit& c,
                          const std::map<std::string, SubstValue>& bindings) {
  for (const auto& [name, v] : bindings)
    if (!c.has_var(name))
      throw circuit_error("substitute: unknown variable '" + name + "'");
  CircuitBuilder b(c.monotone_capable());
  std::map<Integer, int> const_cache;
  std::vector<int> remap(c.size(), -1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case GateKind::var: {
        const std::string& name = c.var_name(g.var);
        auto it = bindings.find(name);
        if (it == bindings.end()) {
          remap[i] = b.var_leaf(name);
        } else if (const auto* tgt = std::get_if<std::string>(&it->second)) {
          remap[i] = b.var_leaf(*tgt);
        } else {
          const Integer& v = std::get<Integer>(it->second);
          auto cached = const_cache.find(v);
          if (cached == const_cache.end())
            cached = const_cache.emplace(v, b.scalar(v)).first;
          remap[i] = cached->second;
        }
        break;
      }
      case GateKind::constant:
        remap[i] = b.constant(g.value);
        break;
      case GateKind::add:
      case GateKind::mul: {
        std::vector<int> ch;
        ch.reserve(g.children.size());
        for (int x : g.children) ch.push_back(remap[static_cast<size_t>(x)]);
        remap[i] = g.kind == GateKind::add ? b.add(ch) : b.mul(ch);
        break;
      }
    }
  }
  return b.finish(remap[static_cast<size_t>(c.output())]);
}

// ---------------------------------------------------------------------------
// Whole-circuit combinators
// ---------------------------------------------------------------------------

inline Circuit sum(const std::vector<Circuit>& cs) {
  CircuitBuilder b;
  std::vector<int> outs;
  outs.reserve(cs.size());
  for (const Circuit& c : cs) outs.push_back(b.append(c));
  return b.finish(b.sum(outs));
}

inline Circuit product(const std::vector<Circuit>& cs) {
  CircuitBuilder b;
  std::vector<int> outs;
  outs.reserve(cs.size());
  for (const Circuit& c : cs) outs.push_back(b.append(c));
  return b.finish(b.product(outs));
}

inline Circuit power(const Circuit& c, const Integer& k) {
  CircuitBuilder b;
  int g = b.append(c);
  return b.finish(b.power(g, k));
}

inline Circuit scalar(const Integer& n) {
  CircuitBuilder b;
  return b.finish(b.scalar(n));
}

inline Circuit monomial_circuit(
    const std::vector<std::pair<std::string, Integer>>& exps) {
  CircuitBuilder b;
  return b.finish(b.monomial(exps));
}

/// n variable names `prefix`1..`prefix`n that do not occur in c.
inline std::vector<std::string> fresh_vars(const Circuit& c,
                                           const std::string& prefix,
                                           std::size_t count) {
  std::vector<std::string> out;
  std::size_t k = 1;
  while (out.size() < count) {
    std::string cand = prefix + std::to_string(k++);
    if (!c.has_var(cand)) out.push_back(cand);
  }
  return out;
}

}  // namespace slp
