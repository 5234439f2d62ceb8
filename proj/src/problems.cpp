#include "totp/problems.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace totp {

namespace {

void check_literals(const std::vector<Literal>& lits, std::size_t variables, const char* what) {
  std::set<Literal> seen;
  for (Literal l : lits) {
    if (l == 0 || static_cast<std::size_t>(std::abs(l)) > variables) {
      throw ParseError(std::string(what) + " has literal " + std::to_string(l) + " outside 1.." +
                       std::to_string(variables));
    }
    if (seen.count(-l) != 0) {
      throw ParseError(std::string(what) + " contains both " + std::to_string(std::abs(l)) + " and its negation");
    }
    seen.insert(l);
  }
}

// Reads the next non-comment line; returns false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == 'c' || line[first] == '#') {
      continue;
    }
    return true;
  }
  return false;
}

[[noreturn]] void fail(std::size_t lineno, const std::string& msg) {
  throw ParseError("line " + std::to_string(lineno) + ": " + msg);
}

std::pair<std::size_t, std::size_t> read_header(std::istream& in, const std::string& kind, std::size_t& lineno) {
  std::string line;
  if (!next_line(in, line, lineno)) {
    throw ParseError("missing 'p " + kind + "' header");
  }
  std::istringstream ss(line);
  std::string p, k, rest;
  long long n = -1, m = -1;
  if (!(ss >> p >> k >> n >> m) || p != "p" || k != kind || n < 0 || m < 0 || (ss >> rest)) {
    fail(lineno, "expected header 'p " + kind + " N M'");
  }
  return {static_cast<std::size_t>(n), static_cast<std::size_t>(m)};
}

// Reads zero-terminated literal groups, possibly spanning lines.
std::vector<std::vector<Literal>> read_groups(std::istream& in, std::size_t count, std::size_t& lineno,
                                              bool one_per_line) {
  std::vector<std::vector<Literal>> groups;
  std::vector<Literal> cur;
  std::string line;
  while (next_line(in, line, lineno)) {
    if (line.find_first_not_of(" \t") != std::string::npos && line[line.find_first_not_of(" \t")] == '%') {
      break;
    }
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      char* end = nullptr;
      const long v = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0') {
        fail(lineno, "expected an integer literal, got '" + tok + "'");
      }
      if (v == 0) {
        groups.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(static_cast<Literal>(v));
      }
    }
    if (one_per_line && !cur.empty()) {
      fail(lineno, "term is not terminated by 0");
    }
  }
  if (!cur.empty()) {
    fail(lineno, "last group is not terminated by 0");
  }
  if (groups.size() != count) {
    throw ParseError("header declares " + std::to_string(count) + " entries but " + std::to_string(groups.size()) +
                     " were read");
  }
  return groups;
}

}  // namespace

void Graph::validate() const {
  for (auto [u, v] : edges) {
    if (u < 1 || v < 1 || u > vertices || v > vertices) {
      throw ParseError("edge " + std::to_string(u) + "-" + std::to_string(v) + " references a missing vertex");
    }
    if (u == v) {
      throw ParseError("self-loop on vertex " + std::to_string(u));
    }
  }
}

void DnfFormula::validate() const {
  for (const auto& t : terms) {
    check_literals(t, variables, "DNF term");
  }
}

void CnfFormula::validate() const {
  for (const auto& c : clauses) {
    check_literals(c, variables, "CNF clause");
  }
}

void MonotoneCircuit::validate() const {
  if (inputs == 0) {
    throw ParseError("monotone circuit needs at least one input");
  }
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const std::size_t id = inputs + k;
    if (gates[k].lhs >= id || gates[k].rhs >= id) {
      throw ParseError("gate " + std::to_string(id) + " reads a gate that does not precede it");
    }
  }
  if (output >= inputs + gates.size()) {
    throw ParseError("circuit output references an unknown node");
  }
}

bool MonotoneCircuit::evaluate(const boost::dynamic_bitset<>& assignment) const {
  std::vector<char> value(inputs + gates.size());
  for (std::size_t i = 0; i < inputs; ++i) {
    value[i] = assignment.test(i) ? 1 : 0;
  }
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const Gate& g = gates[k];
    value[inputs + k] = g.op == Op::kAnd ? (value[g.lhs] & value[g.rhs]) : (value[g.lhs] | value[g.rhs]);
  }
  return value[output] != 0;
}

DnfFormula cnf_complement(const CnfFormula& phi) {
  DnfFormula psi;
  psi.variables = phi.variables;
  psi.terms.reserve(phi.clauses.size());
  for (const auto& clause : phi.clauses) {
    std::vector<Literal> term;
    term.reserve(clause.size());
    for (Literal l : clause) {
      term.push_back(-l);
    }
    psi.terms.push_back(std::move(term));
  }
  return psi;
}

// --- independent sets -------------------------------------------------------

IndependentSetInstance::IndependentSetInstance(const Graph& g) : vertices_(g.vertices) {
  g.validate();
  closed_neighbourhood_.assign(vertices_, boost::dynamic_bitset<>(vertices_));
  for (std::size_t v = 0; v < vertices_; ++v) {
    closed_neighbourhood_[v].set(v);
  }
  for (auto [u, v] : g.edges) {
    closed_neighbourhood_[u - 1].set(v - 1);
    closed_neighbourhood_[v - 1].set(u - 1);
  }
}

IndependentSetInstance::State IndependentSetInstance::initial() const {
  State s;
  s.remaining.resize(vertices_, true);
  return s;
}

StepOutcome<IndependentSetInstance::State> IndependentSetInstance::step(const State& s) const {
  const auto v = s.remaining.find_first();
  if (v == boost::dynamic_bitset<>::npos) {
    return Halt{};
  }
  State take{s.remaining - closed_neighbourhood_[v], true};
  State skip{s.remaining, s.committed};
  skip.remaining.reset(v);
  return binary_split(*this, std::move(take), std::move(skip));
}

// --- DNF ----------------------------------------------------------------------

DnfInstance::DnfInstance(DnfFormula phi) : phi_(std::move(phi)) { phi_.validate(); }

DnfInstance::State DnfInstance::initial() const { return State{0, boost::dynamic_bitset<>(phi_.variables)}; }

StepOutcome<DnfInstance::State> DnfInstance::step(const State& s) const {
  if (s.assigned == phi_.variables) {
    return Halt{};
  }
  State zero{s.assigned + 1, s.values};
  State one = zero;
  one.values.set(s.assigned);
  return binary_split(*this, std::move(zero), std::move(one));
}

bool DnfInstance::decide(const State& s) const {
  for (const auto& term : phi_.terms) {
    bool consistent = true;
    for (Literal l : term) {
      const auto var = static_cast<std::size_t>(std::abs(l)) - 1;
      if (var < s.assigned && s.values.test(var) != (l > 0)) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      return true;
    }
  }
  return false;
}

// --- monotone circuits -----------------------------------------------------------

MonotoneCircuitInstance::MonotoneCircuitInstance(MonotoneCircuit circuit) : circuit_(std::move(circuit)) {
  circuit_.validate();
}

MonotoneCircuitInstance::State MonotoneCircuitInstance::initial() const {
  return State{0, boost::dynamic_bitset<>(circuit_.inputs)};
}

StepOutcome<MonotoneCircuitInstance::State> MonotoneCircuitInstance::step(const State& s) const {
  if (s.assigned == circuit_.inputs) {
    return Halt{};
  }
  State zero{s.assigned + 1, s.values};
  State one = zero;
  one.values.set(s.assigned);
  return binary_split(*this, std::move(zero), std::move(one));
}

bool MonotoneCircuitInstance::decide(const State& s) const {
  boost::dynamic_bitset<> filled = s.values;
  for (std::size_t i = s.assigned; i < circuit_.inputs; ++i) {
    filled.set(i);
  }
  return circuit_.evaluate(filled);
}

// --- file formats ------------------------------------------------------------------

Graph read_graph(std::istream& in) {
  std::size_t lineno = 0;
  auto [n, m] = read_header(in, "graph", lineno);
  Graph g;
  g.vertices = n;
  std::string line;
  while (next_line(in, line, lineno)) {
    std::istringstream ss(line);
    std::string e, rest;
    long long u = 0, v = 0;
    if (!(ss >> e >> u >> v) || e != "e" || (ss >> rest)) {
      fail(lineno, "expected 'e u v'");
    }
    if (u < 1 || v < 1 || static_cast<std::size_t>(u) > n || static_cast<std::size_t>(v) > n) {
      fail(lineno, "edge endpoint outside 1.." + std::to_string(n));
    }
    g.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  }
  if (g.edges.size() != m) {
    throw ParseError("header declares " + std::to_string(m) + " edges but " + std::to_string(g.edges.size()) +
                     " were read");
  }
  g.validate();
  return g;
}

DnfFormula read_dnf(std::istream& in) {
  std::size_t lineno = 0;
  auto [n, m] = read_header(in, "dnf", lineno);
  DnfFormula phi{n, read_groups(in, m, lineno, true)};
  phi.validate();
  return phi;
}

CnfFormula read_cnf(std::istream& in) {
  std::size_t lineno = 0;
  auto [n, m] = read_header(in, "cnf", lineno);
  CnfFormula phi{n, read_groups(in, m, lineno, false)};
  phi.validate();
  return phi;
}

MonotoneCircuit read_monotone(std::istream& in) {
  MonotoneCircuit c;
  std::map<long long, std::size_t> ids;
  bool have_output = false;
  std::string line;
  std::size_t lineno = 0;
  auto lookup = [&](long long name) {
    auto it = ids.find(name);
    if (it == ids.end()) {
      fail(lineno, "identifier " + std::to_string(name) + " used before it is declared");
    }
    return it->second;
  };
  while (next_line(in, line, lineno)) {
    std::istringstream ss(line);
    std::string kw, rest;
    ss >> kw;
    if (have_output) {
      fail(lineno, "nothing may follow the output line");
    }
    if (kw == "input") {
      long long k = 0;
      if (!(ss >> k) || (ss >> rest)) {
        fail(lineno, "expected 'input k'");
      }
      if (!c.gates.empty()) {
        fail(lineno, "inputs must be declared before gates");
      }
      if (!ids.emplace(k, c.inputs).second) {
        fail(lineno, "identifier " + std::to_string(k) + " declared twice");
      }
      ++c.inputs;
    } else if (kw == "gate") {
      long long g = 0, a = 0, b = 0;
      std::string op;
      if (!(ss >> g >> op >> a >> b) || (ss >> rest)) {
        fail(lineno, "expected 'gate g AND|OR a b'");
      }
      MonotoneCircuit::Op kind;
      if (op == "AND") {
        kind = MonotoneCircuit::Op::kAnd;
      } else if (op == "OR") {
        kind = MonotoneCircuit::Op::kOr;
      } else {
        fail(lineno, "unsupported gate '" + op + "' (monotone circuits allow AND and OR)");
      }
      const std::size_t lhs = lookup(a);
      const std::size_t rhs = lookup(b);
      if (!ids.emplace(g, c.inputs + c.gates.size()).second) {
        fail(lineno, "identifier " + std::to_string(g) + " declared twice");
      }
      c.gates.push_back({kind, lhs, rhs});
    } else if (kw == "output") {
      long long g = 0;
      if (!(ss >> g) || (ss >> rest)) {
        fail(lineno, "expected 'output g'");
      }
      c.output = lookup(g);
      have_output = true;
    } else {
      fail(lineno, "unknown directive '" + kw + "'");
    }
  }
  if (!have_output) {
    throw ParseError("monotone circuit has no 'output' line");
  }
  c.validate();
  return c;
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "p graph " << g.vertices << ' ' << g.edges.size() << '\n';
  for (auto [u, v] : g.edges) {
    out << "e " << u << ' ' << v << '\n';
  }
}

void write_dnf(std::ostream& out, const DnfFormula& phi) {
  out << "p dnf " << phi.variables << ' ' << phi.terms.size() << '\n';
  for (const auto& t : phi.terms) {
    for (Literal l : t) {
      out << l << ' ';
    }
    out << "0\n";
  }
}

void write_cnf(std::ostream& out, const CnfFormula& phi) {
  out << "p cnf " << phi.variables << ' ' << phi.clauses.size() << '\n';
  for (const auto& c : phi.clauses) {
    for (Literal l : c) {
      out << l << ' ';
    }
    out << "0\n";
  }
}

void write_monotone(std::ostream& out, const MonotoneCircuit& c) {
  for (std::size_t i = 0; i < c.inputs; ++i) {
    out << "input " << i + 1 << '\n';
  }
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    const auto& g = c.gates[k];
    out << "gate " << c.inputs + k + 1 << (g.op == MonotoneCircuit::Op::kAnd ? " AND " : " OR ") << g.lhs + 1 << ' '
        << g.rhs + 1 << '\n';
  }
  out << "output " << c.output + 1 << '\n';
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "is") return ProblemKind::kIndependentSet;
  if (name == "dnf") return ProblemKind::kDnf;
  if (name == "cnf") return ProblemKind::kCnf;
  if (name == "mono") return ProblemKind::kMonotone;
  if (name == "tree") return ProblemKind::kTree;
  throw ParameterError("unknown problem kind '" + name + "' (expected is, dnf, cnf, mono or tree)");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kIndependentSet: return "is";
    case ProblemKind::kDnf: return "dnf";
    case ProblemKind::kCnf: return "cnf";
    case ProblemKind::kMonotone: return "mono";
    case ProblemKind::kTree: return "tree";
  }
  return "?";
}

ProblemInput load_problem(ProblemKind kind, const std::string& path) {
  if (kind == ProblemKind::kTree) {
    return load_tree_file(path);
  }
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open input file '" + path + "'");
  }
  switch (kind) {
    case ProblemKind::kIndependentSet: return read_graph(in);
    case ProblemKind::kDnf: return read_dnf(in);
    case ProblemKind::kCnf: return read_cnf(in);
    case ProblemKind::kMonotone: return read_monotone(in);
    case ProblemKind::kTree: break;
  }
  throw ParameterError("unsupported problem kind");
}

}  // namespace totp
