#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "totp/machine.hpp"
#include "totp/tree.hpp"

namespace totp {

/// Undirected simple graph on vertices 1..N.
struct Graph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  /// Throws ParseError on self-loops or out-of-range endpoints.
  void validate() const;
};

/// A literal is a nonzero signed variable index, DIMACS style.
using Literal = int;

/// Disjunction of conjunctive terms over variables 1..n.
struct DnfFormula {
  std::size_t variables = 0;
  std::vector<std::vector<Literal>> terms;

  /// Rejects out-of-range literals and terms containing x and -x.
  void validate() const;
};

/// Conjunction of clauses over variables 1..n.
struct CnfFormula {
  std::size_t variables = 0;
  std::vector<std::vector<Literal>> clauses;

  /// Rejects out-of-range literals and tautological clauses.
  void validate() const;
};

/// Monotone circuit: node ids 0..inputs-1 are the inputs x1..xn, gate k has
/// id inputs+k and reads two earlier ids.
struct MonotoneCircuit {
  enum class Op { kAnd, kOr };
  struct Gate {
    Op op;
    std::size_t lhs;
    std::size_t rhs;
  };

  std::size_t inputs = 0;
  std::vector<Gate> gates;
  std::size_t output = 0;

  void validate() const;
  /// Evaluates with input i set to bit i of `assignment`.
  bool evaluate(const boost::dynamic_bitset<>& assignment) const;
};

using ProblemInput = std::variant<Graph, DnfFormula, CnfFormula, MonotoneCircuit, ExplicitTree>;

/// ¬φ as a DNF (De Morgan): each clause becomes the term of its negated
/// literals. #sat(result) = 2^n - #sat(φ).
DnfFormula cnf_complement(const CnfFormula& phi);

// ---------------------------------------------------------------------------
// Self-reducible adapters.

/// Nonempty independent sets. Splits on the lowest remaining vertex v:
/// choice 0 puts v in the set (drops its closed neighbourhood), choice 1
/// drops v.
class IndependentSetInstance {
 public:
  struct State {
    boost::dynamic_bitset<> remaining;
    bool committed = false;
  };

  explicit IndependentSetInstance(const Graph& g);

  State initial() const;
  StepOutcome<State> step(const State& s) const;
  bool decide(const State& s) const { return s.committed || s.remaining.any(); }
  std::size_t depth_bound() const { return vertices_ + 1; }
  std::size_t step_budget() const { return vertices_ + 1; }
  std::size_t variables() const { return vertices_; }

 private:
  std::size_t vertices_;
  std::vector<boost::dynamic_bitset<>> closed_neighbourhood_;
};

/// Satisfying assignments of a DNF, fixing x1, x2, ... in order.
class DnfInstance {
 public:
  struct State {
    std::size_t assigned = 0;
    boost::dynamic_bitset<> values;
  };

  explicit DnfInstance(DnfFormula phi);

  State initial() const;
  StepOutcome<State> step(const State& s) const;
  /// Some term is consistent with the partial assignment.
  bool decide(const State& s) const;
  std::size_t depth_bound() const { return phi_.variables + 1; }
  std::size_t step_budget() const { return phi_.variables + 1; }
  std::size_t variables() const { return phi_.variables; }
  const DnfFormula& formula() const noexcept { return phi_; }

 private:
  DnfFormula phi_;
};

/// Satisfying assignments of a monotone circuit, fixing inputs in order.
class MonotoneCircuitInstance {
 public:
  struct State {
    std::size_t assigned = 0;
    boost::dynamic_bitset<> values;
  };

  explicit MonotoneCircuitInstance(MonotoneCircuit circuit);

  State initial() const;
  StepOutcome<State> step(const State& s) const;
  /// The circuit accepts once every unassigned input is set to 1.
  bool decide(const State& s) const;
  std::size_t depth_bound() const { return circuit_.inputs + 1; }
  std::size_t step_budget() const { return circuit_.inputs + 1; }
  std::size_t variables() const { return circuit_.inputs; }
  const MonotoneCircuit& circuit() const noexcept { return circuit_; }

 private:
  MonotoneCircuit circuit_;
};

static_assert(SelfReducible<IndependentSetInstance>);
static_assert(SelfReducible<DnfInstance>);
static_assert(SelfReducible<MonotoneCircuitInstance>);

inline IndependentSetInstance is_instance(const Graph& g) { return IndependentSetInstance(g); }
inline DnfInstance dnf_instance(DnfFormula phi) { return DnfInstance(std::move(phi)); }
inline MonotoneCircuitInstance monotone_instance(MonotoneCircuit c) { return MonotoneCircuitInstance(std::move(c)); }

// ---------------------------------------------------------------------------
// File formats.

/// "p graph N M" then M lines "e u v". Lines starting with 'c' are comments.
Graph read_graph(std::istream& in);
/// "p dnf N M" then M terms, each a line of signed ints terminated by 0.
DnfFormula read_dnf(std::istream& in);
/// Standard DIMACS "p cnf N M".
CnfFormula read_cnf(std::istream& in);
/// "input k" lines, then "gate g AND a b" / "gate g OR a b", then "output g".
MonotoneCircuit read_monotone(std::istream& in);

void write_graph(std::ostream& out, const Graph& g);
void write_dnf(std::ostream& out, const DnfFormula& phi);
void write_cnf(std::ostream& out, const CnfFormula& phi);
void write_monotone(std::ostream& out, const MonotoneCircuit& c);

/// Problem kinds accepted on the command line.
enum class ProblemKind { kIndependentSet, kDnf, kCnf, kMonotone, kTree };

/// Calls f with the branching tree whose node count is the input's count:
/// the machine tree for graphs, DNFs and monotone circuits, the tree itself
/// for explicit trees. CNF counting has no TotP route: UnsupportedFamilyError.
template <typename F>
decltype(auto) with_branching_tree(const ProblemInput& input, F&& f) {
  return std::visit(
      [&](const auto& family) -> decltype(auto) {
        using T = std::decay_t<decltype(family)>;
        if constexpr (std::is_same_v<T, Graph>) {
          return f(build_branching_tree(is_instance(family)));
        } else if constexpr (std::is_same_v<T, DnfFormula>) {
          return f(build_branching_tree(dnf_instance(family)));
        } else if constexpr (std::is_same_v<T, MonotoneCircuit>) {
          return f(build_branching_tree(monotone_instance(family)));
        } else if constexpr (std::is_same_v<T, ExplicitTree>) {
          return f(family);
        } else {
          throw UnsupportedFamilyError(
              "counting CNF solutions has no TotP route; use capp/gapcsat, which count the complement");
          return f(ExplicitTree{});
        }
      },
      input);
}

ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(ProblemKind kind);
ProblemInput load_problem(ProblemKind kind, const std::string& path);

}  // namespace totp
