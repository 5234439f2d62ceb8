#pragma once

#include <cstddef>
#include <map>
#include <variant>
#include <vector>

#include "totp/common.hpp"
#include "totp/problems.hpp"
#include "totp/tree.hpp"

namespace totp {

/// Enumeration guards; exceeding one is a GuardError, never an approximation.
inline constexpr std::size_t kMaxEnumerationVariables = 25;
inline constexpr std::size_t kMaxConductanceNodes = 18;
inline constexpr std::size_t kMaxMaterializedNodes = 1'000'000;

/// Number of nonempty independent sets, by subset enumeration (N <= 25).
BigInt count_independent_sets(const Graph& g);

/// Satisfying assignments by full enumeration (n <= 25).
BigInt count_sat(const DnfFormula& phi);
BigInt count_sat(const CnfFormula& phi);
BigInt count_sat(const MonotoneCircuit& c);

/// Exhaustive DFS over the children oracle (at most 10^6 nodes).
inline ExplicitTree materialize_tree(const BranchingTree& tree) { return materialize(tree, kMaxMaterializedNodes); }

/// (1/2) sum |empirical - exact| over the union of both supports.
double tv_distance(const std::map<NodePath, double>& empirical, const std::map<NodePath, Rational>& exact);

struct ConductanceReport {
  /// min over Y with 0 < pi(Y) <= 1/2 of (boundary weight) / pi(Y).
  Rational phi;
  std::vector<NodePath> minimizer;
  /// 1 / (4(n+1)).
  Rational bound;
  bool bound_holds = false;
};

/// Exact conductance of the lazy chain with weights w_uv = pi_u p_uv, by
/// enumerating all node subsets (at most 18 nodes).
ConductanceReport exact_conductance(const ExplicitTree& tree);

}  // namespace totp
