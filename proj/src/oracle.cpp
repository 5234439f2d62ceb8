#include "totp/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace totp {

namespace {

void guard_variables(std::size_t n) {
  if (n > kMaxEnumerationVariables) {
    throw GuardError("enumeration over " + std::to_string(n) + " variables exceeds the guard of " +
                     std::to_string(kMaxEnumerationVariables));
  }
}

bool literal_true(Literal l, std::uint64_t assignment) {
  const bool value = ((assignment >> (std::abs(l) - 1)) & 1U) != 0;
  return l > 0 ? value : !value;
}

template <typename Pred>
BigInt count_assignments(std::size_t n, Pred satisfied) {
  guard_variables(n);
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < total; ++a) {
    count += satisfied(a) ? 1 : 0;
  }
  return BigInt(count);
}

}  // namespace

BigInt count_independent_sets(const Graph& g) {
  g.validate();
  guard_variables(g.vertices);
  std::vector<std::uint32_t> adjacent(g.vertices, 0);
  for (auto [u, v] : g.edges) {
    adjacent[u - 1] |= 1U << (v - 1);
    adjacent[v - 1] |= 1U << (u - 1);
  }
  std::uint64_t count = 0;
  const std::uint32_t total = std::uint32_t{1} << g.vertices;
  for (std::uint32_t set = 1; set < total; ++set) {
    bool independent = true;
    for (std::uint32_t rest = set; rest != 0 && independent; rest &= rest - 1) {
      const auto v = static_cast<unsigned>(__builtin_ctz(rest));
      independent = (adjacent[v] & set) == 0;
    }
    count += independent ? 1 : 0;
  }
  return BigInt(count);
}

BigInt count_sat(const DnfFormula& phi) {
  phi.validate();
  return count_assignments(phi.variables, [&](std::uint64_t a) {
    for (const auto& term : phi.terms) {
      bool all = true;
      for (Literal l : term) {
        all = all && literal_true(l, a);
      }
      if (all) {
        return true;
      }
    }
    return false;
  });
}

BigInt count_sat(const CnfFormula& phi) {
  phi.validate();
  return count_assignments(phi.variables, [&](std::uint64_t a) {
    for (const auto& clause : phi.clauses) {
      bool any = false;
      for (Literal l : clause) {
        any = any || literal_true(l, a);
      }
      if (!any) {
        return false;
      }
    }
    return true;
  });
}

BigInt count_sat(const MonotoneCircuit& c) {
  c.validate();
  boost::dynamic_bitset<> bits(c.inputs);
  return count_assignments(c.inputs, [&](std::uint64_t a) {
    for (std::size_t i = 0; i < c.inputs; ++i) {
      bits[i] = ((a >> i) & 1U) != 0;
    }
    return c.evaluate(bits);
  });
}

double tv_distance(const std::map<NodePath, double>& empirical, const std::map<NodePath, Rational>& exact) {
  long double total = 0.0L;
  for (const auto& [node, p] : empirical) {
    auto it = exact.find(node);
    const double q = it == exact.end() ? 0.0 : it->second.convert_to<double>();
    total += std::fabs(static_cast<long double>(p) - q);
  }
  for (const auto& [node, q] : exact) {
    if (empirical.find(node) == empirical.end()) {
      total += std::fabs(q.convert_to<long double>());
    }
  }
  return static_cast<double>(total / 2.0L);
}

ConductanceReport exact_conductance(const ExplicitTree& tree) {
  if (tree.empty()) {
    throw ParameterError("conductance is undefined on the empty tree");
  }
  if (tree.size() > kMaxConductanceNodes) {
    throw GuardError("conductance enumeration over " + std::to_string(tree.size()) + " nodes exceeds the guard of " +
                     std::to_string(kMaxConductanceNodes));
  }
  if (tree.size() == 1) {
    throw ParameterError("conductance is undefined on a single node: no set has stationary mass <= 1/2");
  }
  // Units of alpha 2^(n-D) / 8, D the deepest node: pi_u = 8 * 2^(D-d_u);
  // the edge from parent u to child v carries w = pi_u / 8 = pi_v / 4 =
  // 2^(D-d_u). The ratio is unit-free.
  const std::size_t k = tree.size();
  const std::size_t n = tree.depth(static_cast<ExplicitTree::Index>(k - 1));
  std::vector<std::uint64_t> mass(k);
  std::uint64_t total = 0;
  for (ExplicitTree::Index u = 0; u < k; ++u) {
    mass[u] = std::uint64_t{8} << (n - tree.depth(u));
    total += mass[u];
  }
  struct Edge {
    std::uint32_t child_bit;
    std::uint32_t parent_bit;
    std::uint64_t weight;
  };
  std::vector<Edge> edges;
  for (ExplicitTree::Index v = 1; v < k; ++v) {
    const ExplicitTree::Index u = tree.parent(v);
    edges.push_back({1U << v, 1U << u, std::uint64_t{1} << (n - tree.depth(u))});
  }

  const std::uint32_t subsets = std::uint32_t{1} << k;
  std::vector<std::uint64_t> subset_mass(subsets, 0);
  std::uint64_t best_cut = 0;
  std::uint64_t best_mass = 0;
  std::uint32_t best_set = 0;
  for (std::uint32_t y = 1; y < subsets; ++y) {
    const auto low = static_cast<unsigned>(__builtin_ctz(y));
    subset_mass[y] = subset_mass[y & (y - 1)] + mass[low];
    if (2 * subset_mass[y] > total) {
      continue;
    }
    std::uint64_t cut = 0;
    for (const Edge& e : edges) {
      if (((y & e.child_bit) != 0) != ((y & e.parent_bit) != 0)) {
        cut += e.weight;
      }
    }
    if (best_set == 0 || cut * best_mass < best_cut * subset_mass[y]) {
      best_cut = cut;
      best_mass = subset_mass[y];
      best_set = y;
    }
  }

  ConductanceReport r;
  r.phi = Rational(BigInt(best_cut), BigInt(best_mass));
  for (ExplicitTree::Index u = 0; u < k; ++u) {
    if ((best_set >> u) & 1U) {
      r.minimizer.push_back(tree.path(u));
    }
  }
  r.bound = Rational(BigInt(1), BigInt(4 * (tree.height() + 1)));
  r.bound_holds = r.phi >= r.bound;
  return r;
}

}  // namespace totp
