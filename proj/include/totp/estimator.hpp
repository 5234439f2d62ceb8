#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "totp/chain.hpp"
#include "totp/common.hpp"
#include "totp/tree.hpp"

namespace totp {

/// Heights above this are rejected: 2^n would overflow the double-precision
/// estimates long before any run could finish.
inline constexpr std::size_t kMaxHeight = 500;

struct EstimatorConfig {
  /// Additive error target xi in (0,1]: the guarantee is |S| +- xi 2^n.
  double xi = 0.1;
  /// Overall failure probability in (0,1), split evenly across depths.
  double delta = 0.1;
  ChainParams chain;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EstimateReport {
  std::size_t height = 0;
  double xi = 0.0;
  double delta = 0.0;
  /// Raw 1/alpha_n - sum 1/alpha_k; may be negative or above 2^n.
  double size_estimate = 0.0;
  /// size_estimate rounded and clamped to [0, 2^(n+1) - 1].
  BigInt rounded_estimate = 0;
  /// size_estimate / 2^n (unclamped).
  double fraction = 0.0;
  /// xi * 2^n, or 0 when the value is exact.
  double error_radius = 0.0;
  /// Set when the value was obtained without sampling.
  std::optional<BigInt> exact;
  /// alpha estimates for S_0..S_n (empty when exact).
  std::vector<AlphaEstimate> per_depth;
  std::uint64_t chain_steps = 0;
  double wall_seconds = 0.0;

  /// fraction clamped to [0,1].
  double clamped_fraction() const;
};

/// |S| up to +- xi 2^n with probability 1 - delta, via the telescoping
/// identity |S| = 1/alpha_{S_n} - sum_{k<n} 1/alpha_{S_k}. Each alpha is
/// estimated within 1 +- zeta/(1+zeta), zeta = xi / (2(n+1)), with failure
/// delta/(n+1). The empty tree yields exactly 0 and height 0 exactly 1.
EstimateReport estimate_size(const BranchingTree& tree, const EstimatorConfig& config);

/// Core of estimate_size over an existing sampler (lets callers reuse a
/// PropagatedSampler's cached laws across seeded runs).
EstimateReport estimate_size(RootHitSampler& sampler, const EstimatorConfig& config);

/// Same as estimate_size(tree, config), drawing from a caller-owned sampler
/// built for `tree` (config.chain.backend is then ignored).
EstimateReport estimate_size(const BranchingTree& tree, const EstimatorConfig& config, RootHitSampler& sampler);

/// p = |S| / 2^n within +- xi with probability 1 - delta, clamped to [0,1].
double estimate_fraction(const BranchingTree& tree, const EstimatorConfig& config);

struct CountOutcome {
  enum class Kind { kExact, kExceeds };
  Kind kind = Kind::kExact;
  /// The count when kExact.
  BigInt value = 0;
  BigInt threshold = 0;
  /// Nodes visited by the search (never above threshold + 1).
  std::uint64_t visits = 0;

  bool exact() const noexcept { return kind == Kind::kExact; }
};

/// Depth-first count of S that stops as soon as threshold + 1 nodes are seen.
CountOutcome count_up_to(const BranchingTree& tree, const BigInt& threshold);

/// Estimate with absolute error 2^(n/2) s^(1/2): estimate_size with
/// xi = sqrt(s / 2^n). Requires 1 <= s <= 2^n.
EstimateReport absolute_error_estimate(const BranchingTree& tree, double s, const EstimatorConfig& base,
                                       RootHitSampler* sampler = nullptr);

struct RasReport {
  /// Exact count or estimator output.
  EstimateReport estimate;
  double k = 1.0;
  double beta = 0.5;
  /// ceil(k 2^(n/2) s^(1/2)) with s = 2^(beta n).
  BigInt threshold = 0;
  bool exact_branch = false;
};

/// f(1 +- 1/k): exact count when f <= threshold, otherwise the absolute-error
/// estimate with s = 2^(beta n), whose radius is below f/k.
/// A non-null `sampler` (built for `tree`) is used by the estimator branch.
RasReport ras(const BranchingTree& tree, double k, double beta, const EstimatorConfig& base,
              RootHitSampler* sampler = nullptr);

}  // namespace totp
