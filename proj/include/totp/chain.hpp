#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "totp/common.hpp"
#include "totp/rng.hpp"
#include "totp/tree.hpp"

namespace totp {

/// How root hits are drawn.
///   kSimulate  - run every lazy chain step by step (any tree).
///   kPropagate - compute the exact law after T steps from the root and draw
///                the root-hit count from the matching binomial. Same output
///                distribution as kSimulate; needs a materializable tree.
///   kAuto      - kPropagate when the tree materializes within
///                kAutoPropagateNodes nodes, kSimulate otherwise.
enum class Backend { kSimulate, kPropagate, kAuto };

inline constexpr std::size_t kAutoPropagateNodes = 1U << 14;

Backend parse_backend(const std::string& name);
std::string to_string(Backend backend);

struct ChainParams {
  /// Total-variation deviation from stationarity. Unset means
  /// zeta / (8(n+1)) inside alpha estimation.
  std::optional<double> tv_tolerance;
  /// Constant C of the burn-in bound.
  double burn_in_constant = 2.0;
  /// Worker threads for independent restarts. Results do not depend on it.
  unsigned workers = 1;
  Backend backend = Backend::kAuto;

  void validate() const;
};

struct AlphaEstimate {
  std::size_t height = 0;
  double value = 1.0;
  double zeta = 0.0;
  double confidence = 1.0;
  std::uint64_t samples = 0;
  std::uint64_t repetitions = 0;
  std::uint64_t burn_in = 0;
  /// Median root-hit fraction, the estimate of pi(root).
  double root_hit_fraction = 1.0;
  std::uint64_t chain_steps = 0;
};

/// One step of the lazy chain: stay 1/2, parent 1/4, each child 1/8; moves to
/// a missing neighbour stay put.
NodePath lazy_step(const BranchingTree& tree, const NodePath& node, Rng& rng);

/// ceil(C * 16(n+1)^2 * (ln(n+1) + ln(1/eps))); 0 for n = 0.
std::uint64_t burn_in_steps(std::size_t height, double tv_tolerance, double burn_in_constant = 2.0);

/// m = ceil(4(n+1) / zeta^2) samples per repetition.
std::uint64_t alpha_samples(std::size_t height, double zeta);
/// t = ceil(8 ln(1/delta)) repetitions for the median.
std::uint64_t alpha_repetitions(double delta);
/// zeta / (8(n+1)).
double default_tv_tolerance(std::size_t height, double zeta);

/// Draws one node approximately from pi: burn_in_steps lazy steps from the
/// root. Uses params.tv_tolerance, or 0.01 when unset.
NodePath sample_stationary(const BranchingTree& tree, const ChainParams& params, Rng& rng);

/// Source of root-hit counts for a fixed tree S and its truncations S_d.
class RootHitSampler {
 public:
  virtual ~RootHitSampler() = default;

  virtual std::size_t height() const = 0;
  /// Of `samples` independent lazy chains run `steps` steps from the root of
  /// S_depth, how many end at the root. Sample j uses stream (stream, j).
  virtual std::uint64_t root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples,
                                  std::uint64_t stream, unsigned workers) = 0;
  /// Lazy-chain transitions actually executed so far.
  virtual std::uint64_t executed_steps() const = 0;
};

/// Table-driven simulation on an explicit tree.
class ExplicitChainSampler final : public RootHitSampler {
 public:
  explicit ExplicitChainSampler(const ExplicitTree& tree);

  std::size_t height() const override { return tree_->height(); }
  std::uint64_t root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples, std::uint64_t stream,
                          unsigned workers) override;
  std::uint64_t executed_steps() const override { return executed_; }

  /// Final node index of one chain run on S_depth.
  ExplicitTree::Index run(std::size_t depth, std::uint64_t steps, Rng& rng);

 private:
  const std::vector<std::uint32_t>& table(std::size_t depth);

  const ExplicitTree* tree_;
  std::map<std::size_t, std::vector<std::uint32_t>> tables_;
  std::uint64_t executed_ = 0;
};

/// Simulation through the children oracle of any branching tree.
class OracleChainSampler final : public RootHitSampler {
 public:
  explicit OracleChainSampler(const BranchingTree& tree) : tree_(&tree) {}

  std::size_t height() const override { return tree_->height(); }
  std::uint64_t root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples, std::uint64_t stream,
                          unsigned workers) override;
  std::uint64_t executed_steps() const override { return executed_; }

  NodePath run(std::size_t depth, std::uint64_t steps, Rng& rng) const;

 private:
  const BranchingTree* tree_;
  std::uint64_t executed_ = 0;
};

/// Exact T-step law from the root (sparse propagation), then one binomial
/// draw per repetition. Laws are cached per (depth, steps), so one sampler
/// can serve many seeded runs on the same tree.
class PropagatedSampler final : public RootHitSampler {
 public:
  explicit PropagatedSampler(ExplicitTree tree);

  std::size_t height() const override { return tree_.height(); }
  std::uint64_t root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples, std::uint64_t stream,
                          unsigned workers) override;
  std::uint64_t executed_steps() const override { return 0; }

  /// P[chain on S_depth is at the root after `steps` steps].
  double root_probability(std::size_t depth, std::uint64_t steps);

 private:
  ExplicitTree tree_;
  std::map<std::pair<std::size_t, std::uint64_t>, double> cache_;
};

/// Sampler for `tree` on the requested backend. Truncated views of explicit
/// trees are unwrapped; kPropagate materializes implicit trees (up to
/// `node_guard` nodes). The sampler may reference `tree`.
std::unique_ptr<RootHitSampler> make_sampler(const BranchingTree& tree, Backend backend,
                                             std::size_t node_guard = 1'000'000);

/// Estimate of alpha_{S_depth} within (1 +- zeta) with probability 1 - delta:
/// median over t repetitions of the root-hit fraction of m independent
/// restarts, times 2^-depth.
AlphaEstimate estimate_alpha(RootHitSampler& sampler, std::size_t depth, double zeta, double delta,
                             const ChainParams& params, std::uint64_t seed);

/// Same, on the whole tree (depth = tree.height()).
AlphaEstimate estimate_alpha(const BranchingTree& tree, double zeta, double delta, const ChainParams& params,
                             std::uint64_t seed);

/// pi(i) = alpha 2^(n - d_i), exactly.
std::map<NodePath, Rational> stationary_exact(const ExplicitTree& tree);

}  // namespace totp
