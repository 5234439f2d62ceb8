#include "totp/estimator.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace totp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EstimateReport exact_report(std::size_t height, const EstimatorConfig& config, const BigInt& value) {
  EstimateReport r;
  r.height = height;
  r.xi = config.xi;
  r.delta = config.delta;
  r.exact = value;
  r.rounded_estimate = value;
  r.size_estimate = value.convert_to<double>();
  r.fraction = std::ldexp(r.size_estimate, -static_cast<int>(height));
  return r;
}

BigInt round_and_clamp(double v, std::size_t height) {
  if (!(v > 0.0)) {
    return 0;
  }
  const BigInt upper = pow2(static_cast<unsigned>(height + 1)) - 1;
  BigInt rounded(std::floor(v + 0.5));
  return rounded > upper ? upper : rounded;
}

void check_height(std::size_t height) {
  if (height > kMaxHeight) {
    throw GuardError("tree height " + std::to_string(height) + " exceeds the supported maximum " +
                     std::to_string(kMaxHeight));
  }
}

}  // namespace

void EstimatorConfig::validate() const {
  if (!(xi > 0.0 && xi <= 1.0)) {
    throw ParameterError("xi must lie in (0,1], got " + std::to_string(xi));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("delta must lie in (0,1), got " + std::to_string(delta));
  }
  chain.validate();
}

double EstimateReport::clamped_fraction() const { return std::clamp(fraction, 0.0, 1.0); }

EstimateReport estimate_size(RootHitSampler& sampler, const EstimatorConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const std::size_t n = sampler.height();
  check_height(n);
  if (n == 0) {
    return exact_report(0, config, 1);
  }
  const double zeta = config.xi / (2.0 * (static_cast<double>(n) + 1.0));
  const double per_alpha = zeta / (1.0 + zeta);
  const double per_delta = config.delta / (static_cast<double>(n) + 1.0);

  EstimateReport r;
  r.height = n;
  r.xi = config.xi;
  r.delta = config.delta;
  r.per_depth.reserve(n + 1);
  r.per_depth.push_back(AlphaEstimate{});  // alpha_{S_0} = 1
  for (std::size_t i = 1; i <= n; ++i) {
    r.per_depth.push_back(estimate_alpha(sampler, i, per_alpha, per_delta, config.chain, config.seed));
    r.chain_steps += r.per_depth.back().chain_steps;
  }
  double lower_levels = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    lower_levels += 1.0 / r.per_depth[k].value;
  }
  r.size_estimate = 1.0 / r.per_depth[n].value - lower_levels;
  r.rounded_estimate = round_and_clamp(r.size_estimate, n);
  r.fraction = std::ldexp(r.size_estimate, -static_cast<int>(n));
  r.error_radius = std::ldexp(config.xi, static_cast<int>(n));
  r.wall_seconds = seconds_since(start);
  return r;
}

namespace {

std::optional<EstimateReport> trivial_report(const BranchingTree& tree, const EstimatorConfig& config) {
  config.validate();
  check_height(tree.height());
  if (tree.empty()) {
    return exact_report(tree.height(), config, 0);
  }
  if (tree.height() <= 1) {
    // At most three nodes; degenerate (n = 0) instances land here.
    return exact_report(tree.height(), config, count_up_to(tree, 3).value);
  }
  return std::nullopt;
}

}  // namespace

EstimateReport estimate_size(const BranchingTree& tree, const EstimatorConfig& config) {
  if (auto trivial = trivial_report(tree, config)) {
    return *trivial;
  }
  auto sampler = make_sampler(tree, config.chain.backend);
  return estimate_size(*sampler, config);
}

EstimateReport estimate_size(const BranchingTree& tree, const EstimatorConfig& config, RootHitSampler& sampler) {
  if (auto trivial = trivial_report(tree, config)) {
    return *trivial;
  }
  if (sampler.height() != tree.height()) {
    throw ParameterError("sampler height does not match the tree");
  }
  return estimate_size(sampler, config);
}

double estimate_fraction(const BranchingTree& tree, const EstimatorConfig& config) {
  return estimate_size(tree, config).clamped_fraction();
}

CountOutcome count_up_to(const BranchingTree& tree, const BigInt& threshold) {
  if (threshold < 0) {
    throw ParameterError("threshold must be nonnegative");
  }
  CountOutcome out;
  out.threshold = threshold;
  if (tree.empty()) {
    return out;
  }
  BigInt seen = 0;
  std::vector<NodePath> stack{NodePath{}};
  while (!stack.empty()) {
    NodePath node = std::move(stack.back());
    stack.pop_back();
    ++out.visits;
    seen += 1;
    if (seen > threshold) {
      out.kind = CountOutcome::Kind::kExceeds;
      out.value = 0;
      return out;
    }
    const ChildMask mask = tree.children(node);
    for (unsigned b = 0; b < 2; ++b) {
      if (mask.has(b)) {
        stack.push_back(node.child(b));
      }
    }
  }
  out.value = seen;
  return out;
}

EstimateReport absolute_error_estimate(const BranchingTree& tree, double s, const EstimatorConfig& base,
                                       RootHitSampler* sampler) {
  const std::size_t n = tree.height();
  check_height(n);
  const double full = std::ldexp(1.0, static_cast<int>(n));
  if (!(s >= 1.0 && s <= full)) {
    throw ParameterError("s must lie in [1, 2^n] = [1, " + std::to_string(full) + "], got " + std::to_string(s));
  }
  EstimatorConfig config = base;
  config.xi = std::sqrt(s / full);
  EstimateReport r = sampler != nullptr ? estimate_size(tree, config, *sampler) : estimate_size(tree, config);
  if (!r.exact) {
    r.error_radius = std::sqrt(full) * std::sqrt(s);
  }
  return r;
}

RasReport ras(const BranchingTree& tree, double k, double beta, const EstimatorConfig& base, RootHitSampler* sampler) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw ParameterError("k must be a finite real >= 1");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("beta must lie in (0,1)");
  }
  if (!(base.delta > 0.0 && base.delta < 1.0)) {
    throw ParameterError("delta must lie in (0,1)");
  }
  const auto start = Clock::now();
  const std::size_t n = tree.height();
  check_height(n);
  RasReport out;
  out.k = k;
  out.beta = beta;
  const double s = std::exp2(beta * static_cast<double>(n));
  // k 2^(n/2) s^(1/2) = k 2^(n(1+beta)/2)
  out.threshold = BigInt(std::ceil(k * std::exp2(static_cast<double>(n) * (1.0 + beta) / 2.0)));
  const CountOutcome counted = count_up_to(tree, out.threshold);
  if (counted.exact()) {
    out.exact_branch = true;
    out.estimate = exact_report(n, base, counted.value);
    out.estimate.wall_seconds = seconds_since(start);
    return out;
  }
  out.estimate = absolute_error_estimate(tree, s, base, sampler);
  out.estimate.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace totp
