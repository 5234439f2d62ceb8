#include <gtest/gtest.h>

#include <cmath>

#include "support/generators.hpp"
#include "totp/estimator.hpp"
#include "totp/kernel.hpp"
#include "totp/machine.hpp"
#include "totp/oracle.hpp"

namespace totp {
namespace {

Graph triangle() { return Graph{3, {{1, 2}, {2, 3}, {1, 3}}}; }

EstimatorConfig config(double xi, std::uint64_t seed, Backend backend = Backend::kPropagate) {
  EstimatorConfig c;
  c.xi = xi;
  c.delta = 0.1;
  c.seed = seed;
  c.chain.backend = backend;
  return c;
}

TEST(Telescoping, FullBinaryHeightTwo) {
  const ExplicitTree t = ExplicitTree::full_binary(2);
  std::vector<BigInt> inv;
  for (std::size_t k = 0; k <= 2; ++k) inv.push_back(normalizer_inverse(t.truncated(k)));
  EXPECT_EQ(inv, (std::vector<BigInt>{1, 4, 12}));
  EXPECT_EQ(inv[2] - inv[0] - inv[1], 7);
}

TEST(TelescopingProperty, IdentityAndLevelCounts) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const ExplicitTree t = testing::random_tree(rng, 1 + rng() % 10, 200);
    const std::size_t n = t.height();
    const auto levels = t.level_counts();
    std::vector<Rational> inv;
    for (std::size_t k = 0; k <= n; ++k) inv.push_back(1 / exact_alpha(t.truncated(k)));
    ASSERT_EQ(inv[0], 1);
    Rational total = inv[n];
    for (std::size_t k = 0; k < n; ++k) total -= inv[k];
    ASSERT_EQ(total, Rational(exact_size(t)));
    for (std::size_t k = 1; k <= n; ++k) ASSERT_EQ(inv[k] - 2 * inv[k - 1], Rational(levels[k]));
  }
}

TEST(Estimate, SingleNodeAndEmptyAreExact) {
  const EstimateReport single = estimate_size(ExplicitTree({NodePath{}}), config(0.1, 1));
  EXPECT_EQ(single.size_estimate, 1.0);
  ASSERT_TRUE(single.exact.has_value());
  EXPECT_EQ(*single.exact, 1);
  EXPECT_EQ(single.error_radius, 0.0);

  const EstimateReport none = estimate_size(ExplicitTree{}, config(0.1, 1));
  EXPECT_EQ(none.size_estimate, 0.0);
  EXPECT_EQ(estimate_fraction(ExplicitTree{}, config(0.1, 1)), 0.0);
}

TEST(Estimate, FullBinaryNearSeven) {
  const EstimateReport r = estimate_size(ExplicitTree::full_binary(2), config(0.1, 7, Backend::kSimulate));
  EXPECT_NEAR(r.size_estimate, 7.0, 0.1 * 4);
  EXPECT_EQ(r.per_depth.size(), 3U);
  EXPECT_EQ(r.per_depth[0].value, 1.0);
  EXPECT_GT(r.chain_steps, 0U);
}

TEST(Estimate, RejectsBadConfig) {
  const ExplicitTree t = ExplicitTree::full_binary(3);
  EXPECT_THROW(estimate_size(t, config(0.0, 1)), ParameterError);
  EXPECT_THROW(estimate_size(t, config(1.5, 1)), ParameterError);
  EstimatorConfig c = config(0.1, 1);
  c.delta = 1.0;
  EXPECT_THROW(estimate_size(t, c), ParameterError);
}

TEST(Estimate, SameSeedSameResult) {
  Rng rng(6);
  const ExplicitTree t = testing::random_tree(rng, 3, 10);
  const EstimateReport a = estimate_size(t, config(0.3, 5, Backend::kSimulate));
  const EstimateReport b = estimate_size(t, config(0.3, 5, Backend::kSimulate));
  EXPECT_EQ(a.size_estimate, b.size_estimate);
  EXPECT_EQ(a.chain_steps, b.chain_steps);
}

TEST(Estimate, ImplicitTreeOnPropagateBackend) {
  const DnfFormula phi{6, {{1, 2}, {-3}, {4, -5, 6}}};
  const auto tree = build_branching_tree(dnf_instance(phi));
  const double truth = count_sat(phi).convert_to<double>();
  const EstimateReport r = estimate_size(tree, config(0.05, 3));
  EXPECT_NEAR(r.size_estimate, truth, 0.05 * 128);
}

TEST(CountUpTo, Examples) {
  const auto tree = build_branching_tree(is_instance(triangle()));
  const CountOutcome five = count_up_to(tree, 5);
  EXPECT_TRUE(five.exact());
  EXPECT_EQ(five.value, 3);
  const CountOutcome two = count_up_to(tree, 2);
  EXPECT_FALSE(two.exact());
  EXPECT_LE(two.visits, 3U);
  const CountOutcome none = count_up_to(ExplicitTree{}, 4);
  EXPECT_TRUE(none.exact());
  EXPECT_EQ(none.value, 0);
}

TEST(CountUpToProperty, AgreesWithSizeAndBoundsVisits) {
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    const ExplicitTree t = testing::random_tree(rng, 1 + rng() % 10, 150);
    const BigInt threshold = rng() % (t.size() + 5);
    const CountOutcome c = count_up_to(t, threshold);
    ASSERT_EQ(c.exact(), BigInt(t.size()) <= threshold);
    if (c.exact()) ASSERT_EQ(c.value, t.size());
    ASSERT_LE(BigInt(c.visits), threshold + 1);
  }
}

TEST(AbsoluteError, RadiusFormula) {
  const ExplicitTree t = ExplicitTree::full_binary(4);
  const EstimateReport whole = absolute_error_estimate(t, 16.0, config(1.0, 1));
  EXPECT_DOUBLE_EQ(whole.xi, 1.0);
  EXPECT_DOUBLE_EQ(whole.error_radius, 16.0);
  const EstimateReport one = absolute_error_estimate(t, 1.0, config(1.0, 1));
  EXPECT_DOUBLE_EQ(one.xi, 0.25);
  EXPECT_DOUBLE_EQ(one.error_radius, 4.0);
  EXPECT_THROW(absolute_error_estimate(t, 0.5, config(1.0, 1)), ParameterError);
  EXPECT_THROW(absolute_error_estimate(t, 17.0, config(1.0, 1)), ParameterError);
}

TEST(AbsoluteError, TwentyLevelFormula) {
  const double n = 20, s = std::ldexp(1.0, 10);
  const double xi = std::sqrt(s / std::ldexp(1.0, 20));
  EXPECT_DOUBLE_EQ(xi, std::ldexp(1.0, -5));
  EXPECT_DOUBLE_EQ(std::ldexp(std::sqrt(s), static_cast<int>(n / 2)), std::ldexp(1.0, 15));
}

TEST(Ras, TriangleTakesExactBranch) {
  const auto tree = build_branching_tree(is_instance(triangle()));
  const RasReport r = ras(tree, 2.0, 0.5, config(1.0, 1));
  EXPECT_TRUE(r.exact_branch);
  EXPECT_GE(r.threshold, 8);
  ASSERT_TRUE(r.estimate.exact.has_value());
  EXPECT_EQ(*r.estimate.exact, 3);
  EXPECT_THROW(ras(tree, 0.5, 0.5, config(1.0, 1)), ParameterError);
  EXPECT_THROW(ras(tree, 2.0, 1.0, config(1.0, 1)), ParameterError);
}

TEST(Ras, EmptyInstanceIsZero) {
  const RasReport r = ras(ExplicitTree{}, 3.0, 0.5, config(1.0, 1));
  EXPECT_TRUE(r.exact_branch);
  EXPECT_EQ(r.estimate.size_estimate, 0.0);
}

}  // namespace
}  // namespace totp
