#include <gtest/gtest.h>

#include <cmath>

#include "support/generators.hpp"
#include "totp/chain.hpp"
#include "totp/kernel.hpp"
#include "totp/oracle.hpp"

namespace totp {
namespace {

ExplicitTree chain3() { return ExplicitTree({NodePath{}, NodePath::parse("1"), NodePath::parse("11")}); }

TEST(Kernel, LazyStepFrequencies) {
  const ExplicitTree t = ExplicitTree::full_binary(2);
  const NodePath start = NodePath::parse("0");
  Rng rng(5);
  std::map<NodePath, int> hits;
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) ++hits[lazy_step(t, start, rng)];
  const double tol = 0.005;
  EXPECT_NEAR(hits[start] / double(draws), 0.5, tol);
  EXPECT_NEAR(hits[NodePath{}] / double(draws), 0.25, tol);
  EXPECT_NEAR(hits[NodePath::parse("00")] / double(draws), 0.125, tol);
  EXPECT_NEAR(hits[NodePath::parse("01")] / double(draws), 0.125, tol);
}

TEST(Kernel, MissingMovesStayPut) {
  const auto p = lazy_transition_matrix<Rational>(chain3());
  EXPECT_EQ(p(0, 0), Rational(7, 8));
  EXPECT_EQ(p(0, 1), Rational(1, 8));
  EXPECT_EQ(p(1, 1), Rational(5, 8));
  EXPECT_EQ(p(2, 2), Rational(3, 4));
  for (Eigen::Index i = 0; i < p.rows(); ++i) EXPECT_EQ(p.row(i).sum(), Rational(1));
}

TEST(Kernel, BurnInFormula) {
  const double expected = std::ceil(2.0 * 16 * 100 * (std::log(10.0) + std::log(100.0)));
  EXPECT_EQ(burn_in_steps(9, 0.01, 2.0), static_cast<std::uint64_t>(expected));
  EXPECT_EQ(burn_in_steps(9, 0.01, 2.0), 22105U);
  EXPECT_EQ(burn_in_steps(0, 0.01, 2.0), 0U);
  EXPECT_THROW(burn_in_steps(3, 0.0), ParameterError);
  EXPECT_THROW(burn_in_steps(3, 1.5), ParameterError);
}

TEST(Kernel, SampleCounts) {
  EXPECT_EQ(alpha_samples(3, 0.5), 64U);
  EXPECT_EQ(alpha_repetitions(0.1), static_cast<std::uint64_t>(std::ceil(8 * std::log(10.0))));
  EXPECT_DOUBLE_EQ(default_tv_tolerance(3, 0.5), 0.5 / 32);
}

TEST(Stationary, Examples) {
  const auto full = stationary_exact(ExplicitTree::full_binary(2));
  EXPECT_EQ(exact_alpha(ExplicitTree::full_binary(2)), Rational(1, 12));
  EXPECT_EQ(full.at(NodePath{}), Rational(1, 3));
  EXPECT_EQ(full.at(NodePath::parse("1")), Rational(1, 6));
  EXPECT_EQ(full.at(NodePath::parse("01")), Rational(1, 12));

  const auto single = stationary_exact(ExplicitTree({NodePath{}}));
  EXPECT_EQ(single.at(NodePath{}), Rational(1));

  const auto chain = stationary_exact(chain3());
  EXPECT_EQ(chain.at(NodePath{}), Rational(4, 7));
  EXPECT_EQ(chain.at(NodePath::parse("1")), Rational(2, 7));
  EXPECT_EQ(chain.at(NodePath::parse("11")), Rational(1, 7));

  EXPECT_THROW(stationary_exact(ExplicitTree{}), ParameterError);
}

TEST(StationaryProperty, BalanceAndReversibility) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const ExplicitTree t = testing::random_tree(rng, 1 + rng() % 8, 60);
    const auto p = lazy_transition_matrix<Rational>(t);
    const auto pi = stationary_row<Rational>(t);
    ASSERT_EQ(pi.sum(), Rational(1));
    const RowVector<Rational> moved = pi * p;
    ASSERT_TRUE(moved == pi);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j) ASSERT_EQ(pi(i) * p(i, j), pi(j) * p(j, i));
  }
}

TEST(Sampling, SingleNodeAlwaysRoot) {
  const ExplicitTree t({NodePath{}});
  Rng rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(sample_stationary(t, ChainParams{}, rng).is_root());
}

TEST(Sampling, LongRunRootFrequency) {
  Rng rng(99);
  const ExplicitTree full = ExplicitTree::full_binary(2);
  const ExplicitTree chain = chain3();
  int full_root = 0, chain_root = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    full_root += sample_stationary(full, ChainParams{}, rng).is_root();
    chain_root += sample_stationary(chain, ChainParams{}, rng).is_root();
  }
  EXPECT_NEAR(full_root / double(draws), 1.0 / 3.0, 0.02);
  EXPECT_NEAR(chain_root / double(draws), 4.0 / 7.0, 0.02);
}

TEST(Alpha, FullBinaryWithinTolerance) {
  ChainParams params;
  params.backend = Backend::kSimulate;
  const AlphaEstimate a = estimate_alpha(ExplicitTree::full_binary(2), 0.1, 0.1, params, 42);
  EXPECT_GE(a.value, (1.0 - 0.1) / 12.0);
  EXPECT_LE(a.value, (1.0 + 0.1) / 12.0);
  EXPECT_EQ(a.samples, alpha_samples(2, 0.1));
  EXPECT_GT(a.chain_steps, 0U);
}

TEST(Alpha, RejectsBadParameters) {
  const ExplicitTree t = ExplicitTree::full_binary(2);
  EXPECT_THROW(estimate_alpha(t, 0.0, 0.1, ChainParams{}, 1), ParameterError);
  EXPECT_THROW(estimate_alpha(t, 0.5, 1.0, ChainParams{}, 1), ParameterError);
}

TEST(Backends, PropagatedLawMatchesDenseKernel) {
  Rng rng(8);
  const ExplicitTree t = testing::random_tree(rng, 5, 25);
  PropagatedSampler sampler(t);
  const auto p = lazy_transition_matrix<double>(t);
  for (std::size_t depth : {std::size_t{2}, std::size_t{5}}) {
    const ExplicitTree cut = t.truncated(depth);
    const auto pc = lazy_transition_matrix<double>(cut);
    RowVector<double> law = RowVector<double>::Zero(pc.cols());
    law(0) = 1.0;
    for (int s = 0; s < 37; ++s) law = law * pc;
    EXPECT_NEAR(sampler.root_probability(depth, 37), law(0), 1e-12);
  }
  EXPECT_EQ(p.rows(), static_cast<Eigen::Index>(t.size()));
}

TEST(Backends, SimulationMatchesPropagatedLaw) {
  Rng rng(4);
  const ExplicitTree t = testing::random_tree(rng, 4, 14);
  ExplicitChainSampler sim(t);
  PropagatedSampler prop(t);
  const std::uint64_t samples = 200000;
  const double q = prop.root_probability(4, 25);
  const double hits = static_cast<double>(sim.root_hits(4, 25, samples, 77, 1));
  const double sd = std::sqrt(q * (1 - q) / samples);
  EXPECT_NEAR(hits / samples, q, 5 * sd);
  EXPECT_EQ(sim.executed_steps(), 25 * samples);
}

TEST(Backends, OracleAndTableSimulationAgreeExactly) {
  Rng rng(12);
  const ExplicitTree t = testing::random_tree(rng, 5, 30);
  ExplicitChainSampler table(t);
  OracleChainSampler oracle(t);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng a = Rng::stream(s, {1}), b = Rng::stream(s, {1});
    ASSERT_EQ(t.path(table.run(5, 60, a)), oracle.run(5, 60, b));
  }
}

TEST(Backends, WorkerCountDoesNotChangeResults) {
  Rng rng(21);
  const ExplicitTree t = testing::random_tree(rng, 6, 40);
  ExplicitChainSampler a(t), b(t);
  EXPECT_EQ(a.root_hits(6, 200, 5000, 9, 1), b.root_hits(6, 200, 5000, 9, 3));
}

}  // namespace
}  // namespace totp
