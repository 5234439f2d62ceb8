#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "totp/estimator.hpp"
#include "totp/problems.hpp"

namespace totp {

/// Additive error used when none is requested.
inline constexpr double kDefaultCappEpsilon = 1.0 / 6.0;

enum class CappRoute { kDirect, kComplement };
std::string to_string(CappRoute route);

struct CappResult {
  /// Estimate of Pr_x[C(x) = 1] over the 2^n input assignments, in [0,1].
  double p_hat = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  CappRoute route = CappRoute::kDirect;
  std::size_t variables = 0;
  /// Estimator run on the counted family (solutions, or non-solutions for
  /// the complement route).
  EstimateReport report;
};

/// A circuit prepared for repeated CAPP runs: the counted machine tree and a
/// lazily built sampler that is kept between runs (propagated laws stay cached).
class CappProblem {
 public:
  /// Throws UnsupportedFamilyError for graphs and explicit trees.
  explicit CappProblem(const ProblemInput& input);
  ~CappProblem();
  CappProblem(CappProblem&&) noexcept;
  CappProblem& operator=(CappProblem&&) noexcept;

  CappRoute route() const noexcept { return route_; }
  std::size_t variables() const noexcept { return variables_; }
  const BranchingTree& counted_tree() const { return *tree_; }

  CappResult estimate(double epsilon, const EstimatorConfig& base);

 private:
  CappRoute route_ = CappRoute::kDirect;
  std::size_t variables_ = 0;
  std::unique_ptr<BranchingTree> tree_;
  std::unique_ptr<RootHitSampler> sampler_;
  Backend sampler_backend_ = Backend::kAuto;
};

/// Circuit acceptance probability within +- epsilon w.p. 1 - delta.
/// DNF and monotone circuits are counted directly; a CNF is counted through
/// its De Morgan complement (p = 1 - q). Graphs and explicit trees are not
/// circuits and raise UnsupportedFamilyError. `base` supplies delta, seed and
/// chain settings; its xi is replaced.
CappResult capp(const ProblemInput& input, double epsilon, const EstimatorConfig& base);

enum class GapVerdict { kSatisfiable, kUnsatisfiable };
std::string to_string(GapVerdict verdict);

struct GapResult {
  GapVerdict verdict = GapVerdict::kUnsatisfiable;
  double rho = 0.0;
  CappResult capp;
};

/// Promise: the circuit has 0 or more than rho 2^n solutions. Runs capp with
/// epsilon = rho/2 and answers Satisfiable iff p_hat > rho/2. Outside the
/// promise the verdict carries no guarantee.
GapResult gap_csat(const ProblemInput& input, double rho, const EstimatorConfig& base);
GapResult gap_csat(CappProblem& problem, double rho, const EstimatorConfig& base);

}  // namespace totp
