#include "totp/capp.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "totp/machine.hpp"

namespace totp {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("epsilon must lie in (0,1)");
  }
}

}  // namespace

std::string to_string(CappRoute route) { return route == CappRoute::kDirect ? "direct" : "complement"; }

std::string to_string(GapVerdict verdict) {
  return verdict == GapVerdict::kSatisfiable ? "Satisfiable" : "Unsatisfiable";
}

CappProblem::CappProblem(const ProblemInput& input) {
  std::visit(
      [&](const auto& family) {
        using T = std::decay_t<decltype(family)>;
        if constexpr (std::is_same_v<T, DnfFormula>) {
          route_ = CappRoute::kDirect;
          variables_ = family.variables;
          tree_ = std::make_unique<MachineTree<DnfInstance>>(dnf_instance(family));
        } else if constexpr (std::is_same_v<T, MonotoneCircuit>) {
          route_ = CappRoute::kDirect;
          variables_ = family.inputs;
          tree_ = std::make_unique<MachineTree<MonotoneCircuitInstance>>(monotone_instance(family));
        } else if constexpr (std::is_same_v<T, CnfFormula>) {
          route_ = CappRoute::kComplement;
          variables_ = family.variables;
          tree_ = std::make_unique<MachineTree<DnfInstance>>(dnf_instance(cnf_complement(family)));
        } else if constexpr (std::is_same_v<T, Graph>) {
          throw UnsupportedFamilyError("CAPP needs a circuit family; a graph is not one");
        } else {
          throw UnsupportedFamilyError("CAPP needs a circuit family; an explicit tree is not one");
        }
      },
      input);
}

CappProblem::~CappProblem() = default;
CappProblem::CappProblem(CappProblem&&) noexcept = default;
CappProblem& CappProblem::operator=(CappProblem&&) noexcept = default;

CappResult CappProblem::estimate(double epsilon, const EstimatorConfig& base) {
  check_epsilon(epsilon);
  CappResult out;
  out.epsilon = epsilon;
  out.delta = base.delta;
  out.route = route_;
  out.variables = variables_;

  // The machine tree has height n' = n + 1, so fractions of 2^n' are
  // rescaled to the 2^n input assignments.
  const int extra = static_cast<int>(tree_->height() - variables_);
  EstimatorConfig config = base;
  config.xi = std::ldexp(epsilon, -extra);
  config.validate();
  if (tree_->empty() || tree_->height() <= 1) {
    out.report = estimate_size(*tree_, config);
  } else {
    if (!sampler_ || sampler_backend_ != config.chain.backend) {
      sampler_ = make_sampler(*tree_, config.chain.backend);
      sampler_backend_ = config.chain.backend;
    }
    out.report = estimate_size(*tree_, config, *sampler_);
  }
  const double fraction = std::clamp(std::ldexp(out.report.fraction, extra), 0.0, 1.0);
  out.p_hat = route_ == CappRoute::kDirect ? fraction : 1.0 - fraction;
  return out;
}

CappResult capp(const ProblemInput& input, double epsilon, const EstimatorConfig& base) {
  check_epsilon(epsilon);
  CappProblem problem(input);
  return problem.estimate(epsilon, base);
}

GapResult gap_csat(CappProblem& problem, double rho, const EstimatorConfig& base) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ParameterError("rho must lie in (0,1]");
  }
  GapResult out;
  out.rho = rho;
  out.capp = problem.estimate(rho / 2.0, base);
  out.verdict = out.capp.p_hat > rho / 2.0 ? GapVerdict::kSatisfiable : GapVerdict::kUnsatisfiable;
  return out;
}

GapResult gap_csat(const ProblemInput& input, double rho, const EstimatorConfig& base) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ParameterError("rho must lie in (0,1]");
  }
  CappProblem problem(input);
  return gap_csat(problem, rho, base);
}

}  // namespace totp
