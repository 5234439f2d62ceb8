#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "totp/common.hpp"
#include "totp/tree.hpp"

namespace totp {

// One step of a self-reducible instance's machine.
struct Halt {};

template <typename State>
struct Advance {
  State next;
};

template <typename State>
struct Branch {
  State if_zero;
  State if_one;
};

template <typename State>
using StepOutcome = std::variant<Halt, Advance<State>, Branch<State>>;

/// A problem-specific state machine with an easy decision version.
///
/// `decide(s)` tells whether the subproblem at `s` has at least one solution,
/// `step(s)` emits Branch only when both successors decide true,
/// `depth_bound()` is n' (nondeterministic bits including the synthetic final
/// branching) and `step_budget()` caps the steps taken along any path.
template <typename P>
concept SelfReducible = requires(const P& p, const typename P::State& s) {
  { p.initial() } -> std::convertible_to<typename P::State>;
  { p.step(s) } -> std::same_as<StepOutcome<typename P::State>>;
  { p.decide(s) } -> std::convertible_to<bool>;
  { p.depth_bound() } -> std::convertible_to<std::size_t>;
  { p.step_budget() } -> std::convertible_to<std::size_t>;
};

/// Branch when both sides have solutions, otherwise move to the one that has,
/// otherwise halt.
template <typename P, typename State>
StepOutcome<State> binary_split(const P& problem, State if_zero, State if_one) {
  const bool zero = problem.decide(if_zero);
  const bool one = problem.decide(if_one);
  if (zero && one) {
    return Branch<State>{std::move(if_zero), std::move(if_one)};
  }
  if (zero) {
    return Advance<State>{std::move(if_zero)};
  }
  if (one) {
    return Advance<State>{std::move(if_one)};
  }
  return Halt{};
}

/// Branching tree of the wrapped machine M': the instance's machine with one
/// extra branching (two halting children) at the end of the rightmost path,
/// i.e. the path that takes choice 1 at every branching. Its node count is
/// exactly f(x). Every oracle call replays the machine from the initial state.
template <SelfReducible P>
class MachineTree final : public BranchingTree {
 public:
  using State = typename P::State;

  explicit MachineTree(P problem) : problem_(std::move(problem)) {
    empty_ = !problem_.decide(problem_.initial());
  }

  const P& problem() const noexcept { return problem_; }

  std::size_t height() const override { return problem_.depth_bound(); }
  bool empty() const override { return empty_; }

  ChildMask children(const NodePath& node) const override {
    Budget budget;
    Located here = locate(node, budget);
    if (here.synthetic) {
      return {};
    }
    ChildMask mask;
    for (unsigned b = 0; b < 2; ++b) {
      Budget child_budget = budget;
      auto next = run_to_branch(b == 0 ? here.if_zero : here.if_one, here.rightmost && b == 1, child_budget);
      (b == 0 ? mask.left : mask.right) = next.has_value();
    }
    return mask;
  }

  /// Number of halting computation paths of M', by exhaustive replay.
  /// Equals f(x) + 1 for a well-formed instance; an empty instance halts
  /// immediately on its single path.
  BigInt count_computation_paths(std::uint64_t guard = 50'000'000) const {
    if (empty_) {
      return 1;
    }
    std::uint64_t visited = 0;
    BigInt paths = 0;
    struct Frame {
      State state;
      bool rightmost;
      Budget budget;
    };
    std::vector<Frame> stack{{problem_.initial(), true, Budget{}}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (++visited > guard) {
        throw GuardError("computation tree exceeds " + std::to_string(guard) + " branchings");
      }
      auto node = run_to_branch(std::move(f.state), f.rightmost, f.budget);
      if (!node) {
        paths += 1;
      } else if (node->synthetic) {
        paths += 2;
      } else {
        stack.push_back({std::move(node->if_zero), false, f.budget});
        stack.push_back({std::move(node->if_one), f.rightmost, f.budget});
      }
    }
    return paths;
  }

 private:
  struct Budget {
    std::size_t steps = 0;
    std::size_t branches = 0;
  };

  struct Located {
    State if_zero;
    State if_one;
    bool rightmost = false;
    bool synthetic = false;
  };

  // Runs deterministic steps from `s` until the next branching (a node of S)
  // or a halt. A halt on the rightmost path becomes the synthetic branching.
  std::optional<Located> run_to_branch(State s, bool rightmost, Budget& budget) const {
    for (;;) {
      if (++budget.steps > problem_.step_budget()) {
        throw MalformedInstanceError("instance exceeded its step budget of " +
                                     std::to_string(problem_.step_budget()));
      }
      StepOutcome<State> out = problem_.step(s);
      if (std::holds_alternative<Halt>(out)) {
        if (rightmost) {
          return Located{s, s, true, true};
        }
        return std::nullopt;
      }
      if (auto* adv = std::get_if<Advance<State>>(&out)) {
        s = std::move(adv->next);
        continue;
      }
      auto& br = std::get<Branch<State>>(out);
      if (++budget.branches > problem_.depth_bound()) {
        throw MalformedInstanceError("instance branched more than its depth bound " +
                                     std::to_string(problem_.depth_bound()));
      }
      if (!problem_.decide(br.if_zero) || !problem_.decide(br.if_one)) {
        throw MalformedInstanceError("instance branched into a subproblem without solutions");
      }
      return Located{std::move(br.if_zero), std::move(br.if_one), rightmost, false};
    }
  }

  Located locate(const NodePath& node, Budget& budget) const {
    if (empty_) {
      throw NotInTreeError("the branching tree is empty");
    }
    auto here = run_to_branch(problem_.initial(), true, budget);
    for (std::size_t i = 0; i < node.depth(); ++i) {
      if (!here || here->synthetic) {
        throw NotInTreeError("node " + node.to_string() + " is not a branching of the machine");
      }
      const unsigned b = node[i];
      here = run_to_branch(b == 0 ? std::move(here->if_zero) : std::move(here->if_one), here->rightmost && b == 1,
                           budget);
    }
    if (!here) {
      throw NotInTreeError("node " + node.to_string() + " is not a branching of the machine");
    }
    return std::move(*here);
  }

  P problem_;
  bool empty_ = false;
};

template <SelfReducible P>
MachineTree<P> build_branching_tree(P problem) {
  return MachineTree<P>(std::move(problem));
}

}  // namespace totp
