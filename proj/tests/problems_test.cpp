#include <gtest/gtest.h>

#include <sstream>

#include "support/generators.hpp"
#include "totp/machine.hpp"
#include "totp/oracle.hpp"
#include "totp/problems.hpp"

namespace totp {
namespace {

Graph graph(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) { return Graph{n, std::move(edges)}; }

MonotoneCircuit gate2(MonotoneCircuit::Op op) { return MonotoneCircuit{2, {{op, 0, 1}}, 2}; }

template <typename P>
std::size_t tree_nodes(const P& instance) {
  return materialize(build_branching_tree(instance)).size();
}

TEST(MachineTree, DnfSingleVariable) {
  const DnfFormula phi{2, {{1}}};
  const auto tree = build_branching_tree(dnf_instance(phi));
  EXPECT_EQ(materialize(tree).size(), 2U);
  EXPECT_EQ(tree.count_computation_paths(), 3);
  EXPECT_EQ(tree.height(), 3U);
}

TEST(MachineTree, IsSingleEdge) {
  EXPECT_EQ(tree_nodes(is_instance(graph(2, {{1, 2}}))), 2U);
}

TEST(MachineTree, EmptyDnfIsEmptyTree) {
  const auto tree = build_branching_tree(dnf_instance(DnfFormula{3, {}}));
  EXPECT_TRUE(tree.empty());
  EXPECT_TRUE(materialize(tree).empty());
  EXPECT_EQ(tree.count_computation_paths(), 1);
}

TEST(MachineTree, PathGraphRootChildren) {
  const auto tree = build_branching_tree(is_instance(graph(3, {{1, 2}, {2, 3}})));
  EXPECT_EQ(materialize(tree).size(), 4U);
  EXPECT_GE(tree.children(NodePath{}).count(), 1U);
}

TEST(MachineTree, SingleSolutionIsSingleNode) {
  const auto tree = build_branching_tree(dnf_instance(DnfFormula{2, {{1, 2}}}));
  EXPECT_EQ(tree.children(NodePath{}).count(), 0U);
  EXPECT_EQ(materialize(tree).size(), 1U);
}

TEST(MachineTree, SyntheticLeavesHaveNoChildren) {
  const auto tree = build_branching_tree(monotone_instance(gate2(MonotoneCircuit::Op::kOr)));
  const ExplicitTree t = materialize(tree);
  for (const NodePath& p : t.paths()) {
    const ChildMask m = tree.children(p);
    if (m.count() == 0) {
      EXPECT_THROW(tree.children(p.child(0)), NotInTreeError);
      EXPECT_THROW(tree.children(p.child(1)), NotInTreeError);
    }
  }
}

// A machine that branches past its declared depth bound.
struct RunawayMachine {
  using State = int;
  State initial() const { return 0; }
  StepOutcome<State> step(const State& s) const { return Branch<State>{s + 1, s + 1}; }
  bool decide(const State&) const { return true; }
  std::size_t depth_bound() const { return 3; }
  std::uint64_t step_budget() const { return 100; }
};

TEST(MachineTree, DepthBoundViolationIsMalformed) {
  const auto tree = build_branching_tree(RunawayMachine{});
  EXPECT_THROW(materialize(tree), MalformedInstanceError);
}

TEST(Adapters, IndependentSetExamples) {
  EXPECT_EQ(count_independent_sets(graph(2, {{1, 2}})), 2);
  EXPECT_EQ(count_independent_sets(graph(3, {{1, 2}, {2, 3}, {1, 3}})), 3);
  EXPECT_EQ(count_independent_sets(graph(3, {{1, 2}, {2, 3}})), 4);
  EXPECT_EQ(tree_nodes(is_instance(graph(3, {{1, 2}, {2, 3}, {1, 3}}))), 3U);
  EXPECT_EQ(tree_nodes(is_instance(graph(1, {}))), 1U);
  EXPECT_EQ(tree_nodes(is_instance(graph(0, {}))), 0U);
}

TEST(Adapters, DnfExamples) {
  EXPECT_EQ(tree_nodes(dnf_instance(DnfFormula{2, {{1, 2}}})), 1U);
  EXPECT_EQ(tree_nodes(dnf_instance(DnfFormula{2, {{1}}})), 2U);
  EXPECT_EQ(tree_nodes(dnf_instance(DnfFormula{2, {}})), 0U);
}

TEST(Adapters, MonotoneExamples) {
  EXPECT_EQ(tree_nodes(monotone_instance(gate2(MonotoneCircuit::Op::kAnd))), 1U);
  EXPECT_EQ(tree_nodes(monotone_instance(gate2(MonotoneCircuit::Op::kOr))), 3U);
  EXPECT_THROW(MonotoneCircuit{}.validate(), ParseError);
}

TEST(Adapters, CnfComplementExamples) {
  const CnfFormula phi{2, {{1, 2}}};
  const DnfFormula psi = cnf_complement(phi);
  EXPECT_EQ(psi.terms, (std::vector<std::vector<Literal>>{{-1, -2}}));
  EXPECT_EQ(count_sat(psi), 1);
  EXPECT_EQ(count_sat(phi), 3);

  const CnfFormula none{3, {}};
  EXPECT_TRUE(cnf_complement(none).terms.empty());
  EXPECT_EQ(count_sat(none), 8);
  EXPECT_EQ(count_sat(cnf_complement(none)), 0);

  const CnfFormula contradiction{1, {{1}, {-1}}};
  EXPECT_EQ(count_sat(cnf_complement(contradiction)), 2);
}

TEST(Adapters, ValidationRejectsBadInput) {
  EXPECT_THROW(graph(2, {{1, 1}}).validate(), ParseError);
  EXPECT_THROW(graph(2, {{1, 3}}).validate(), ParseError);
  EXPECT_THROW((DnfFormula{2, {{1, -1}}}.validate()), ParseError);
  EXPECT_THROW((DnfFormula{2, {{3}}}.validate()), ParseError);
  EXPECT_THROW((CnfFormula{2, {{2, -2}}}.validate()), ParseError);
  EXPECT_THROW((MonotoneCircuit{2, {{MonotoneCircuit::Op::kOr, 0, 2}}, 2}.validate()), ParseError);
}

TEST(Readers, GraphDnfCnfMonotone) {
  std::istringstream g("c triangle\np graph 3 3\ne 1 2\ne 2 3\ne 1 3\n");
  EXPECT_EQ(count_independent_sets(read_graph(g)), 3);

  std::istringstream d("p dnf 3 2\n1 2 0\n-3 0\n");
  EXPECT_EQ(count_sat(read_dnf(d)), 5);

  std::istringstream c("p cnf 3 2\n1 2\n 0\n-3 0\n%\n");
  EXPECT_EQ(count_sat(read_cnf(c)), 3);

  std::istringstream m("input 1\ninput 2\ngate 3 OR 1 2\noutput 3\n");
  EXPECT_EQ(count_sat(read_monotone(m)), 3);

  std::istringstream short_cnf("p cnf 2 2\n1 0\n");
  EXPECT_THROW(read_cnf(short_cnf), ParseError);
  std::istringstream bad_graph("p graph 2 1\ne 1 5\n");
  EXPECT_THROW(read_graph(bad_graph), ParseError);
}

TEST(Readers, WritersRoundTrip) {
  Rng rng(3);
  const CnfFormula cnf = testing::random_cnf(rng, 6, 9, 3);
  std::stringstream s;
  write_cnf(s, cnf);
  EXPECT_EQ(read_cnf(s).clauses, cnf.clauses);

  const DnfFormula dnf = testing::random_dnf(rng, 6, 5, 1, 3);
  std::stringstream sd;
  write_dnf(sd, dnf);
  EXPECT_EQ(read_dnf(sd).terms, dnf.terms);

  const Graph g = testing::random_graph(rng, 7, 0.4);
  std::stringstream sg;
  write_graph(sg, g);
  EXPECT_EQ(read_graph(sg).edges, g.edges);

  const MonotoneCircuit mc = testing::random_monotone(rng, 5, 6);
  std::stringstream sm;
  write_monotone(sm, mc);
  EXPECT_EQ(count_sat(read_monotone(sm)), count_sat(mc));
}

template <typename Instance, typename Truth>
void check_identities(const Instance& instance, const Truth& truth) {
  const auto tree = build_branching_tree(instance);
  ASSERT_EQ(BigInt(materialize(tree).size()), truth);
  ASSERT_EQ(tree.count_computation_paths(), truth + 1);
  ASSERT_EQ(tree.height(), instance.variables() + 1);
}

TEST(AdapterProperty, NodesMatchBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const Graph g = testing::random_graph(rng, n, 0.3);
    check_identities(is_instance(g), count_independent_sets(g));

    const DnfFormula phi = testing::random_dnf(rng, n, rng() % 6, 1, 4);
    check_identities(dnf_instance(phi), count_sat(phi));

    const MonotoneCircuit c = testing::random_monotone(rng, n, 1 + rng() % 12);
    check_identities(monotone_instance(c), count_sat(c));

    const CnfFormula cnf = testing::random_cnf(rng, n, 1 + rng() % 8, 3);
    ASSERT_EQ(count_sat(cnf) + count_sat(cnf_complement(cnf)), pow2(static_cast<unsigned>(n)));
  }
}

}  // namespace
}  // namespace totp
