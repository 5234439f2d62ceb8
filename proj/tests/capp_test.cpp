#include <gtest/gtest.h>

#include "totp/capp.hpp"
#include "totp/oracle.hpp"

namespace totp {
namespace {

EstimatorConfig base(std::uint64_t seed) {
  EstimatorConfig c;
  c.delta = 0.1;
  c.seed = seed;
  return c;
}

TEST(Capp, CnfGoesThroughComplement) {
  const CappResult r = capp(CnfFormula{2, {{1, 2}}}, 0.1, base(1));
  EXPECT_EQ(r.route, CappRoute::kComplement);
  EXPECT_GE(r.p_hat, 0.65);
  EXPECT_LE(r.p_hat, 0.85);
}

TEST(Capp, DnfAndMonotoneAreDirect) {
  const DnfFormula phi{4, {{1, 2}, {-3}}};
  const CappResult d = capp(phi, 0.1, base(2));
  EXPECT_EQ(d.route, CappRoute::kDirect);
  EXPECT_NEAR(d.p_hat, count_sat(phi).convert_to<double>() / 16, 0.1);

  const MonotoneCircuit c{3, {{MonotoneCircuit::Op::kOr, 0, 1}, {MonotoneCircuit::Op::kAnd, 3, 2}}, 4};
  const CappResult m = capp(c, 0.1, base(3));
  EXPECT_NEAR(m.p_hat, count_sat(c).convert_to<double>() / 8, 0.1);
}

TEST(Capp, ResultStaysInUnitInterval) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CappResult all = capp(CnfFormula{3, {}}, 0.3, base(seed));
    EXPECT_EQ(all.p_hat, 1.0);
    const CappResult none = capp(DnfFormula{3, {}}, 0.3, base(seed));
    EXPECT_EQ(none.p_hat, 0.0);
  }
}

TEST(Capp, UnsupportedFamilies) {
  EXPECT_THROW(capp(Graph{2, {{1, 2}}}, 0.1, base(1)), UnsupportedFamilyError);
  EXPECT_THROW(capp(ExplicitTree::full_binary(2), 0.1, base(1)), UnsupportedFamilyError);
  EXPECT_THROW(capp(DnfFormula{2, {{1}}}, 0.0, base(1)), ParameterError);
}

TEST(GapCsat, Examples) {
  EXPECT_EQ(gap_csat(CnfFormula{1, {{1}, {-1}}}, 0.5, base(1)).verdict, GapVerdict::kUnsatisfiable);
  EXPECT_EQ(gap_csat(CnfFormula{2, {{1, 2}}}, 0.5, base(1)).verdict, GapVerdict::kSatisfiable);
  EXPECT_EQ(gap_csat(DnfFormula{2, {{1}}}, 0.25, base(1)).verdict, GapVerdict::kSatisfiable);
  EXPECT_EQ(to_string(GapVerdict::kSatisfiable), "Satisfiable");
  EXPECT_THROW(gap_csat(DnfFormula{2, {{1}}}, 0.0, base(1)), ParameterError);
}

}  // namespace
}  // namespace totp
