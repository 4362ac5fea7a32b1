#include <gtest/gtest.h>

#include <cmath>

#include "tensorseries/construct.hpp"
#include "tensorseries/dictionary.hpp"

namespace ts = tensorseries;
using ts::Matrix;
using ts::Vector;

namespace {

// Max residual of the least-squares fit of exp(t) on 33 equispaced points by
// t^0 .. t^(D-1), measured on the subgrids with stride 16, 8, 4, 2, 1.
// Row D - 1; computed offline with an independent solver.
constexpr double kExpResiduals[9][5] = {
    {0.9955959483271675, 0.9955959483271675, 0.9955959483271675, 0.9955959483271675, 0.9955959483271675},
    {0.14915708466121202, 0.14915708466121202, 0.14915708466121202, 0.14915708466121202, 0.14915708466121202},
    {0.013521023860844306, 0.013521023860844306, 0.013521023860844306, 0.013521023860844306, 0.013521023860844306},
    {0.0008586836097461692, 0.0008586836097461692, 0.0008586836097461692, 0.0008586836097461692, 0.0008586836097461692},
    {4.123060839589243e-05, 4.123060839589243e-05, 4.123060839589243e-05, 4.123060839589243e-05, 4.123060839589243e-05},
    {1.5677434519467681e-06, 1.5677434519467681e-06, 1.5677434519467681e-06, 1.5677434519467681e-06, 1.5677434519467681e-06},
    {4.868190250917337e-08, 4.868190250917337e-08, 4.868190250917337e-08, 4.868190250917337e-08, 4.868190250917337e-08},
    {1.2615815059291435e-09, 1.2615815059291435e-09, 1.2615815059291435e-09, 1.2615815059291435e-09, 1.592911580416967e-09},
    {2.772493346014926e-11, 3.086508826299905e-11, 3.615641119836255e-11, 3.615641119836255e-11, 5.057598784219408e-11},
};

ts::DictionaryProjector exp_projector(int atoms = 13, int budget = -1) {
  const Vector grid = ts::dyadic_grid(5);
  return ts::DictionaryProjector(grid.array().exp(), ts::monomial_dictionary(grid, atoms),
                                 ts::SeminormFamily::nested_grid_sup(5, 1), budget);
}

}  // namespace

TEST(DyadicGrid, EndpointsAndSpacing) {
  const Vector g = ts::dyadic_grid(3);
  ASSERT_EQ(g.size(), 9);
  EXPECT_DOUBLE_EQ(g(0), 0.0);
  EXPECT_DOUBLE_EQ(g(4), 0.5);
  EXPECT_DOUBLE_EQ(g(8), 1.0);
}

TEST(MonomialDictionary, SamplesPowers) {
  const Vector g = ts::dyadic_grid(2);
  const auto dict = ts::monomial_dictionary(g, 3);
  ASSERT_EQ(dict.size(), 3u);
  EXPECT_EQ(dict[2].id, 2);
  EXPECT_DOUBLE_EQ(dict[2].atom(2), 0.25);
  EXPECT_DOUBLE_EQ(dict[0].atom(0), 1.0);
}

TEST(DictionaryProjector, ExpStagesMatchLeastSquaresOracle) {
  const auto projector = exp_projector();
  int previous_atoms = 0;
  for (int j = 1; j <= 5; ++j) {
    const auto& st = projector.stage(j);
    EXPECT_LE(st.residual, std::ldexp(1.0, -j));
    EXPECT_GE(st.atoms_used, previous_atoms);
    previous_atoms = st.atoms_used;
    ASSERT_LE(st.atoms_used, 9);
    ASSERT_GE(st.atoms_used, 1);
    EXPECT_NEAR(st.residual, kExpResiduals[st.atoms_used - 1][j - 1], 1e-9) << "stage " << j;
  }
}

TEST(DictionaryProjector, LaterStagesReachTightResiduals) {
  const auto projector = exp_projector();
  const auto& st = projector.stage(14);
  EXPECT_LE(st.residual, std::ldexp(1.0, -14));
  ASSERT_LE(st.atoms_used, 9);
  EXPECT_NEAR(st.residual, kExpResiduals[st.atoms_used - 1][4], 1e-9);
}

TEST(DictionaryProjector, TargetInSpanOfFirstTwoAtoms) {
  const Vector grid = ts::dyadic_grid(4);
  const Vector target = (2.0 - 3.0 * grid.array()).matrix();
  const ts::DictionaryProjector projector(target, ts::monomial_dictionary(grid, 6),
                                          ts::SeminormFamily::nested_grid_sup(4, 1));
  for (int j = 1; j <= 6; ++j) {
    const auto& st = projector.stage(j);
    if (st.atoms_used >= 2) EXPECT_EQ(st.residual, 0.0) << "stage " << j;
  }
  EXPECT_EQ(projector.stage(3).atoms_used, 2);
}

TEST(DictionaryProjector, EmptyDictionaryFailsAtStageOne) {
  const Vector grid = ts::dyadic_grid(2);
  const ts::DictionaryProjector projector(Vector::Ones(grid.size()), {},
                                          ts::SeminormFamily::nested_grid_sup(2, 1));
  try {
    projector.stage(1);
    FAIL() << "expected ResidualBudgetExceeded";
  } catch (const ts::ResidualBudgetExceeded& e) {
    EXPECT_EQ(e.stage(), 1);
    EXPECT_DOUBLE_EQ(e.residual(), 1.0);
  }
}

TEST(DictionaryProjector, BudgetTooSmallNamesStage) {
  const auto projector = exp_projector(13, 3);
  EXPECT_NO_THROW(projector.stage(5));  // residual 0.0135 <= 1/32 with 3 atoms
  EXPECT_THROW(projector.stage(7), ts::ResidualBudgetExceeded);
}

TEST(DenseSpanSeries, ExpConvergesInFinestSeminorm) {
  const Vector grid = ts::dyadic_grid(5);
  const Vector target = grid.array().exp();
  const auto dict = ts::monomial_dictionary(grid, 13);
  const auto family = ts::SeminormFamily::nested_grid_sup(5, 1);
  ts::StopRule stop;
  stop.tolerance = 1e-4;
  const auto series = ts::dense_span_series(target, dict, family, 2.0, stop);
  const Vector sum = series.partial_sum(series.terms.size(), dict);
  EXPECT_LE((target - sum).lpNorm<Eigen::Infinity>(), 1e-4);
  EXPECT_EQ(series.stop_reason, ts::StopReason::tolerance);
  for (const auto& t : series.terms) EXPECT_LT(t.atom_id, 13);
}

TEST(DenseSpanSeries, BoundaryResidualsNonIncreasingPerSeminorm) {
  const Vector grid = ts::dyadic_grid(5);
  const Vector target = grid.array().exp();
  const auto dict = ts::monomial_dictionary(grid, 13);
  const auto family = ts::SeminormFamily::nested_grid_sup(5, 1);
  ts::StopRule stop;
  stop.tolerance = 1e-8;
  const auto series = ts::dense_span_series(target, dict, family, 2.0, stop);
  for (int fixed = 1; fixed <= 5; ++fixed) {
    double last = INFINITY;
    for (const auto& b : series.blocks) {
      if (b.stage < fixed) continue;
      const Vector s = series.partial_sum(b.end, dict);
      const double r = family.at(fixed)(Matrix((target - s).transpose()));
      EXPECT_LE(r, last + 1e-12) << "seminorm " << fixed << " block " << b.stage;
      last = r;
    }
  }
}
