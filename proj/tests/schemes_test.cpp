#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tensorseries/schemes.hpp"

namespace ts = tensorseries;
using ts::CoefficientTensor;
using ts::Matrix;
using ts::NormEvaluator;
using ts::NormKind;
using ts::Vector;

namespace {

// Grid-sup error of piecewise-linear interpolation of the unit circle curve
// on the 2^j + 1 point subgrid of the 257-point grid, j = 1..8.
constexpr double kCircleErrors[8] = {
    0.9999999999999999,   0.2928932188134525,    0.07612046748871328,    0.019214719596769656,
    0.004815273327803188, 0.0012045437948277303, 0.0003011813037958848, 0.0,
};

ts::GridFunction circle(int levels) {
  return ts::GridFunction::sample(levels, 2, [](double t) {
    Vector v(2);
    v << std::cos(2.0 * std::numbers::pi * t), std::sin(2.0 * std::numbers::pi * t);
    return v;
  });
}

NormEvaluator grid_norm(const ts::GridFunction& f) {
  return NormEvaluator(NormKind::grid_sup, ts::SpaceSpec(f.dim(), ts::VectorNorm::euclidean),
                       ts::SpaceSpec(f.points(), ts::VectorNorm::euclidean));
}

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(SvdTruncation, RankOneIsExactAtStageOne) {
  const CoefficientTensor u(diag({3.0, 0.0}));
  const auto scheme = ts::svd_truncation_scheme(u, NormEvaluator::natural(NormKind::spectral, 2, 2));
  const auto st = scheme->stage(1);
  EXPECT_EQ(st.bound, 0.0);
  EXPECT_TRUE(ts::approx_equal(st.approx.coeffs(), u.coeffs()));
}

TEST(SvdTruncation, BoundsMatchSingularValues) {
  std::mt19937_64 rng(101);
  const CoefficientTensor u(testing_support::gaussian_matrix(rng, 6, 5));
  const Vector sigma = ts::singular_values(u.coeffs());
  for (NormKind kind : {NormKind::spectral, NormKind::nuclear, NormKind::frobenius}) {
    const auto ev = NormEvaluator::natural(kind, 6, 5);
    const auto scheme = ts::svd_truncation_scheme(u, ev);
    for (int j = 1; j <= 5; ++j) {
      const Vector tail = sigma.tail(5 - j);
      double expected = 0.0;
      if (j < 5) {
        if (kind == NormKind::spectral) expected = tail(0);
        if (kind == NormKind::nuclear) expected = tail.sum();
        if (kind == NormKind::frobenius) expected = tail.norm();
      }
      const auto st = scheme->stage(j);
      EXPECT_NEAR(st.bound, expected, 1e-10) << ts::to_string(kind) << " stage " << j;
      EXPECT_LE(ev(st.approx - u), st.bound + 1e-9);
    }
  }
}

TEST(SvdTruncation, NeedsEuclideanSvdNorm) {
  const CoefficientTensor u(diag({1.0, 2.0}));
  EXPECT_THROW(ts::svd_truncation_scheme(u, NormEvaluator::natural(NormKind::entrywise_l1, 2, 2)),
               ts::DomainError);
}

TEST(GeometricSubsequence, StagesFollowSchedule) {
  std::mt19937_64 rng(5);
  const CoefficientTensor u(testing_support::gaussian_matrix(rng, 6, 6));
  const auto ev = NormEvaluator::natural(NormKind::frobenius, 6, 6);
  const ts::GeometricSubsequence scheme(ts::svd_truncation_scheme(u, ev));
  int last_inner = 0;
  for (int j = 1; j <= 12; ++j) {
    const auto st = scheme.stage(j);
    EXPECT_LE(st.bound, std::ldexp(1.0, -j));
    EXPECT_GE(scheme.inner_stage(j), last_inner);
    last_inner = scheme.inner_stage(j);
  }
}

TEST(GridInterpolation, CircleStageErrorsMatchOracle) {
  const auto f = circle(8);
  const ts::GridInterpolationScheme scheme(f);
  ASSERT_EQ(scheme.levels(), 8);
  for (int j = 1; j <= 8; ++j)
    EXPECT_NEAR(scheme.measured_error(j), kCircleErrors[j - 1], 1e-12) << "stage " << j;
  for (int j = 2; j <= 7; ++j) EXPECT_GE(scheme.measured_error(j - 1) / scheme.measured_error(j), 3.0);
}

TEST(GridInterpolation, FinestStageReproducesSamples) {
  const auto f = circle(6);
  const ts::GridInterpolationScheme scheme(f);
  const auto st = scheme.stage(6);
  EXPECT_EQ(st.bound, 0.0);
  EXPECT_LE((st.approx.coeffs() - f.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GridInterpolation, ConstantAndLinearExactAtStageOne) {
  const auto constant = ts::GridFunction::sample(4, 3, [](double) {
    Vector v(3);
    v << 1.0, -2.0, 0.5;
    return v;
  });
  EXPECT_EQ(ts::GridInterpolationScheme(constant).stage(1).bound, 0.0);
  const auto linear = ts::GridFunction::sample(4, 2, [](double t) {
    Vector v(2);
    v << t, 1.0 - t;
    return v;
  });
  EXPECT_EQ(ts::GridInterpolationScheme(linear).stage(1).bound, 0.0);
}

TEST(GridInterpolation, DifferenceTermsAreHatsTimesSurpluses) {
  const auto f = circle(4);
  const ts::GridInterpolationScheme scheme(f);
  for (int j = 1; j <= 4; ++j) {
    const auto terms = scheme.difference_terms(j);
    ASSERT_TRUE(terms.has_value());
    const Matrix previous = j == 1 ? Matrix::Zero(2, 17) : scheme.stage(j - 1).approx.coeffs();
    const Matrix expected = scheme.stage(j).approx.coeffs() - previous;
    EXPECT_TRUE(ts::approx_equal(ts::outer_sum(*terms).coeffs(), expected, 1e-12));
    for (const auto& t : terms->terms()) EXPECT_LE(t.y.maxCoeff(), 1.0 + 1e-15);
  }
}

TEST(GridInterpolation, BoundsCoverMeasuredErrors) {
  const auto f = circle(5);
  const ts::GridInterpolationScheme scheme(f);
  const auto checks = ts::check_scheme(scheme, grid_norm(f), 7);
  for (const auto& c : checks) EXPECT_TRUE(c.ok) << "stage " << c.stage;
}

TEST(GridFunction, RejectsNonDyadicOrUnsortedGrid) {
  EXPECT_THROW(ts::dyadic_level(10), ts::DomainError);
  EXPECT_EQ(ts::dyadic_level(257), 8);
  ts::GridFunction f = circle(2);
  f.grid(2) = f.grid(1);
  EXPECT_THROW(f.validate(), ts::DomainError);
}

TEST(CauchyAdapter, GeometricAcceptedHarmonicRejected) {
  const CoefficientTensor u(diag({1.0, 1.0}));
  std::vector<ts::SchemeStage> geometric;
  std::vector<ts::SchemeStage> harmonic;
  for (int j = 1; j <= 8; ++j) {
    geometric.push_back({u, std::ldexp(1.0, -j)});
    harmonic.push_back({u, 1.0 / j});
  }
  const ts::CauchyAdapter::GeometricEnvelope env{1.0, 0.5};
  EXPECT_NO_THROW(ts::cauchy_adapter(geometric, env));
  EXPECT_THROW(ts::cauchy_adapter(harmonic, env), ts::ContractViolation);
}

TEST(CauchyAdapter, SingleExactStageRepeats) {
  const CoefficientTensor u(diag({1.0, 2.0}));
  const auto scheme = ts::cauchy_adapter({{u, 0.0}});
  EXPECT_EQ(scheme->stage(5).bound, 0.0);
  EXPECT_TRUE(ts::approx_equal(scheme->stage(5).approx.coeffs(), u.coeffs()));
}

TEST(CauchyAdapter, InexactTailIsExhausted) {
  const CoefficientTensor u(diag({1.0, 2.0}));
  const auto scheme = ts::cauchy_adapter({{u, 0.5}});
  EXPECT_THROW(scheme->stage(2), ts::SchemeExhausted);
}

TEST(CauchyAdapter, RejectsIncreasingBoundsAndMixedShapes) {
  const CoefficientTensor a(diag({1.0, 2.0}));
  EXPECT_THROW(ts::cauchy_adapter({{a, 0.25}, {a, 0.5}}), ts::ContractViolation);
  EXPECT_THROW(ts::cauchy_adapter({{a, 0.5}, {CoefficientTensor(3, 3), 0.25}}), ts::DimensionError);
  EXPECT_THROW(ts::cauchy_adapter({{a, -1.0}}), ts::ContractViolation);
}

TEST(DictionaryScheme, StagesCarryResiduals) {
  const Vector grid = ts::dyadic_grid(4);
  const auto family = ts::SeminormFamily::nested_grid_sup(4, 1);
  const auto scheme = ts::dictionary_projection_scheme(grid.array().exp(),
                                                       ts::monomial_dictionary(grid, 10), family);
  const auto checks = ts::check_scheme(*scheme, family.finest(), 6);
  for (const auto& c : checks) EXPECT_LE(c.measured, std::ldexp(1.0, -c.stage) + 1e-9);
}
