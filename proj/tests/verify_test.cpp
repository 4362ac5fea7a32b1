#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tensorseries/io.hpp"
#include "tensorseries/schemes.hpp"
#include "tensorseries/verify.hpp"

namespace ts = tensorseries;
using ts::CoefficientTensor;
using ts::Matrix;
using ts::NormEvaluator;
using ts::NormKind;
using ts::Representation;
using ts::Vector;

namespace {

Vector unit(int size, int k) {
  Vector v = Vector::Zero(size);
  v(k) = 1.0;
  return v;
}

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

}  // namespace

TEST(PrefixBoundReport, FlattenOutputPasses) {
  std::mt19937_64 rng(1);
  const auto rep = Representation::from_terms(4, 4, testing_support::random_terms(rng, 4, 4, 5));
  const auto ev = NormEvaluator::natural(NormKind::spectral, 4, 4);
  const auto flat = ts::flatten_bounded(rep, ev);
  const auto report = ts::prefix_bound_report(flat.rep, ev, 2.0);
  EXPECT_FALSE(report.violation);
  EXPECT_NEAR(report.certificate.worst_prefix_ratio, flat.certificate.worst_prefix_ratio, 1e-12);
}

TEST(PrefixBoundReport, CancellingPairFlaggedAsZeroTarget) {
  const auto rep =
      Representation::from_terms(2, 2, {{unit(2, 0), unit(2, 1)}, {-unit(2, 0), unit(2, 1)}});
  const auto report = ts::prefix_bound_report(rep, NormEvaluator::natural(NormKind::frobenius, 2, 2), 2.0);
  EXPECT_TRUE(report.certificate.zero_target);
  EXPECT_FALSE(report.violation);
  EXPECT_DOUBLE_EQ(report.worst_prefix_norm, 1.0);
}

TEST(PrefixBoundReport, SingleTermRatioIsOne) {
  std::mt19937_64 rng(2);
  const auto rep = Representation::from_terms(3, 3, testing_support::random_terms(rng, 3, 3, 1));
  const auto report = ts::prefix_bound_report(rep, NormEvaluator::natural(NormKind::nuclear, 3, 3), 2.0);
  EXPECT_NEAR(report.certificate.worst_prefix_ratio, 1.0, 1e-14);
}

TEST(PrefixBoundReport, DetectsViolation) {
  // A large cancelling pair ahead of a unit term: alpha(u) = 1, first prefix 10.
  const auto rep = Representation::from_terms(
      2, 2, {{10.0 * unit(2, 0), unit(2, 0)}, {-10.0 * unit(2, 0), unit(2, 0)}, {unit(2, 1), unit(2, 1)}});
  const auto report = ts::prefix_bound_report(rep, NormEvaluator::natural(NormKind::frobenius, 2, 2), 2.0);
  EXPECT_TRUE(report.violation);
  EXPECT_NEAR(report.certificate.worst_prefix_ratio, 10.0, 1e-12);
}

TEST(ConvergenceTrace, ConstantSchemeErrorZeroAfterFirstBlock) {
  const CoefficientTensor u(diag({2.0, 1.0}));
  const auto scheme = ts::cauchy_adapter({{u, 0.0}}, std::nullopt, u);
  const auto ev = NormEvaluator::natural(NormKind::frobenius, 2, 2);
  const auto stream = ts::telescope(*scheme, ev);
  const auto trace = ts::convergence_trace(stream, u, ev, stream.size());
  ASSERT_FALSE(trace.rows.empty());
  EXPECT_NEAR(trace.rows.back().error, 0.0, 1e-12);
  EXPECT_TRUE(trace.holds());
}

TEST(ConvergenceTrace, DiagonalSvdStreamBoundaryErrors) {
  const CoefficientTensor u(diag({1.0, 0.5, 0.25}));
  const auto ev = NormEvaluator::natural(NormKind::spectral, 3, 3);
  const auto scheme = ts::svd_truncation_scheme(u, ev);
  ts::TelescopeOptions opts;
  opts.stop.tolerance = 0.0;
  opts.stop.max_blocks = 3;
  const auto stream = ts::telescope(*scheme, ev, opts);
  const auto trace = ts::convergence_trace(stream, u, ev, stream.size());
  const auto ends = trace.boundaries(stream);
  ASSERT_EQ(ends.size(), 3u);
  EXPECT_NEAR(ends[0].error, 0.5, 1e-12);
  EXPECT_NEAR(ends[1].error, 0.25, 1e-12);
  EXPECT_NEAR(ends[2].error, 0.0, 1e-12);
  EXPECT_TRUE(trace.holds());
  for (std::size_t i = 1; i < ends.size(); ++i)
    EXPECT_LE(ends[i].certified_bound, ends[i - 1].certified_bound);
}

TEST(ConvergenceTrace, RandomFrobeniusRunAndAudit) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const CoefficientTensor u(testing_support::gaussian_matrix(rng, 6, 6));
    const auto ev = NormEvaluator::natural(NormKind::frobenius, 6, 6);
    const ts::GeometricSubsequence scheme(ts::svd_truncation_scheme(u, ev));
    const auto stream = ts::telescope(scheme, ev);
    const auto trace = ts::convergence_trace(stream, u, ev, stream.size());
    EXPECT_TRUE(trace.holds());
    EXPECT_TRUE(ts::audit_stream(stream, ev).ok());
  }
}

TEST(ConvergenceTrace, ReportsTruncation) {
  const CoefficientTensor u(diag({1.0, 2.0}));
  const auto scheme = ts::cauchy_adapter({{u, 0.0}}, std::nullopt, u);
  const auto ev = NormEvaluator::natural(NormKind::frobenius, 2, 2);
  const auto stream = ts::telescope(*scheme, ev);
  const auto trace = ts::convergence_trace(stream, u, ev, stream.size() + 10);
  EXPECT_TRUE(trace.truncated);
}

TEST(AuditStream, MeasuredNormsComeFromTerms) {
  std::mt19937_64 rng(4);
  const CoefficientTensor u(testing_support::gaussian_matrix(rng, 4, 4));
  const auto ev = NormEvaluator::natural(NormKind::frobenius, 4, 4);
  const ts::GeometricSubsequence scheme(ts::svd_truncation_scheme(u, ev));
  const auto stream = ts::telescope(scheme, ev);
  const auto other = ts::telescope(ts::GeometricSubsequence(ts::svd_truncation_scheme(u.scaled(2.0), ev)), ev);
  const auto a = ts::audit_stream(stream, ev);
  const auto b = ts::audit_stream(other, ev);
  ASSERT_FALSE(a.blocks.empty());
  EXPECT_NE(a.blocks.front().measured_norm, b.blocks.front().measured_norm);
  EXPECT_TRUE(a.ok());
}

TEST(PartialSums, CompensatedAboveThreshold) {
  const int n = 20001;
  ts::PartialSums sums(1, 1, n);
  const ts::ElementaryTensor big{Vector::Constant(1, 1.0), Vector::Constant(1, 1.0)};
  const ts::ElementaryTensor tiny{Vector::Constant(1, 1e-16), Vector::Constant(1, 1.0)};
  sums.add(big);
  for (int i = 1; i < n; ++i) sums.add(tiny);
  EXPECT_NEAR(sums.value()(0, 0), 1.0 + 2e-12, 1e-15);
}

TEST(Stress, SchmidtSpectralRatiosAtMostOne) {
  std::mt19937_64 rng(5);
  const CoefficientTensor u(testing_support::gaussian_matrix(rng, 5, 5));
  const auto rep = ts::expand(u, ts::Expansion::svd);
  const auto report = ts::stress(rep, NormEvaluator::natural(NormKind::spectral, 5, 5), 100, 0);
  EXPECT_TRUE(report.permutations_exhaustive);
  EXPECT_TRUE(report.subsets_exhaustive);
  EXPECT_EQ(report.permutations_evaluated, 120u);
  EXPECT_EQ(report.subsets_evaluated, 31u);
  EXPECT_LE(report.worst_prefix_ratio_over_permutations, 1.0 + 1e-9);
  EXPECT_LE(report.worst_subset_ratio, 1.0 + 1e-9);
}

TEST(Stress, SingleTermRatioOne) {
  std::mt19937_64 rng(6);
  const auto rep = Representation::from_terms(2, 3, testing_support::random_terms(rng, 2, 3, 1));
  const auto report = ts::permutation_stress(rep, NormEvaluator::natural(NormKind::frobenius, 2, 3), 10, 0);
  EXPECT_NEAR(report.worst_prefix_ratio_over_permutations, 1.0, 1e-14);
}

TEST(Stress, SeedDeterminesReport) {
  std::mt19937_64 rng(7);
  const auto rep = Representation::from_terms(3, 3, testing_support::random_terms(rng, 3, 3, 20));
  const auto ev = NormEvaluator::natural(NormKind::frobenius, 3, 3);
  const auto a = ts::io::stress_report_to_json(ts::stress(rep, ev, 200, 42)).dump();
  const auto b = ts::io::stress_report_to_json(ts::stress(rep, ev, 200, 42)).dump();
  const auto c = ts::io::stress_report_to_json(ts::stress(rep, ev, 200, 43)).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto report = ts::stress(rep, ev, 200, 42);
  EXPECT_FALSE(report.permutations_exhaustive);
  EXPECT_FALSE(report.subsets_exhaustive);
  EXPECT_EQ(report.permutations_evaluated, 200u);
  EXPECT_EQ(report.subsets_evaluated, 201u);
  EXPECT_EQ(report.permutation_quantiles.size(), 4u);
}

TEST(Stress, ZeroTargetRatiosUndefined) {
  const auto rep =
      Representation::from_terms(2, 2, {{unit(2, 0), unit(2, 1)}, {-unit(2, 0), unit(2, 1)}});
  const auto report = ts::stress(rep, NormEvaluator::natural(NormKind::frobenius, 2, 2), 10, 0);
  EXPECT_TRUE(report.zero_target);
  EXPECT_TRUE(std::isnan(report.worst_prefix_ratio_over_permutations));
  EXPECT_TRUE(std::isnan(report.worst_subset_ratio));
}
