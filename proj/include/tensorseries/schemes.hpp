#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tensorseries/construct.hpp"
#include "tensorseries/dictionary.hpp"
#include "tensorseries/norms.hpp"
#include "tensorseries/scheme.hpp"
#include "tensorseries/svd.hpp"

namespace tensorseries {

/// Rank-j truncations of the SVD of u. Bounds are the exact truncation
/// errors in the requested norm (spectral, nuclear or frobenius), zero from
/// the numerical rank on.
class SvdTruncationScheme final : public ApproximationScheme {
 public:
  SvdTruncationScheme(CoefficientTensor u, const NormEvaluator& norm);

  int rows() const override { return target_.rows(); }
  int cols() const override { return target_.cols(); }
  SchemeStage stage(int j) const override;
  std::optional<Representation> difference_terms(int j) const override;
  std::optional<CoefficientTensor> exact_target() const override { return target_; }
  std::string kind() const override { return "svd"; }
  std::string description() const override;

  int rank() const { return rank_; }
  const Svd& svd() const { return svd_; }

 private:
  CoefficientTensor target_;
  NormKind norm_;
  Svd svd_;
  int rank_;
};

std::shared_ptr<SvdTruncationScheme> svd_truncation_scheme(CoefficientTensor u,
                                                           const NormEvaluator& norm);

/// Re-indexes a scheme onto the schedule scale * ratio^j: stage j is the
/// first inner stage whose bound is at or below it.
class GeometricSubsequence final : public ApproximationScheme {
 public:
  GeometricSubsequence(std::shared_ptr<const ApproximationScheme> inner, double scale = 1.0,
                       double ratio = 0.5, int max_inner_stage = 10'000);

  int rows() const override { return inner_->rows(); }
  int cols() const override { return inner_->cols(); }
  SchemeStage stage(int j) const override;
  std::optional<CoefficientTensor> exact_target() const override { return inner_->exact_target(); }
  std::string kind() const override { return inner_->kind(); }
  std::string description() const override;

  /// Inner stage used for outer stage j.
  int inner_stage(int j) const;

 private:
  std::shared_ptr<const ApproximationScheme> inner_;
  double scale_;
  double ratio_;
  int max_inner_;
};

/// Samples of F : [0,1] -> R^d; column t of `values` is F(grid(t)).
struct GridFunction {
  Vector grid;
  Matrix values;  // d x G

  int dim() const { return static_cast<int>(values.rows()); }
  int points() const { return static_cast<int>(grid.size()); }

  /// Grid strictly increasing from 0 to 1, shapes consistent, values finite.
  void validate() const;

  /// Samples `f` on the dyadic grid with 2^levels + 1 points.
  template <typename F>
  static GridFunction sample(int levels, int dim, F&& f);
};

/// Dyadic level J with points = 2^J + 1; throws DomainError otherwise.
int dyadic_level(int points);

/// Piecewise-linear interpolation of a grid function on nested dyadic
/// subgrids, viewed in C(K) (x) R^d as the d x G matrix of samples.
///
/// Stage j interpolates on the 2^j + 1 point subgrid; increments are sums of
/// hierarchical hat functions (x) surplus vectors. Bounds are the measured
/// grid sup errors, made non-increasing by taking the max over finer stages.
class GridInterpolationScheme final : public ApproximationScheme {
 public:
  explicit GridInterpolationScheme(GridFunction f, VectorNorm y_norm = VectorNorm::euclidean);

  int rows() const override { return f_.dim(); }
  int cols() const override { return f_.points(); }
  SchemeStage stage(int j) const override;
  std::optional<Representation> difference_terms(int j) const override;
  std::optional<CoefficientTensor> exact_target() const override {
    return CoefficientTensor(f_.values);
  }
  std::string kind() const override { return "interp"; }
  std::string description() const override;

  int levels() const { return levels_; }
  const GridFunction& function() const { return f_; }

  /// grid_sup error of the stage-j interpolant, before monotonization.
  double measured_error(int j) const;

  /// Hat function of the level-j subgrid centred on grid index `node`.
  Vector hat(int j, int node) const;

 private:
  Matrix interpolant(int j) const;

  GridFunction f_;
  VectorNorm y_norm_;
  int levels_;
  std::vector<Matrix> stages_;
  std::vector<double> measured_;
  std::vector<double> bounds_;
};

std::shared_ptr<GridInterpolationScheme> grid_interpolation_scheme(
    GridFunction f, VectorNorm y_norm = VectorNorm::euclidean);

/// Least-squares dictionary approximants of a vector target (as 1 x G
/// tensors), with residual certificates in the family's seminorms.
class DictionaryProjectionScheme final : public ApproximationScheme {
 public:
  explicit DictionaryProjectionScheme(std::shared_ptr<const DictionaryProjector> projector);

  int rows() const override { return 1; }
  int cols() const override { return static_cast<int>(projector_->target().size()); }
  SchemeStage stage(int j) const override;
  std::optional<Representation> difference_terms(int j) const override;
  std::optional<CoefficientTensor> exact_target() const override;
  std::string kind() const override { return "dict"; }

  const DictionaryProjector& projector() const { return *projector_; }

 private:
  std::shared_ptr<const DictionaryProjector> projector_;
};

std::shared_ptr<DictionaryProjectionScheme> dictionary_projection_scheme(
    Vector target, std::vector<DictionaryAtom> dictionary, SeminormFamily family,
    int atom_budget = -1);

/// Wraps an externally supplied list of (u_j, eps_j). Bounds must be finite,
/// nonnegative and non-increasing; with an envelope they must also satisfy
/// eps_j <= scale * ratio^j. Past the end the list repeats its last stage if
/// that stage is exact, and is exhausted otherwise.
class CauchyAdapter final : public ApproximationScheme {
 public:
  struct GeometricEnvelope {
    double scale = 1.0;
    double ratio = 0.5;
  };

  CauchyAdapter(std::vector<SchemeStage> stages,
                std::optional<GeometricEnvelope> envelope = std::nullopt,
                std::optional<CoefficientTensor> target = std::nullopt);

  int rows() const override { return stages_.front().approx.rows(); }
  int cols() const override { return stages_.front().approx.cols(); }
  SchemeStage stage(int j) const override;
  std::optional<CoefficientTensor> exact_target() const override { return target_; }
  std::string kind() const override { return "cauchy"; }

  std::size_t size() const { return stages_.size(); }

 private:
  std::vector<SchemeStage> stages_;
  std::optional<CoefficientTensor> target_;
};

std::shared_ptr<CauchyAdapter> cauchy_adapter(
    std::vector<SchemeStage> stages,
    std::optional<CauchyAdapter::GeometricEnvelope> envelope = std::nullopt,
    std::optional<CoefficientTensor> target = std::nullopt);

/// One row of an on-demand check of alpha(u_j - u) <= eps_j.
struct StageCheck {
  int stage = 0;
  double bound = 0.0;
  double measured = 0.0;
  bool ok = true;
};

/// Checks the first `stages` stages against the scheme's exact target with
/// 1e-9 slack. Throws DomainError if the scheme has no exact target.
std::vector<StageCheck> check_scheme(const ApproximationScheme& scheme, const Seminorm& alpha,
                                     int stages);

template <typename F>
GridFunction GridFunction::sample(int levels, int dim, F&& f) {
  GridFunction g{dyadic_grid(levels), Matrix(dim, (1 << levels) + 1)};
  for (int t = 0; t < g.points(); ++t) g.values.col(t) = f(g.grid(t));
  return g;
}

}  // namespace tensorseries
