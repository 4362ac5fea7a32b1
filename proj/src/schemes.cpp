#include "tensorseries/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tensorseries {

// ---------------------------------------------------------------------------
// SVD truncation

SvdTruncationScheme::SvdTruncationScheme(CoefficientTensor u, const NormEvaluator& norm)
    : target_(std::move(u)), norm_(norm.kind()) {
  if (norm.space_x().norm != VectorNorm::euclidean || norm.space_y().norm != VectorNorm::euclidean)
    throw DomainError("svd truncation scheme needs euclidean spaces");
  if (norm_ != NormKind::spectral && norm_ != NormKind::nuclear && norm_ != NormKind::frobenius)
    throw DomainError("svd truncation bounds exist for spectral, nuclear and frobenius only, not " +
                      std::string(to_string(norm_)));
  if (norm.space_x().dim != target_.rows() || norm.space_y().dim != target_.cols())
    throw DimensionError("svd truncation scheme: norm does not match the tensor shape");
  svd_ = jacobi_svd(target_.coeffs());
  rank_ = svd_.rank();
}

SchemeStage SvdTruncationScheme::stage(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  if (j >= rank_) return {target_, 0.0};
  Matrix approx = Matrix::Zero(rows(), cols());
  for (int i = 0; i < j; ++i) approx.noalias() += svd_.sigma(i) * svd_.u.col(i) * svd_.v.col(i).transpose();
  const Vector tail = svd_.sigma.tail(svd_.sigma.size() - j);
  double bound = 0.0;
  switch (norm_) {
    case NormKind::spectral: bound = tail(0); break;
    case NormKind::nuclear: bound = tail.sum(); break;
    default: bound = tail.norm(); break;
  }
  return {CoefficientTensor(std::move(approx)), bound};
}

std::optional<Representation> SvdTruncationScheme::difference_terms(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  if (j > rank_) return Representation(rows(), cols());
  const double root = std::sqrt(svd_.sigma(j - 1));
  std::vector<ElementaryTensor> terms{{root * svd_.u.col(j - 1), root * svd_.v.col(j - 1)}};
  return Representation::from_terms(rows(), cols(), std::move(terms));
}

std::string SvdTruncationScheme::description() const {
  std::ostringstream s;
  s << "svd truncation of a " << rows() << "x" << cols() << " tensor of rank " << rank_
    << ", bounds in " << to_string(norm_);
  return s.str();
}

std::shared_ptr<SvdTruncationScheme> svd_truncation_scheme(CoefficientTensor u,
                                                           const NormEvaluator& norm) {
  return std::make_shared<SvdTruncationScheme>(std::move(u), norm);
}

// ---------------------------------------------------------------------------
// Geometric re-indexing

GeometricSubsequence::GeometricSubsequence(std::shared_ptr<const ApproximationScheme> inner,
                                           double scale, double ratio, int max_inner_stage)
    : inner_(std::move(inner)), scale_(scale), ratio_(ratio), max_inner_(max_inner_stage) {
  if (!inner_) throw DomainError("geometric subsequence needs a scheme");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw DomainError("scale must be > 0");
  if (!(ratio_ > 0.0 && ratio_ < 1.0)) throw DomainError("ratio must lie in (0, 1)");
  if (max_inner_ < 1) throw DomainError("max inner stage must be >= 1");
}

int GeometricSubsequence::inner_stage(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  const double goal = scale_ * std::pow(ratio_, j);
  for (int i = 1; i <= max_inner_; ++i)
    if (inner_->stage(i).bound <= goal) return i;
  std::ostringstream msg;
  msg << inner_->kind() << " scheme does not reach bound " << goal << " within " << max_inner_
      << " stages";
  throw SchemeExhausted(msg.str());
}

SchemeStage GeometricSubsequence::stage(int j) const { return inner_->stage(inner_stage(j)); }

std::string GeometricSubsequence::description() const {
  std::ostringstream s;
  s << inner_->description() << ", re-indexed to bounds " << scale_ << " * " << ratio_ << "^j";
  return s.str();
}

// ---------------------------------------------------------------------------
// Grid interpolation

void GridFunction::validate() const {
  if (grid.size() < 2) throw DomainError("grid function needs at least two samples");
  if (values.cols() != grid.size())
    throw DimensionError("grid function has " + std::to_string(values.cols()) +
                         " value columns for " + std::to_string(grid.size()) + " grid points");
  if (values.rows() < 1) throw DimensionError("grid function values need at least one row");
  if (!grid.allFinite() || !values.allFinite()) throw DomainError("grid function is not finite");
  if (grid(0) != 0.0 || grid(grid.size() - 1) != 1.0)
    throw DomainError("grid must start at 0 and end at 1");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid(i) > grid(i - 1))) throw DomainError("grid must be strictly increasing");
}

int dyadic_level(int points) {
  for (int level = 1; level <= 24; ++level)
    if (points == (1 << level) + 1) return level;
  throw DomainError("grid of " + std::to_string(points) + " points is not dyadic (2^J + 1)");
}

GridInterpolationScheme::GridInterpolationScheme(GridFunction f, VectorNorm y_norm)
    : f_(std::move(f)), y_norm_(y_norm) {
  f_.validate();
  levels_ = dyadic_level(f_.points());
  const NormEvaluator sup(NormKind::grid_sup, SpaceSpec(f_.dim(), y_norm_),
                          SpaceSpec(f_.points(), VectorNorm::euclidean));
  const double scale = 1.0 + sup(f_.values);
  for (int j = 1; j <= levels_; ++j) {
    stages_.push_back(interpolant(j));
    double err = sup(Matrix(stages_.back() - f_.values));
    if (err <= kNegligibleResidual * scale) err = 0.0;
    measured_.push_back(err);
  }
  bounds_.assign(measured_.size(), 0.0);
  double running = 0.0;
  for (int j = levels_ - 1; j >= 0; --j) {
    running = std::max(running, measured_[static_cast<std::size_t>(j)]);
    bounds_[static_cast<std::size_t>(j)] = running;
  }
}

Matrix GridInterpolationScheme::interpolant(int j) const {
  const int stride = 1 << (levels_ - j);
  Matrix out(f_.dim(), f_.points());
  for (int i = 0; i < f_.points(); ++i) {
    const int a = (i / stride) * stride;
    if (a == i) {
      out.col(i) = f_.values.col(i);
      continue;
    }
    const int b = a + stride;
    const double w = (f_.grid(i) - f_.grid(a)) / (f_.grid(b) - f_.grid(a));
    out.col(i) = (1.0 - w) * f_.values.col(a) + w * f_.values.col(b);
  }
  return out;
}

Vector GridInterpolationScheme::hat(int j, int node) const {
  const int stride = 1 << (levels_ - j);
  if (node < 0 || node >= f_.points() || node % stride != 0)
    throw DomainError("node is not on the level-" + std::to_string(j) + " subgrid");
  const auto& t = f_.grid;
  Vector h = Vector::Zero(f_.points());
  h(node) = 1.0;
  if (node > 0)
    for (int i = node - stride + 1; i < node; ++i)
      h(i) = (t(i) - t(node - stride)) / (t(node) - t(node - stride));
  if (node < f_.points() - 1)
    for (int i = node + 1; i < node + stride; ++i)
      h(i) = (t(node + stride) - t(i)) / (t(node + stride) - t(node));
  return h;
}

SchemeStage GridInterpolationScheme::stage(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  if (j > levels_) return {CoefficientTensor(f_.values), 0.0};
  const auto k = static_cast<std::size_t>(j - 1);
  return {CoefficientTensor(stages_[k]), bounds_[k]};
}

double GridInterpolationScheme::measured_error(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  if (j > levels_) return 0.0;
  return measured_[static_cast<std::size_t>(j - 1)];
}

std::optional<Representation> GridInterpolationScheme::difference_terms(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  if (j > levels_) return Representation(rows(), cols());
  const int stride = 1 << (levels_ - j);
  std::vector<ElementaryTensor> terms;
  for (int node = 0; node < f_.points(); node += stride) {
    Vector surplus;
    if (j == 1) {
      surplus = f_.values.col(node);
    } else {
      if ((node / stride) % 2 == 0) continue;  // node already on the coarser grid
      surplus = f_.values.col(node) - stages_[static_cast<std::size_t>(j - 2)].col(node);
    }
    if (surplus.isZero(0.0)) continue;
    terms.push_back({std::move(surplus), hat(j, node)});
  }
  return Representation::from_terms(rows(), cols(), std::move(terms));
}

std::string GridInterpolationScheme::description() const {
  std::ostringstream s;
  s << "piecewise-linear interpolation of R^" << f_.dim() << "-valued samples on "
    << f_.points() << " dyadic points";
  return s.str();
}

std::shared_ptr<GridInterpolationScheme> grid_interpolation_scheme(GridFunction f,
                                                                   VectorNorm y_norm) {
  return std::make_shared<GridInterpolationScheme>(std::move(f), y_norm);
}

// ---------------------------------------------------------------------------
// Dictionary projection

DictionaryProjectionScheme::DictionaryProjectionScheme(
    std::shared_ptr<const DictionaryProjector> projector)
    : projector_(std::move(projector)) {
  if (!projector_) throw DomainError("dictionary scheme needs a projector");
}

SchemeStage DictionaryProjectionScheme::stage(int j) const {
  const DictionaryStage& s = projector_->stage(j);
  return {CoefficientTensor(Matrix(s.approximant.transpose())), s.residual};
}

std::optional<Representation> DictionaryProjectionScheme::difference_terms(int j) const {
  const DictionaryStage& s = projector_->stage(j);
  Vector delta = s.coefficients;
  if (j > 1) {
    const Vector& before = projector_->stage(j - 1).coefficients;
    delta.head(before.size()) -= before;
  }
  std::vector<ElementaryTensor> terms;
  for (Eigen::Index k = 0; k < delta.size(); ++k)
    if (delta(k) != 0.0)
      terms.push_back({Vector::Constant(1, delta(k)),
                       projector_->atoms()[static_cast<std::size_t>(k)].atom});
  return Representation::from_terms(1, cols(), std::move(terms));
}

std::optional<CoefficientTensor> DictionaryProjectionScheme::exact_target() const {
  return CoefficientTensor(Matrix(projector_->target().transpose()));
}

std::shared_ptr<DictionaryProjectionScheme> dictionary_projection_scheme(
    Vector target, std::vector<DictionaryAtom> dictionary, SeminormFamily family, int atom_budget) {
  auto projector = std::make_shared<const DictionaryProjector>(
      std::move(target), std::move(dictionary), std::move(family), atom_budget);
  return std::make_shared<DictionaryProjectionScheme>(std::move(projector));
}

// ---------------------------------------------------------------------------
// Externally supplied stages

CauchyAdapter::CauchyAdapter(std::vector<SchemeStage> stages,
                             std::optional<GeometricEnvelope> envelope,
                             std::optional<CoefficientTensor> target)
    : stages_(std::move(stages)), target_(std::move(target)) {
  if (stages_.empty()) throw DomainError("cauchy adapter needs at least one stage");
  const int r = stages_.front().approx.rows();
  const int c = stages_.front().approx.cols();
  if (target_ && (target_->rows() != r || target_->cols() != c))
    throw DimensionError("cauchy adapter: target shape differs from the stages");
  if (envelope && !(envelope->ratio > 0.0 && envelope->ratio < 1.0))
    throw DomainError("cauchy adapter: envelope ratio must lie in (0, 1)");
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    const auto& s = stages_[i];
    const int j = static_cast<int>(i) + 1;
    if (s.approx.rows() != r || s.approx.cols() != c)
      throw DimensionError("cauchy adapter: stage " + std::to_string(j) + " has a different shape");
    if (!std::isfinite(s.bound) || s.bound < 0.0)
      throw ContractViolation("cauchy adapter: stage " + std::to_string(j) +
                              " bound is not a finite nonnegative number");
    if (i > 0 && s.bound > stages_[i - 1].bound)
      throw ContractViolation("cauchy adapter: bounds increase at stage " + std::to_string(j));
    if (envelope && s.bound > envelope->scale * std::pow(envelope->ratio, j) * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "cauchy adapter: stage " << j << " bound " << s.bound
          << " exceeds the summable envelope " << envelope->scale * std::pow(envelope->ratio, j);
      throw ContractViolation(msg.str());
    }
  }
}

SchemeStage CauchyAdapter::stage(int j) const {
  if (j < 1) throw DomainError("stages are numbered from 1");
  if (static_cast<std::size_t>(j) <= stages_.size()) return stages_[static_cast<std::size_t>(j - 1)];
  if (stages_.back().bound == 0.0) return stages_.back();
  throw SchemeExhausted("cauchy adapter has only " + std::to_string(stages_.size()) + " stages");
}

std::shared_ptr<CauchyAdapter> cauchy_adapter(
    std::vector<SchemeStage> stages, std::optional<CauchyAdapter::GeometricEnvelope> envelope,
    std::optional<CoefficientTensor> target) {
  return std::make_shared<CauchyAdapter>(std::move(stages), envelope, std::move(target));
}

std::vector<StageCheck> check_scheme(const ApproximationScheme& scheme, const Seminorm& alpha,
                                     int stages) {
  const auto target = scheme.exact_target();
  if (!target) throw DomainError("scheme " + scheme.kind() + " has no exact target to check");
  const double scale = 1.0 + alpha(*target);
  std::vector<StageCheck> out;
  for (int j = 1; j <= stages; ++j) {
    SchemeStage s{CoefficientTensor(1, 1), 0.0};
    try {
      s = scheme.stage(j);
    } catch (const SchemeExhausted&) {
      break;
    }
    StageCheck row{j, s.bound, alpha(s.approx - *target), true};
    row.ok = row.measured <= row.bound + kCertificateSlack * scale;
    out.push_back(row);
  }
  return out;
}

}  // namespace tensorseries
