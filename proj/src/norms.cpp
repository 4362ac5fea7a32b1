#include "tensorseries/norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "tensorseries/svd.hpp"

namespace tensorseries {

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::frobenius: return "frobenius";
    case NormKind::entrywise_l1: return "entrywise_l1";
    case NormKind::entrywise_max: return "entrywise_max";
    case NormKind::spectral: return "spectral";
    case NormKind::nuclear: return "nuclear";
    case NormKind::injective_l1l1: return "injective_l1l1";
    case NormKind::grid_sup: return "grid_sup";
  }
  return "?";
}

const std::vector<NormKind>& all_norm_kinds() {
  static const std::vector<NormKind> kinds = {
      NormKind::frobenius, NormKind::entrywise_l1,   NormKind::entrywise_max,
      NormKind::spectral,  NormKind::nuclear,        NormKind::injective_l1l1,
      NormKind::grid_sup};
  return kinds;
}

NormKind parse_norm_kind(std::string_view name) {
  for (NormKind k : all_norm_kinds())
    if (to_string(k) == name) return k;
  throw DomainError("unknown norm kind '" + std::string(name) + "'");
}

double vector_norm(VectorNorm kind, const Vector& v) {
  switch (kind) {
    case VectorNorm::euclidean: return v.norm();
    case VectorNorm::l1: return v.lpNorm<1>();
    case VectorNorm::linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double vector_norm(const SpaceSpec& spec, const Vector& v) {
  if (v.size() != spec.dim)
    throw DimensionError("vector of length " + std::to_string(v.size()) +
                         " does not match space dimension " + std::to_string(spec.dim));
  return vector_norm(spec.norm, v);
}

double injective_l1l1_norm(const Matrix& u) {
  const Eigen::Index cols = u.cols();
  if (cols > kMaxInjectiveEnumerationDim)
    throw DomainError("injective_l1l1 enumeration is capped at dim(Y) = " +
                      std::to_string(kMaxInjectiveEnumerationDim));
  // psi and -psi give the same value, so the first sign stays +1. Walk the
  // remaining signs in Gray-code order, updating U psi one column at a time.
  const std::uint64_t count = std::uint64_t{1} << (cols - 1);
  Vector signs = Vector::Ones(cols);
  Vector image = u * signs;
  double best = image.lpNorm<1>();
  for (std::uint64_t step = 1; step < count; ++step) {
    const int flip = 1 + std::countr_zero(step);
    signs(flip) = -signs(flip);
    if ((step & 0x3ff) == 0) {
      image.noalias() = u * signs;
    } else {
      image += (2.0 * signs(flip)) * u.col(flip);
    }
    best = std::max(best, image.lpNorm<1>());
  }
  return best;
}

NormEvaluator::NormEvaluator(NormKind kind, SpaceSpec space_x, SpaceSpec space_y)
    : kind_(kind), space_x_(space_x), space_y_(space_y) {
  if (kind == NormKind::injective_l1l1 && space_y.dim > kMaxInjectiveEnumerationDim)
    throw DomainError("injective_l1l1 rejected: dim(Y) = " + std::to_string(space_y.dim) +
                      " exceeds enumeration budget of " +
                      std::to_string(kMaxInjectiveEnumerationDim));
}

NormEvaluator NormEvaluator::natural(NormKind kind, int rows, int cols) {
  const VectorNorm vn = (kind == NormKind::entrywise_l1 || kind == NormKind::injective_l1l1)
                            ? VectorNorm::l1
                            : VectorNorm::euclidean;
  return NormEvaluator(kind, SpaceSpec(rows, vn), SpaceSpec(cols, vn));
}

void NormEvaluator::check_shape(const Matrix& u) const {
  if (u.rows() != space_x_.dim || u.cols() != space_y_.dim) {
    std::ostringstream msg;
    msg << to_string(kind_) << ": tensor is " << u.rows() << "x" << u.cols()
        << ", evaluator expects " << space_x_.dim << "x" << space_y_.dim;
    throw DimensionError(msg.str());
  }
}

double NormEvaluator::operator()(const Matrix& u) const {
  check_shape(u);
  switch (kind_) {
    case NormKind::frobenius: return u.norm();
    case NormKind::entrywise_l1: return u.cwiseAbs().sum();
    case NormKind::entrywise_max: return u.cwiseAbs().maxCoeff();
    case NormKind::spectral: return singular_values(u)(0);
    case NormKind::nuclear: return singular_values(u).sum();
    case NormKind::injective_l1l1: return injective_l1l1_norm(u);
    case NormKind::grid_sup: {
      double best = 0.0;
      for (Eigen::Index t = 0; t < u.cols(); ++t)
        best = std::max(best, vector_norm(space_x_.norm, u.col(t)));
      return best;
    }
  }
  return 0.0;
}

double NormEvaluator::operator()(const CoefficientTensor& u) const { return (*this)(u.coeffs()); }

double NormEvaluator::operator()(const ElementaryTensor& t) const { return (*this)(t.outer()); }

double eval_norm(const NormEvaluator& ev, const CoefficientTensor& u) { return ev(u); }

CrossnormReport crossnorm_check(const NormEvaluator& ev, const Vector& x, const Vector& y) {
  CrossnormReport r;
  r.tensor_norm = ev(ElementaryTensor{x, y});
  r.product_of_norms = vector_norm(ev.space_x(), x) * vector_norm(ev.space_y(), y);
  r.defect = std::abs(r.tensor_norm - r.product_of_norms);
  return r;
}

Seminorm::Seminorm(std::string name, int rows, int cols, Fn fn)
    : name_(std::move(name)), rows_(rows), cols_(cols),
      fn_(std::make_shared<const Fn>(std::move(fn))) {}

Seminorm::Seminorm(const NormEvaluator& ev)
    : Seminorm(ev.name(), ev.space_x().dim, ev.space_y().dim,
               [ev](const Matrix& u) { return ev(u); }) {}

Seminorm Seminorm::column_sup(std::vector<int> columns, int rows, int cols, VectorNorm inner) {
  for (int c : columns)
    if (c < 0 || c >= cols) throw DimensionError("column index out of range in column_sup");
  std::string name = "column_sup[" + std::to_string(columns.size()) + "]";
  return Seminorm(std::move(name), rows, cols,
                  [columns = std::move(columns), inner](const Matrix& u) {
                    double best = 0.0;
                    for (int c : columns) best = std::max(best, vector_norm(inner, u.col(c)));
                    return best;
                  });
}

double Seminorm::operator()(const Matrix& u) const {
  if (u.rows() != rows_ || u.cols() != cols_)
    throw DimensionError(name_ + ": tensor shape mismatch");
  const double value = (*fn_)(u);
  if (!std::isfinite(value) || value < 0.0)
    throw DomainError(name_ + ": seminorm returned an invalid value");
  return value;
}

double Seminorm::operator()(const ElementaryTensor& t) const { return (*this)(t.outer()); }

SeminormFamily::SeminormFamily(std::vector<Seminorm> members) : members_(std::move(members)) {
  if (members_.empty()) throw DomainError("seminorm family must not be empty");
  for (const auto& s : members_)
    if (s.rows() != members_.front().rows() || s.cols() != members_.front().cols())
      throw DimensionError("seminorm family members disagree on shape");
}

SeminormFamily SeminormFamily::nested_grid_sup(int levels, int rows, VectorNorm inner) {
  if (levels < 1 || levels > 20) throw DomainError("nested_grid_sup needs 1 <= levels <= 20");
  const int cols = (1 << levels) + 1;
  std::vector<Seminorm> members;
  for (int j = 1; j <= levels; ++j) {
    const int stride = 1 << (levels - j);
    std::vector<int> columns;
    for (int c = 0; c < cols; c += stride) columns.push_back(c);
    members.push_back(Seminorm::column_sup(std::move(columns), rows, cols, inner));
  }
  return SeminormFamily(std::move(members));
}

const Seminorm& SeminormFamily::at(int stage) const {
  if (stage < 1) throw DomainError("seminorm stages are numbered from 1");
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(stage), members_.size()) - 1;
  return members_[idx];
}

bool SeminormFamily::is_monotone_on(const std::vector<Matrix>& samples, double tol) const {
  for (const auto& u : samples)
    for (std::size_t j = 0; j + 1 < members_.size(); ++j) {
      const double lo = members_[j](u);
      const double hi = members_[j + 1](u);
      if (lo > hi + tol * (1.0 + hi)) return false;
    }
  return true;
}

}  // namespace tensorseries
