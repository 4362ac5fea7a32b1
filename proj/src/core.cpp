#include "tensorseries/core.hpp"

#include <cmath>
#include <sstream>

namespace tensorseries {

std::string_view to_string(VectorNorm kind) {
  switch (kind) {
    case VectorNorm::euclidean: return "euclidean";
    case VectorNorm::l1: return "l1";
    case VectorNorm::linf: return "linf";
  }
  return "?";
}

VectorNorm parse_vector_norm(std::string_view name) {
  if (name == "euclidean") return VectorNorm::euclidean;
  if (name == "l1") return VectorNorm::l1;
  if (name == "linf") return VectorNorm::linf;
  throw DomainError("unknown vector norm '" + std::string(name) + "'");
}

SpaceSpec::SpaceSpec(int dim, VectorNorm norm) : dim(dim), norm(norm) {
  if (dim < 1) throw DomainError("space dimension must be >= 1");
}

CoefficientTensor::CoefficientTensor(int rows, int cols) {
  if (rows < 1 || cols < 1) throw DimensionError("tensor dimensions must be >= 1");
  coeffs_ = Matrix::Zero(rows, cols);
}

CoefficientTensor::CoefficientTensor(Matrix coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() < 1 || coeffs_.cols() < 1)
    throw DimensionError("tensor dimensions must be >= 1");
  if (!coeffs_.allFinite()) throw DomainError("tensor has non-finite coefficients");
}

CoefficientTensor CoefficientTensor::operator-(const CoefficientTensor& other) const {
  if (rows() != other.rows() || cols() != other.cols())
    throw DimensionError("tensor shape mismatch in subtraction");
  return CoefficientTensor(Matrix(coeffs_ - other.coeffs_));
}

CoefficientTensor CoefficientTensor::operator+(const CoefficientTensor& other) const {
  if (rows() != other.rows() || cols() != other.cols())
    throw DimensionError("tensor shape mismatch in addition");
  return CoefficientTensor(Matrix(coeffs_ + other.coeffs_));
}

CoefficientTensor CoefficientTensor::scaled(double factor) const {
  return CoefficientTensor(Matrix(factor * coeffs_));
}

void check_terms(const std::vector<ElementaryTensor>& terms, int rows, int cols) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (t.x.size() != rows || t.y.size() != cols) {
      std::ostringstream msg;
      msg << "term " << i << " has shape " << t.x.size() << "x" << t.y.size()
          << ", expected " << rows << "x" << cols;
      throw DimensionError(msg.str());
    }
    if (!t.x.allFinite() || !t.y.allFinite())
      throw DomainError("term " + std::to_string(i) + " has non-finite entries");
  }
}

namespace {

Matrix sum_terms(const std::vector<ElementaryTensor>& terms, std::size_t count,
                 int rows, int cols) {
  Matrix acc = Matrix::Zero(rows, cols);
  for (std::size_t i = 0; i < count; ++i) acc.noalias() += terms[i].x * terms[i].y.transpose();
  return acc;
}

}  // namespace

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).norm() <= tol * (1.0 + b.norm());
}

Representation::Representation(int rows, int cols) : target_(rows, cols) {}

Representation::Representation(std::vector<ElementaryTensor> terms, CoefficientTensor target)
    : terms_(std::move(terms)), target_(std::move(target)) {
  check_terms(terms_, target_.rows(), target_.cols());
  const Matrix sum = sum_terms(terms_, terms_.size(), rows(), cols());
  if (!approx_equal(sum, target_.coeffs())) {
    std::ostringstream msg;
    msg << "representation does not reconstruct its target (frobenius defect "
        << (sum - target_.coeffs()).norm() << ")";
    throw ContractViolation(msg.str());
  }
}

Representation Representation::from_terms(int rows, int cols,
                                          std::vector<ElementaryTensor> terms) {
  check_terms(terms, rows, cols);
  CoefficientTensor target(sum_terms(terms, terms.size(), rows, cols));
  return Representation(std::move(terms), std::move(target));
}

CoefficientTensor outer_sum(const Representation& rep) {
  return CoefficientTensor(sum_terms(rep.terms(), rep.size(), rep.rows(), rep.cols()));
}

CoefficientTensor prefix(const Representation& rep, std::size_t p) {
  if (p > rep.size())
    throw DomainError("prefix length " + std::to_string(p) + " exceeds term count " +
                      std::to_string(rep.size()));
  return CoefficientTensor(sum_terms(rep.terms(), p, rep.rows(), rep.cols()));
}

ReplicationPlan::ReplicationPlan(std::size_t m, std::size_t n, double c)
    : m(m), n(n), total(m * n), c(c) {
  if (m < 1) throw DomainError("replication needs at least one term");
  if (n < 1) throw DomainError("replication count must be >= 1");
  if (!(c > 1.0) || !std::isfinite(c)) throw DomainError("bound constant c must be > 1");
}

std::pair<std::size_t, std::size_t> ReplicationPlan::split(std::size_t p) const {
  if (p > total) throw DomainError("prefix length exceeds replication size");
  return {p / m, p % m};
}

}  // namespace tensorseries
