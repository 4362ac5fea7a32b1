#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tensorseries {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of tensors, vectors or spaces do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument failed (bad constant, non-finite input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A certificate or a scheme's error-bound contract was violated.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Default cap on the dimension of either factor space.
inline constexpr int kDefaultMaxDim = 64;

enum class VectorNorm { euclidean, l1, linf };

std::string_view to_string(VectorNorm kind);
VectorNorm parse_vector_norm(std::string_view name);

/// One factor space: R^dim with a chosen vector norm.
struct SpaceSpec {
  int dim = 1;
  VectorNorm norm = VectorNorm::euclidean;

  SpaceSpec() = default;
  SpaceSpec(int dim, VectorNorm norm);

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

/// Element of X (x) Y as a dense coefficient matrix in the standard bases.
/// Immutable; every entry is finite.
class CoefficientTensor {
 public:
  CoefficientTensor(int rows, int cols);  // zero tensor
  explicit CoefficientTensor(Matrix coeffs);

  static CoefficientTensor zero(int rows, int cols) { return {rows, cols}; }

  int rows() const { return static_cast<int>(coeffs_.rows()); }
  int cols() const { return static_cast<int>(coeffs_.cols()); }
  const Matrix& coeffs() const { return coeffs_; }
  double operator()(int i, int j) const { return coeffs_(i, j); }

  CoefficientTensor operator-(const CoefficientTensor& other) const;
  CoefficientTensor operator+(const CoefficientTensor& other) const;
  CoefficientTensor scaled(double factor) const;

 private:
  Matrix coeffs_;
};

/// x (x) y, stored by its factors.
struct ElementaryTensor {
  Vector x;
  Vector y;

  Matrix outer() const { return x * y.transpose(); }
  CoefficientTensor tensor() const { return CoefficientTensor(outer()); }
};

/// Tolerance used for the reconstruction invariant of representations.
inline constexpr double kReconstructionTol = 1e-9;

/// An ordered finite list of elementary tensors together with the tensor it
/// represents.
class Representation {
 public:
  /// Empty representation of the zero tensor.
  Representation(int rows, int cols);

  /// Checks that the terms sum to `target` within kReconstructionTol
  /// (relative, Frobenius); throws ContractViolation otherwise.
  Representation(std::vector<ElementaryTensor> terms, CoefficientTensor target);

  /// Target is taken to be the sum of the terms.
  static Representation from_terms(int rows, int cols,
                                   std::vector<ElementaryTensor> terms);

  int rows() const { return target_.rows(); }
  int cols() const { return target_.cols(); }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<ElementaryTensor>& terms() const { return terms_; }
  const ElementaryTensor& term(std::size_t i) const { return terms_.at(i); }
  const CoefficientTensor& target() const { return target_; }

 private:
  std::vector<ElementaryTensor> terms_;
  CoefficientTensor target_;
};

/// Checks every term against the given shape; throws DimensionError.
void check_terms(const std::vector<ElementaryTensor>& terms, int rows, int cols);

/// Coefficient matrix of the summed elementary tensors.
CoefficientTensor outer_sum(const Representation& rep);

/// Sum of the first p terms, 0 <= p <= N.
CoefficientTensor prefix(const Representation& rep, std::size_t p);

/// ||a - b||_F <= tol * (1 + ||b||_F)
bool approx_equal(const Matrix& a, const Matrix& b, double tol = kReconstructionTol);

/// Row-major replication layout: N = n * m terms, p = q * m + r.
struct ReplicationPlan {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t total = 0;
  double c = 2.0;

  ReplicationPlan() = default;
  ReplicationPlan(std::size_t m, std::size_t n, double c);

  /// Splits a prefix length p (0 <= p <= total) into full rows q and a
  /// remainder r with 0 <= r < m.
  std::pair<std::size_t, std::size_t> split(std::size_t p) const;
};

/// One telescoping block: terms [begin, end) of a series.
struct SeriesBlock {
  int index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double block_norm = 0.0;

  std::size_t size() const { return end - begin; }
};

}  // namespace tensorseries
