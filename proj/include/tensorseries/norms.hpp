#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tensorseries/core.hpp"

namespace tensorseries {

enum class NormKind {
  frobenius,
  entrywise_l1,
  entrywise_max,
  spectral,
  nuclear,
  injective_l1l1,
  grid_sup,
};

/// Stable lowercase names, as accepted on the command line.
std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view name);
const std::vector<NormKind>& all_norm_kinds();

/// Largest dim(Y) for which injective_l1l1 enumerates sign vectors.
inline constexpr int kMaxInjectiveEnumerationDim = 20;

double vector_norm(VectorNorm kind, const Vector& v);
double vector_norm(const SpaceSpec& spec, const Vector& v);

/// Evaluates one of the exactly computable norms on X (x) Y.
///
/// grid_sup reads columns as samples t of a function K -> X and takes the
/// X-space norm of each column; the remaining kinds ignore the vector norms
/// of the spaces.
class NormEvaluator {
 public:
  NormEvaluator(NormKind kind, SpaceSpec space_x, SpaceSpec space_y);

  /// Picks the spaces under which `kind` is a crossnorm (euclidean for the
  /// SVD norms, l1 for entrywise_l1 and injective_l1l1).
  static NormEvaluator natural(NormKind kind, int rows, int cols);

  NormKind kind() const { return kind_; }
  const SpaceSpec& space_x() const { return space_x_; }
  const SpaceSpec& space_y() const { return space_y_; }
  std::string name() const { return std::string(to_string(kind_)); }

  double operator()(const CoefficientTensor& u) const;
  double operator()(const Matrix& u) const;
  double operator()(const ElementaryTensor& t) const;

 private:
  void check_shape(const Matrix& u) const;

  NormKind kind_;
  SpaceSpec space_x_;
  SpaceSpec space_y_;
};

double eval_norm(const NormEvaluator& ev, const CoefficientTensor& u);

/// max over psi in {+-1}^cols of ||U psi||_1.
double injective_l1l1_norm(const Matrix& u);

/// Result of comparing alpha(x (x) y) with ||x|| ||y||.
struct CrossnormReport {
  double tensor_norm = 0.0;
  double product_of_norms = 0.0;
  double defect = 0.0;
};

CrossnormReport crossnorm_check(const NormEvaluator& ev, const Vector& x, const Vector& y);

/// A possibly degenerate seminorm on coefficient matrices of a fixed shape.
/// Cheap to copy; the evaluation function is shared.
class Seminorm {
 public:
  using Fn = std::function<double(const Matrix&)>;

  Seminorm(std::string name, int rows, int cols, Fn fn);
  Seminorm(const NormEvaluator& ev);  // NOLINT: a norm is a seminorm

  /// max over the selected columns of the vector norm of each column.
  static Seminorm column_sup(std::vector<int> columns, int rows, int cols,
                             VectorNorm inner = VectorNorm::euclidean);

  const std::string& name() const { return name_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double operator()(const Matrix& u) const;
  double operator()(const CoefficientTensor& u) const { return (*this)(u.coeffs()); }
  double operator()(const ElementaryTensor& t) const;

 private:
  std::string name_;
  int rows_;
  int cols_;
  std::shared_ptr<const Fn> fn_;
};

/// Increasing sequence of seminorms alpha_1 <= alpha_2 <= ... . Stage j uses
/// at(j); indices beyond the list reuse the last member.
class SeminormFamily {
 public:
  explicit SeminormFamily(std::vector<Seminorm> members);
  static SeminormFamily single(const Seminorm& s) { return SeminormFamily({s}); }

  /// Sup seminorms on nested dyadic subgrids of a grid with 2^levels + 1
  /// points: member j looks at every 2^(levels - j)-th column.
  static SeminormFamily nested_grid_sup(int levels, int rows,
                                        VectorNorm inner = VectorNorm::euclidean);

  const Seminorm& at(int stage) const;
  std::size_t size() const { return members_.size(); }
  const Seminorm& finest() const { return members_.back(); }

  /// Checks alpha_j(u) <= alpha_{j+1}(u) (up to `tol` relative) on samples.
  bool is_monotone_on(const std::vector<Matrix>& samples, double tol = 1e-12) const;

 private:
  std::vector<Seminorm> members_;
};

}  // namespace tensorseries
