#pragma once

#include <cmath>

#include "tensorseries/core.hpp"

namespace tensorseries {

/// Entrywise Neumaier (improved Kahan) summation of matrices. The running
/// error term is folded back in on read.
class CompensatedMatrixSum {
 public:
  CompensatedMatrixSum(int rows, int cols)
      : sum_(Matrix::Zero(rows, cols)), compensation_(Matrix::Zero(rows, cols)) {}

  void add(const Matrix& term) {
    for (Eigen::Index j = 0; j < sum_.cols(); ++j)
      for (Eigen::Index i = 0; i < sum_.rows(); ++i) {
        const double value = term(i, j);
        double& s = sum_(i, j);
        const double t = s + value;
        if (std::abs(s) >= std::abs(value))
          compensation_(i, j) += (s - t) + value;
        else
          compensation_(i, j) += (value - t) + s;
        s = t;
      }
  }

  void add(const ElementaryTensor& term) { add(term.outer()); }

  Matrix value() const { return sum_ + compensation_; }

 private:
  Matrix sum_;
  Matrix compensation_;
};

}  // namespace tensorseries
