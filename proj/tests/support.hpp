#pragma once

#include <random>
#include <vector>

#include "tensorseries/core.hpp"

namespace testing_support {

using tensorseries::ElementaryTensor;
using tensorseries::Matrix;
using tensorseries::Vector;

inline Matrix gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = n(rng);
  return m;
}

inline Vector gaussian_vector(std::mt19937_64& rng, int size) {
  return gaussian_matrix(rng, size, 1).col(0);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::vector<ElementaryTensor> random_terms(std::mt19937_64& rng, int rows, int cols,
                                                  int count) {
  std::vector<ElementaryTensor> terms;
  for (int k = 0; k < count; ++k)
    terms.push_back({gaussian_vector(rng, rows), gaussian_vector(rng, cols)});
  return terms;
}

}  // namespace testing_support
