#include "tensorseries/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace tensorseries {

namespace {

constexpr int kMaxSweeps = 80;

// Orthogonalizes the columns of `w` in place, accumulating rotations in `v`.
// Requires w.rows() >= w.cols().
void orthogonalize_columns(Matrix& w, Matrix& v) {
  const Eigen::Index n = w.cols();
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double cs = 1.0 / std::hypot(1.0, t);
        const double sn = cs * t;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = cs * wp - sn * wq;
          w(i, q) = sn * wp + cs * wq;
        }
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (!rotated) return;
  }
}

Svd tall_svd(const Matrix& a) {
  Matrix w = a;
  Matrix v = Matrix::Identity(a.cols(), a.cols());
  orthogonalize_columns(w, v);

  const Eigen::Index k = a.cols();
  Vector norms(k);
  for (Eigen::Index i = 0; i < k; ++i) norms(i) = w.col(i).norm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return norms(l) > norms(r); });

  Svd out;
  out.u = Matrix::Zero(a.rows(), k);
  out.sigma = Vector(k);
  out.v = Matrix(a.cols(), k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.sigma(i) = norms(src);
    out.v.col(i) = v.col(src);
    if (norms(src) > 0.0) out.u.col(i) = w.col(src) / norms(src);
  }
  return out;
}

}  // namespace

int Svd::rank(double rel_tol) const {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cut = rel_tol * sigma(0);
  int r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

Svd jacobi_svd(const Matrix& a) {
  if (a.rows() >= a.cols()) return tall_svd(a);
  Svd t = tall_svd(a.transpose());
  return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Vector singular_values(const Matrix& a) { return jacobi_svd(a).sigma; }

}  // namespace tensorseries
