#pragma once

// Test-side reference constructions. Nothing here calls into the library, so
// agreement with it is an independent check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// [n]_q by direct summation in long double.
inline long double qsum(long double q, std::size_t n) {
  long double s = 0.0L, p = 1.0L;
  for (std::size_t k = 0; k < n; ++k) {
    s += p;
    p *= q;
  }
  return s;
}

/// Truncated annihilator with sqrt([n]_q) on the superdiagonal.
inline Mat annihilator(std::size_t dim, double q = 1.0) {
  Mat a = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t n = 1; n < dim; ++n) {
    a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) =
        std::sqrt(static_cast<double>(qsum(q, n)));
  }
  return a;
}

inline double block_norm(const Mat& m, std::size_t keep) {
  const auto k = static_cast<Eigen::Index>(keep);
  return m.topLeftCorner(k, k).norm();
}

inline Mat random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Mat> qr(z);
  return qr.householderQ() * Mat::Identity(z.rows(), z.cols());
}

inline Mat random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = cplx(g(rng), g(rng));
  }
  return 0.5 * (z + z.adjoint());
}

/// M(J) = sum J^k / k! for the boson spectrum, or sum J^k / ([1]_q ... [k]_q)
/// for the quon one, summed in long double until the terms stop mattering.
inline long double big_M(long double J, long double q, bool boson) {
  long double term = 1.0L, sum = 1.0L;
  for (std::size_t k = 1; k < 20000; ++k) {
    const long double eps = boson ? static_cast<long double>(k) : qsum(q, k);
    term *= J / eps;
    sum += term;
    if (term < 1e-30L * sum) break;
  }
  return sum;
}

}  // namespace oracle
