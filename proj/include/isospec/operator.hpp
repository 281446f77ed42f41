#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isospec/error.hpp"

namespace isospec {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative Frobenius asymmetry accepted as "Hermitian" throughout.
inline constexpr double kHermitianTol = 1e-10;

/// Dense square complex operator.
///
/// `band` is the largest |i - j| with a nonzero entry and is recomputed from
/// the entries, so it is always exact. `truncated` marks operators that are
/// finite sections of infinite-dimensional ones (Fock-space ladders and
/// everything built from them); their identities hold only away from the
/// truncation corner, and `band` then says how far that corner leaks.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix entries, bool truncated = false);

  static Operator identity(std::size_t dim, bool truncated = false);
  static Operator zero(std::size_t dim, bool truncated = false);
  static Operator diagonal(const RealVector& diag, bool truncated = false);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t band() const { return band_; }
  bool is_dense() const { return dim() == 0 || band_ + 1 >= dim(); }
  bool truncated() const { return truncated_; }

  const Matrix& matrix() const { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  double frobenius() const { return m_.norm(); }

  /// ||A - A^dag||_F / ||A||_F, zero for the zero operator.
  double hermitian_asymmetry() const;

  Operator operator+(const Operator& other) const;
  Operator operator-(const Operator& other) const;
  Operator operator*(const Operator& other) const;
  Operator operator*(cplx s) const;
  friend Operator operator*(cplx s, const Operator& a) { return a * s; }

  Vector apply(const Vector& v) const;

  bool operator==(const Operator& other) const;

 private:
  Matrix m_;
  std::size_t band_ = 0;
  bool truncated_ = false;
};

Operator multiply(const Operator& a, const Operator& b);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);
Operator adjoint(const Operator& a);
Operator power(const Operator& a, unsigned exponent);

/// Identities on truncated operators are asserted on the leading
/// (dim - margin) x (dim - margin) block only.
struct InteriorSpec {
  std::size_t margin = 0;

  std::size_t size(std::size_t dim) const;
};

double interior_norm(const Operator& a, InteriorSpec spec);
double interior_norm(const Matrix& a, InteriorSpec spec);
/// Norm of the interior components of a vector.
double interior_norm(const Vector& v, InteriorSpec spec);

/// Default margin for an identity built from the given factors: the sum of
/// the bands of the truncated ones. Exact finite matrices contribute nothing.
std::size_t default_margin(std::initializer_list<const Operator*> factors);

/// Ascending spectral decomposition of a Hermitian operator.
///
/// Eigenvector phases are fixed so the largest-modulus component (first one
/// on ties) is real and positive, which makes the decomposition reproducible.
/// Eigenvalues closer than 1e-8 of the spectral range form a degenerate
/// cluster.
struct EigenSystem {
  RealVector values;
  Matrix vectors;
  std::size_t source_dim = 0;
  bool source_truncated = false;
  double reconstruction_residual = 0.0;
  /// Half-open [first, last) index ranges of clusters with more than one value.
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_clusters;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  Vector vector(std::size_t n) const { return vectors.col(static_cast<Eigen::Index>(n)); }
  double value(std::size_t n) const { return values(static_cast<Eigen::Index>(n)); }
  bool is_degenerate(std::size_t n) const;
};

inline constexpr double kDegeneracyRelGap = 1e-8;

EigenSystem hermitian_eigensystem(const Operator& h);

/// e^{iB} through the spectral decomposition of a Hermitian B.
Operator unitary_from_hermitian(const Operator& b);

/// ||U^dag U - 1||_F.
double unitarity_defect(const Operator& u);

}  // namespace isospec
