#include "isospec/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

namespace isospec {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::NotHermitian: return "not_hermitian";
    case ErrorKind::HypothesisFailure: return "hypothesis_failure";
    case ErrorKind::IllConditioned: return "ill_conditioned";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::InvalidParameter: return "invalid_parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

std::size_t detect_band(const Matrix& m) {
  std::size_t band = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != cplx(0.0, 0.0)) {
        band = std::max(band, static_cast<std::size_t>(std::abs(i - j)));
      }
    }
  }
  return band;
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

}  // namespace

Operator::Operator(Matrix entries, bool truncated)
    : m_(std::move(entries)), truncated_(truncated) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "operator entries must form a square array");
  }
  band_ = detect_band(m_);
}

Operator Operator::identity(std::size_t dim, bool truncated) {
  const auto d = static_cast<Eigen::Index>(dim);
  return Operator(Matrix::Identity(d, d), truncated);
}

Operator Operator::zero(std::size_t dim, bool truncated) {
  const auto d = static_cast<Eigen::Index>(dim);
  return Operator(Matrix::Zero(d, d), truncated);
}

Operator Operator::diagonal(const RealVector& diag, bool truncated) {
  return Operator(diag.cast<cplx>().asDiagonal().toDenseMatrix(), truncated);
}

double Operator::hermitian_asymmetry() const {
  const double scale = m_.norm();
  if (scale == 0.0) return 0.0;
  return (m_ - m_.adjoint()).norm() / scale;
}

Operator Operator::operator+(const Operator& other) const {
  require_same_dim(*this, other, "add");
  return Operator(m_ + other.m_, truncated_ || other.truncated_);
}

Operator Operator::operator-(const Operator& other) const {
  require_same_dim(*this, other, "subtract");
  return Operator(m_ - other.m_, truncated_ || other.truncated_);
}

Operator Operator::operator*(const Operator& other) const { return multiply(*this, other); }

Operator Operator::operator*(cplx s) const { return Operator(m_ * s, truncated_); }

Vector Operator::apply(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "apply: vector length does not match operator");
  }
  return m_ * v;
}

bool Operator::operator==(const Operator& other) const {
  return truncated_ == other.truncated_ && m_.rows() == other.m_.rows() && m_ == other.m_;
}

namespace {

/// Narrow bands (ladders and their low powers) go through the sparse kernel.
bool narrow(const Operator& a) { return a.dim() >= 64 && 8 * (a.band() + 1) <= a.dim(); }

Matrix product(const Operator& a, const Operator& b) {
  if (narrow(a)) return a.matrix().sparseView() * b.matrix();
  if (narrow(b)) return a.matrix() * b.matrix().sparseView();
  return a.matrix() * b.matrix();
}

}  // namespace

Operator multiply(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "multiply");
  return Operator(product(a, b), a.truncated() || b.truncated());
}

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "commutator");
  return Operator(product(a, b) - product(b, a), a.truncated() || b.truncated());
}

Operator anticommutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "anticommutator");
  return Operator(product(a, b) + product(b, a), a.truncated() || b.truncated());
}

Operator adjoint(const Operator& a) { return Operator(a.matrix().adjoint(), a.truncated()); }

Operator power(const Operator& a, unsigned exponent) {
  Operator result = Operator::identity(a.dim(), a.truncated());
  for (unsigned k = 0; k < exponent; ++k) result = result * a;
  return result;
}

std::size_t InteriorSpec::size(std::size_t dim) const {
  if (margin >= dim) {
    std::ostringstream msg;
    msg << "interior margin " << margin << " leaves nothing of a dimension-" << dim
        << " operator";
    throw Error(ErrorKind::Config, msg.str());
  }
  return dim - margin;
}

double interior_norm(const Matrix& a, InteriorSpec spec) {
  const auto m = static_cast<Eigen::Index>(spec.size(static_cast<std::size_t>(a.rows())));
  return a.topLeftCorner(m, m).norm();
}

double interior_norm(const Operator& a, InteriorSpec spec) {
  return interior_norm(a.matrix(), spec);
}

double interior_norm(const Vector& v, InteriorSpec spec) {
  const auto m = static_cast<Eigen::Index>(spec.size(static_cast<std::size_t>(v.size())));
  return v.head(m).norm();
}

std::size_t default_margin(std::initializer_list<const Operator*> factors) {
  std::size_t margin = 0;
  for (const Operator* op : factors) {
    if (op->truncated()) margin += op->band();
  }
  return margin;
}

bool EigenSystem::is_degenerate(std::size_t n) const {
  return std::any_of(degenerate_clusters.begin(), degenerate_clusters.end(),
                     [n](const auto& c) { return n >= c.first && n < c.second; });
}

EigenSystem hermitian_eigensystem(const Operator& h) {
  const double asym = h.hermitian_asymmetry();
  if (asym >= kHermitianTol) {
    std::ostringstream msg;
    msg << "hermitian_eigensystem: operator is not Hermitian (relative asymmetry " << asym
        << ")";
    throw Error(ErrorKind::NotHermitian, msg.str(), asym);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eigensystem: eigensolver did not converge");
  }

  EigenSystem es;
  es.values = solver.eigenvalues();
  es.vectors = solver.eigenvectors();
  es.source_dim = h.dim();
  es.source_truncated = h.truncated();

  for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
    auto col = es.vectors.col(k);
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double mag = std::abs(col(i));
      if (mag > best * (1.0 + 1e-12)) {
        best = mag;
        pivot = i;
      }
    }
    if (best > 0.0) col *= std::conj(col(pivot)) / std::abs(col(pivot));
  }

  const Matrix recon = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
  es.reconstruction_residual = (h.matrix() - recon).norm();

  const auto n = es.values.size();
  if (n > 1) {
    const double range = es.values(n - 1) - es.values(0);
    const double gap_tol = kDegeneracyRelGap * range;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
      const bool split = (k == n) || (es.values(k) - es.values(k - 1) > gap_tol);
      if (split) {
        if (k - start > 1) {
          es.degenerate_clusters.emplace_back(static_cast<std::size_t>(start),
                                              static_cast<std::size_t>(k));
        }
        start = k;
      }
    }
  }
  return es;
}

Operator unitary_from_hermitian(const Operator& b) {
  const double asym = b.hermitian_asymmetry();
  if (asym >= kHermitianTol) {
    std::ostringstream msg;
    msg << "unitary_from_hermitian: generator is not Hermitian (relative asymmetry " << asym
        << ")";
    throw Error(ErrorKind::NotHermitian, msg.str(), asym);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(b.matrix());
  const Vector phases =
      solver.eigenvalues().unaryExpr([](double w) { return std::polar(1.0, w); });
  const Matrix& v = solver.eigenvectors();
  return Operator(v * phases.asDiagonal() * v.adjoint(), b.truncated());
}

double unitarity_defect(const Operator& u) {
  const auto d = static_cast<Eigen::Index>(u.dim());
  return (u.matrix().adjoint() * u.matrix() - Matrix::Identity(d, d)).norm();
}

}  // namespace isospec
