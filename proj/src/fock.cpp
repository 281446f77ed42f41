#include "isospec/fock.hpp"

#include <cmath>
#include <sstream>

namespace isospec {

void FockSpec::validate() const {
  if (dim < 2) throw Error(ErrorKind::InvalidParameter, "Fock space needs dim >= 2");
  if (kind == FockKind::Quon && !(std::abs(q) < 1.0)) {
    std::ostringstream msg;
    msg << "quon deformation must satisfy |q| < 1, got q = " << q;
    throw Error(ErrorKind::InvalidParameter, msg.str(), q);
  }
}

double q_number(double q, std::size_t n) {
  if (q == 1.0) return static_cast<double>(n);
  return (1.0 - std::pow(q, static_cast<double>(n))) / (1.0 - q);
}

QNumberTable QNumberTable::make(double q, std::size_t count) {
  QNumberTable t;
  t.alpha.resize(count + 1);
  for (std::size_t n = 0; n <= count; ++n) t.alpha[n] = q_number(q, n);
  t.beta.resize(count);
  for (std::size_t n = 0; n < count; ++n) t.beta[n] = std::sqrt(t.alpha[n + 1]);
  t.alpha.pop_back();
  return t;
}

Ladder build_ladder(const FockSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.dim);
  const auto table = QNumberTable::make(spec.deformation(), spec.dim);
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = table.beta[static_cast<std::size_t>(n - 1)];
  Operator lower(std::move(a), true);
  return {lower, adjoint(lower)};
}

Operator number_operator(const FockSpec& spec) {
  const auto ladder = build_ladder(spec);
  return ladder.a_dagger * ladder.a;
}

Operator build_shift_intertwiner(const EigenSystem& es, std::size_t step) {
  const std::size_t d = es.source_dim;
  if (step == 0 || step >= d) {
    std::ostringstream msg;
    msg << "shift intertwiner: step " << step << " must lie in [1, " << d << ")";
    throw Error(ErrorKind::InvalidParameter, msg.str());
  }
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix x = Matrix::Zero(dd, dd);
  for (std::size_t l = 0; l + step < es.size(); ++l) {
    x += es.vector(l + step) * es.vector(l).adjoint();
  }
  return Operator(std::move(x), es.source_truncated);
}

FiniteExample two_level_matrices(const TwoLevelParams& p) {
  Matrix h(2, 2);
  h << p.a, p.c, std::conj(p.c), p.b;
  Matrix x(2, 2);
  x << 0.0, p.alpha, p.beta, 0.0;
  return {Operator(h), Operator(x)};
}

FiniteExample two_level_example(const TwoLevelParams& p) {
  if (p.alpha == cplx(0.0) || p.beta == cplx(0.0)) {
    throw Error(ErrorKind::InvalidParameter,
                "two-level example: alpha and beta must both be nonzero for N1 = x1^dag x1 "
                "to be invertible");
  }
  const double mod_gap = std::abs(std::abs(p.alpha) - std::abs(p.beta));
  if (p.c != cplx(0.0) && mod_gap > 1e-14 * std::max(std::abs(p.alpha), std::abs(p.beta))) {
    throw Error(ErrorKind::InvalidParameter,
                "two-level example: [x1 x1^dag, h1] = 0 requires c = 0 or |alpha| = |beta|",
                mod_gap);
  }
  return two_level_matrices(p);
}

Operator two_level_expected_partner(const TwoLevelParams& p) {
  Matrix h2(2, 2);
  if (p.c == cplx(0.0)) {
    h2 << p.b, 0.0, 0.0, p.a;
  } else {
    const double dphi = std::arg(p.alpha) - std::arg(p.beta);
    h2 << p.b, std::conj(p.c) * std::polar(1.0, dphi), p.c * std::polar(1.0, -dphi), p.a;
  }
  return Operator(std::move(h2));
}

FiniteExample angular_matrices(const AngularParams& p) {
  const cplx i(0.0, 1.0);
  Matrix h(3, 3);
  h << 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0;
  h *= p.hbar / std::sqrt(2.0);
  Matrix x(3, 3);
  x << 0.0, i, 0.0, -i, 0.0, 0.0, 0.0, 0.0, 1.0;
  x *= p.alpha;
  return {Operator(h), Operator(x)};
}

FiniteExample angular_example(const AngularParams& p) {
  if (p.alpha == 0.0) {
    throw Error(ErrorKind::InvalidParameter,
                "angular example: alpha must be nonzero for N1 = alpha^2 1 to be invertible");
  }
  if (!(p.hbar > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "angular example: hbar must be positive");
  }
  return angular_matrices(p);
}

Operator angular_expected_partner(const AngularParams& p) {
  const cplx i(0.0, 1.0);
  Matrix h2(3, 3);
  h2 << 0.0, -1.0, i, -1.0, 0.0, 0.0, -i, 0.0, 0.0;
  h2 *= p.hbar / std::sqrt(2.0);
  return Operator(std::move(h2));
}

}  // namespace isospec
