#include "isospec/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace isospec {

namespace {

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

void fill_log_rho(GKSpectrumData& d) {
  d.log_rho.assign(d.eps.size(), 0.0);
  for (std::size_t n = 1; n < d.eps.size(); ++n) d.log_rho[n] = d.log_rho[n - 1] + std::log(d.eps[n]);
}

/// log of J^n / eps_n!, with 0^0 = 1.
double log_term(double J, std::size_t n, const GKSpectrumData& d) {
  if (n == 0) return 0.0;
  if (J == 0.0) return -kInf;
  return static_cast<double>(n) * std::log(J) - d.log_rho[n];
}

void check_J(double J, const GKSpectrumData& d) {
  if (!(J >= 0.0) || !std::isfinite(J)) {
    std::ostringstream msg;
    msg << "J must be a finite nonnegative number, got " << J;
    throw Error(ErrorKind::Domain, msg.str(), J);
  }
  if (J >= d.radius) {
    std::ostringstream msg;
    msg << "M(J) diverges for J >= R: J = " << J << ", R = " << d.radius;
    throw Error(ErrorKind::Domain, msg.str(), J);
  }
}

double partial_M(double J, std::size_t terms, const GKSpectrumData& d) {
  double s = 0.0;
  for (std::size_t n = 0; n < terms; ++n) s += std::exp(log_term(J, n, d));
  return s;
}

std::vector<cplx> sector(double J, double phase_sign, double gamma, double delta, double log_2N,
                         std::size_t terms, const GKSpectrumData& d) {
  std::vector<cplx> out(terms);
  for (std::size_t n = 0; n < terms; ++n) {
    const double mag = std::exp(0.5 * (log_term(J, n, d) - log_2N));
    out[n] = std::polar(mag, phase_sign * (d.eps[n] + delta) * gamma);
  }
  return out;
}

double sq_norm(const std::vector<cplx>& v, std::size_t count) {
  double s = 0.0;
  for (std::size_t n = 0; n < std::min(count, v.size()); ++n) s += std::norm(v[n]);
  return s;
}

}  // namespace

double GKSpectrumData::rho(std::size_t n) const { return std::exp(log_rho.at(n)); }

GKSpectrumData spectrum_from_fock(const FockSpec& spec, std::size_t count) {
  spec.validate();
  if (count < 2) throw Error(ErrorKind::InvalidParameter, "spectrum needs at least two levels");
  GKSpectrumData d;
  d.eps.resize(count);
  if (spec.kind == FockKind::Boson) {
    for (std::size_t n = 0; n < count; ++n) d.eps[n] = static_cast<double>(n);
    d.radius = kInf;
    d.source = "boson";
  } else {
    // [n]_q is strictly increasing only for 0 < q < 1. The increments q^n
    // eventually fall below one ulp, so monotonicity is settled here
    // analytically rather than on the rounded values.
    if (!(spec.q > 0.0)) {
      std::ostringstream msg;
      msg << "quon spectrum [n]_q is not strictly increasing for q = " << spec.q
          << "; coherent states need 0 < q < 1";
      throw Error(ErrorKind::Degenerate, msg.str(), spec.q);
    }
    for (std::size_t n = 0; n < count; ++n) d.eps[n] = q_number(spec.q, n);
    d.radius = 1.0 / (1.0 - spec.q);
    std::ostringstream src;
    src << "quon q=" << spec.q;
    d.source = src.str();
  }
  fill_log_rho(d);
  return d;
}

GKSpectrumData spectrum_from_values(std::vector<double> values, bool finite) {
  if (values.empty()) throw Error(ErrorKind::InvalidParameter, "empty spectrum");
  GKSpectrumData d;
  d.shift = values.front();
  d.eps.resize(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) throw Error(ErrorKind::InvalidParameter, "non-finite eigenvalue");
    d.eps[n] = values[n] - d.shift;
  }
  d.eps[0] = 0.0;
  for (std::size_t n = 1; n < d.eps.size(); ++n) {
    if (!(d.eps[n] > d.eps[n - 1])) {
      std::ostringstream msg;
      msg << "coherent states need a strictly increasing spectrum; eps_" << n << " = " << d.eps[n]
          << " does not exceed eps_" << n - 1 << " = " << d.eps[n - 1];
      throw Error(ErrorKind::Degenerate, msg.str(), d.eps[n] - d.eps[n - 1]);
    }
  }
  d.finite = finite;
  d.radius = kInf;
  d.source = finite ? "finite list" : "list prefix";
  fill_log_rho(d);
  return d;
}

GKSpectrumData spectrum_from_eigensystem(const EigenSystem& es) {
  if (!es.degenerate_clusters.empty()) {
    const auto [first, last] = es.degenerate_clusters.front();
    std::ostringstream msg;
    msg << "coherent states need a nondegenerate spectrum; levels " << first << ".." << last - 1
        << " form a cluster";
    throw Error(ErrorKind::Degenerate, msg.str(), es.value(first));
  }
  std::vector<double> v(es.values.data(), es.values.data() + es.values.size());
  GKSpectrumData d = spectrum_from_values(std::move(v), true);
  d.source = "eigensystem";
  return d;
}

MSeries big_M(double J, const GKSpectrumData& data, double tail_tol) {
  check_J(J, data);
  if (J == 0.0) return {1.0, 1, 0.0};
  double partial = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double t = std::exp(log_term(J, n, data));
    partial += t;
    if (n + 1 == data.size()) {
      if (data.finite) return {partial, n + 1, 0.0};
      break;
    }
    const double r = J / data.eps[n + 1];
    if (r < 1.0) {
      const double bound = t * r / (1.0 - r);
      if (bound < tail_tol * std::max(1.0, partial)) return {partial, n + 1, bound};
    }
  }
  std::ostringstream msg;
  msg << "M(" << J << ") tail not certified below " << tail_tol << " within " << data.size()
      << " levels";
  throw Error(ErrorKind::Domain, msg.str(), J);
}

double VectorCoherentState::norm() const {
  return std::sqrt(sq_norm(b, b.size()) + sq_norm(f, f.size()));
}

VectorCoherentState synthesize_vector_cs(const VectorCSParams& p, const GKSpectrumData& data) {
  if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) {
    throw Error(ErrorKind::InvalidParameter, "delta must be a finite nonnegative number", p.delta);
  }
  if (!std::isfinite(p.gamma)) throw Error(ErrorKind::InvalidParameter, "gamma must be finite");
  if (!(p.tail_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tail_tol must be positive");
  const MSeries m1 = big_M(p.J1, data, p.tail_tol);
  const MSeries m2 = big_M(p.J2, data, p.tail_tol);
  std::size_t terms = std::max(m1.terms, m2.terms);
  if (p.n_max) {
    terms = *p.n_max + 1;
    if (terms > data.size()) {
      std::ostringstream msg;
      msg << "n_max = " << *p.n_max << " exceeds the " << data.size() << " available levels";
      throw Error(ErrorKind::InvalidParameter, msg.str());
    }
  }
  VectorCoherentState s;
  s.params = p;
  // normalise with the sums actually kept, so the norm is one up to rounding
  s.M1 = partial_M(p.J1, terms, data);
  s.M2 = partial_M(p.J2, terms, data);
  s.tail_bound = std::max(m1.tail_bound, m2.tail_bound);
  const double log_2N = std::log(s.M1 + s.M2);
  s.b = sector(p.J1, -1.0, p.gamma, p.delta, log_2N, terms, data);
  s.f = sector(p.J2, +1.0, p.gamma, p.delta, log_2N, terms, data);
  return s;
}

double susy_distance(const VectorCoherentState& s, const VectorCoherentState& t) {
  const std::size_t n = std::max(s.size(), t.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx sb = k < s.b.size() ? s.b[k] : cplx{};
    const cplx tb = k < t.b.size() ? t.b[k] : cplx{};
    const cplx sf = k < s.f.size() ? s.f[k] : cplx{};
    const cplx tf = k < t.f.size() ? t.f[k] : cplx{};
    acc += std::norm(sb - tb) + std::norm(sf - tf);
  }
  return std::sqrt(acc);
}

ActionIdentity action_identity(const VectorCoherentState& state, const GKSpectrumData& data) {
  ActionIdentity out;
  double e = 0.0;
  for (std::size_t n = 0; n < state.size(); ++n) {
    e += data.eps[n] * (std::norm(state.b[n]) + std::norm(state.f[n]));
  }
  out.expectation = data.omega * e;
  const auto& p = state.params;
  const double M1 = big_M(p.J1, data, p.tail_tol).value;
  const double M2 = big_M(p.J2, data, p.tail_tol).value;
  out.closed_form = data.omega * (p.J1 * M1 + p.J2 * M2) / (M1 + M2);
  out.difference = std::abs(out.expectation - out.closed_form);
  return out;
}

VectorCoherentState evolve(const VectorCoherentState& state, double t, const GKSpectrumData& data) {
  VectorCoherentState out = state;
  const double delta = state.params.delta;
  for (std::size_t n = 0; n < state.size(); ++n) {
    out.b[n] *= std::polar(1.0, -(data.eps[n] + delta) * t);
    out.f[n] *= std::polar(1.0, (data.eps[n] + delta) * t);
  }
  out.params.gamma += t;
  return out;
}

VectorCoherentState apply_A_gamma(const VectorCoherentState& state, double gamma,
                                  const GKSpectrumData& data) {
  VectorCoherentState out = state;
  const std::size_t k = state.size();
  for (std::size_t n = 1; n < k; ++n) {
    const double w = data.eps[n] - data.eps[n - 1];
    const double s = std::sqrt(data.eps[n]);
    out.b[n - 1] = s * std::polar(1.0, w * gamma) * state.b[n];
    out.f[n - 1] = s * std::polar(1.0, -w * gamma) * state.f[n];
  }
  if (k > 0) out.b[k - 1] = out.f[k - 1] = cplx{};
  return out;
}

VectorCoherentState apply_A_gamma_adjoint(const VectorCoherentState& state, double gamma,
                                          const GKSpectrumData& data) {
  VectorCoherentState out = state;
  const std::size_t k = state.size();
  for (std::size_t n = 1; n < k; ++n) {
    const double w = data.eps[n] - data.eps[n - 1];
    const double s = std::sqrt(data.eps[n]);
    out.b[n] = s * std::polar(1.0, -w * gamma) * state.b[n - 1];
    out.f[n] = s * std::polar(1.0, w * gamma) * state.f[n - 1];
  }
  if (k > 0) out.b[0] = out.f[0] = cplx{};
  return out;
}

EigenRelation check_A_eigen_relation(const VectorCoherentState& state, double gamma_op,
                                     const GKSpectrumData& data) {
  const VectorCoherentState a = apply_A_gamma(state, gamma_op, data);
  const double s1 = std::sqrt(state.params.J1);
  const double s2 = std::sqrt(state.params.J2);
  // the top component of A Psi has no source in the truncated state
  const std::size_t k = state.size() > 0 ? state.size() - 1 : 0;
  EigenRelation out;
  cplx num{};
  double den = 0.0;
  for (std::size_t n = 0; n < k; ++n) {
    num += std::conj(state.b[n]) * a.b[n] + std::conj(state.f[n]) * a.f[n];
    den += std::norm(state.b[n]) + std::norm(state.f[n]);
  }
  const cplx c = den > 0.0 ? num / den : cplx{};
  double r = 0.0;
  double rp = 0.0;
  for (std::size_t n = 0; n < k; ++n) {
    r += std::norm(a.b[n] - s1 * state.b[n]) + std::norm(a.f[n] - s2 * state.f[n]);
    rp += std::norm(a.b[n] - c * state.b[n]) + std::norm(a.f[n] - c * state.f[n]);
  }
  out.residual = std::sqrt(r);
  out.proportionality_residual = std::sqrt(rp);
  return out;
}

double continuity_check(const VectorCSParams& p, const VectorCSParams& p0,
                        const GKSpectrumData& data) {
  return susy_distance(synthesize_vector_cs(p, data), synthesize_vector_cs(p0, data));
}

MomentWeight MomentWeight::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorKind::InvalidParameter, "exponential weight needs rate > 0");
  std::ostringstream name;
  name << "exponential rate=" << rate;
  return {name.str(), [rate](double u) { return rate * std::exp(-rate * u); }, kInf};
}

QuadratureResult weight_moment(const MomentWeight& weight, double s, double tol) {
  // an underflowed density wins over an overflowing power
  auto f = [&](double u) {
    if (u <= 0.0) return s == 0.0 ? weight.density(0.0) : 0.0;
    const double d = weight.density(u);
    return d == 0.0 ? 0.0 : d * std::pow(u, s);
  };
  QuadratureResult out;
  double l1 = 0.0;
  try {
    if (std::isinf(weight.radius)) {
      boost::math::quadrature::exp_sinh<double> rule;
      out.value = rule.integrate(f, 0.0, kInf, tol, &out.error_estimate, &l1);
    } else {
      boost::math::quadrature::tanh_sinh<double> rule;
      out.value = rule.integrate(f, 0.0, weight.radius, tol, &out.error_estimate, &l1);
    }
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Quadrature, std::string("moment quadrature failed: ") + e.what(), s);
  }
  if (!std::isfinite(out.value)) {
    throw Error(ErrorKind::Quadrature, "moment quadrature produced a non-finite value", s);
  }
  return out;
}

double MomentCheck::max_rel_error() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.rel_error);
  return m;
}

MomentCheck moment_check(const MomentWeight& weight, const GKSpectrumData& data,
                         std::size_t n_up_to, double tol) {
  if (n_up_to >= data.size()) {
    throw Error(ErrorKind::InvalidParameter, "moment check beyond the available levels");
  }
  MomentCheck out;
  out.tol = tol;
  for (std::size_t n = 0; n <= n_up_to; ++n) {
    const QuadratureResult q = weight_moment(weight, static_cast<double>(n));
    MomentRow row;
    row.n = n;
    row.computed = q.value;
    row.expected = data.rho(n);
    row.rel_error = std::abs(q.value - row.expected) / row.expected;
    row.error_estimate = q.error_estimate;
    out.rows.push_back(row);
  }
  return out;
}

namespace {

/// (1/2G) int_{-G}^{G} e^{-i w g} dg = (1/G) int_0^G cos(w g) dg, by composite
/// 10-point Gauss-Legendre with panels of at most two radians.
double numeric_gamma_average(double w, double G) {
  const double span = std::abs(w) * G;
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(span / 2.0)));
  const double h = G / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = h * static_cast<double>(p);
    acc += boost::math::quadrature::gauss<double, 10>::integrate(
        [w](double g) { return std::cos(w * g); }, a, a + h);
  }
  return acc / G;
}

}  // namespace

FrameDefect frame_operator_defect(const GKSpectrumData& data, const MomentWeight& weight,
                                  double delta, const FrameOptions& options) {
  const std::size_t K = options.leading;
  if (K == 0 || K > data.size()) {
    throw Error(ErrorKind::InvalidParameter, "frame block size must lie in [1, levels]");
  }
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidParameter, "delta must be nonnegative", delta);

  const MomentCheck mc = moment_check(weight, data, K - 1, options.moment_tol);
  if (!mc.pass()) {
    std::ostringstream msg;
    msg << "weight '" << weight.name << "' does not reproduce eps_n! (max relative error "
        << mc.max_rel_error() << ")";
    throw Error(ErrorKind::HypothesisFailure, msg.str(), mc.max_rel_error());
  }

  // half-integer moments mom[k] = int rho(u) u^{k/2} du
  std::vector<double> mom(2 * K - 1);
  for (std::size_t k = 0; k < mom.size(); ++k) {
    mom[k] = weight_moment(weight, 0.5 * static_cast<double>(k)).value;
  }

  const auto D2 = as_index(2 * K);
  Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(D2, D2);
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(D2, D2);
  for (std::size_t n = 0; n < K; ++n) {
    for (std::size_t m = 0; m < K; ++m) {
      const double norm = std::exp(-0.5 * (data.log_rho[n] + data.log_rho[m]));
      const auto i = as_index(n);
      const auto j = as_index(m);
      const auto K_ = as_index(K);
      amp(i, j) = amp(K_ + i, K_ + j) = mom[n + m] * mom[0] * norm;
      freq(i, j) = data.eps[n] - data.eps[m];
      freq(K_ + i, K_ + j) = -(data.eps[n] - data.eps[m]);
      amp(i, K_ + j) = amp(K_ + j, i) = mom[n] * mom[m] * norm;
      freq(i, K_ + j) = data.eps[n] + data.eps[m] + 2.0 * delta;
      freq(K_ + j, i) = -freq(i, K_ + j);
    }
  }
  const double zero_tol = 1e-12 * std::max(1.0, data.eps[K - 1] + delta);
  auto survives = [&](Eigen::Index i, Eigen::Index j) { return std::abs(freq(i, j)) <= zero_tol; };

  FrameDefect out;
  out.delta = delta;
  out.leading = K;
  out.defect = Matrix::Zero(D2, D2);
  for (Eigen::Index i = 0; i < D2; ++i) {
    for (Eigen::Index j = 0; j < D2; ++j) {
      const double F = survives(i, j) ? amp(i, j) : 0.0;
      out.defect(i, j) = F - (i == j ? 1.0 : 0.0);
    }
  }
  const auto K_ = as_index(K);
  out.cross_corner = std::abs(out.defect(0, K_));
  for (Eigen::Index i = 0; i < D2; ++i) {
    for (Eigen::Index j = 0; j < D2; ++j) {
      const double a = std::abs(out.defect(i, j));
      out.max_defect = std::max(out.max_defect, a);
      const bool corner = (i == 0 && j == K_) || (i == K_ && j == 0);
      if (!corner) out.max_defect_outside_cross = std::max(out.max_defect_outside_cross, a);
    }
  }

  std::map<double, double> cache;
  for (double G : options.finite_gammas) {
    if (!(G > 0.0)) throw Error(ErrorKind::InvalidParameter, "Gamma must be positive", G);
    cache.clear();
    FiniteGammaRow row;
    row.Gamma = G;
    for (Eigen::Index i = 0; i < D2; ++i) {
      for (Eigen::Index j = 0; j < D2; ++j) {
        if (survives(i, j)) continue;
        const double w = std::abs(freq(i, j));
        auto it = cache.find(w);
        if (it == cache.end()) it = cache.emplace(w, numeric_gamma_average(w, G)).first;
        const double avg = it->second;
        row.leakage = std::max(row.leakage, amp(i, j) * std::abs(avg));
        row.envelope = std::max(row.envelope, amp(i, j) / (w * G));
        row.oracle_error = std::max(row.oracle_error, std::abs(avg - std::sin(w * G) / (w * G)));
      }
    }
    out.finite_gamma.push_back(row);
  }
  if (out.finite_gamma.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(out.finite_gamma.size());
    for (const auto& r : out.finite_gamma) {
      const double x = std::log(r.Gamma);
      const double y = std::log(r.leakage);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.decay_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

XOperator build_X_operator(const Operator& x1, const EigenSystem& es1, const EigenSystem& es2,
                           double vanish_tol) {
  const std::size_t D = x1.dim();
  if (es1.source_dim != D || es2.source_dim != D) {
    throw Error(ErrorKind::DimensionMismatch, "X operator: x1 and eigensystems differ in dim");
  }
  if (!es1.degenerate_clusters.empty()) {
    throw Error(ErrorKind::Degenerate,
                "X operator needs h1 with a nondegenerate spectrum; a degenerate cluster was found");
  }
  const auto d = as_index(D);
  XOperator out;
  const Matrix images = x1.matrix().adjoint() * es1.vectors;
  out.alpha1 = images.colwise().norm().transpose();
  const double largest = out.alpha1.maxCoeff();
  out.basis2.resize(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    if (largest > 0.0 && out.alpha1(n) >= vanish_tol * largest) {
      out.basis2.col(n) = images.col(n) / out.alpha1(n);
    } else {
      out.basis2.col(n) = es2.vectors.col(n);
    }
  }
  out.basis_defect = (out.basis2.adjoint() * out.basis2 - Matrix::Identity(d, d)).norm();
  out.alpha2 = (x1.matrix() * out.basis2).colwise().norm().transpose();

  Matrix L = Matrix::Zero(2 * d, 2 * d);
  L.bottomLeftCorner(d, d) = x1.matrix().adjoint();
  out.L = Operator(L, x1.truncated());
  out.L_dagger = adjoint(out.L);

  Matrix W = Matrix::Zero(2 * d, 2 * d);
  W.topLeftCorner(d, d) = es1.vectors;
  W.bottomRightCorner(d, d) = out.basis2;
  out.X = W.adjoint() * (out.L + out.L_dagger).matrix() * W;

  Matrix ideal = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index n = 0; n < d; ++n) {
    ideal(d + n, n) = out.alpha1(n);
    ideal(n, d + n) = out.alpha1(n);
  }
  out.structure_residual = (out.X - ideal).norm();
  return out;
}

std::string to_string(XRelationCase c) {
  switch (c) {
    case XRelationCase::ConstantAlpha: return "constant alpha";
    case XRelationCase::AlphaEqualsEps: return "alpha equals eps";
    case XRelationCase::NoClosedRelation: return "no closed relation";
  }
  return "unknown";
}

XRelationReport check_X_relations(const XOperator& xop, const VectorCSParams& params,
                                  const GKSpectrumData& data, double class_tol) {
  const auto K = static_cast<std::size_t>(xop.alpha1.size());
  if (data.size() != K) {
    throw Error(ErrorKind::DimensionMismatch, "X relations: spectrum and X operator differ in size");
  }
  XRelationReport out;
  const double amax = xop.alpha1.maxCoeff();
  out.alpha_spread = amax - xop.alpha1.minCoeff();
  out.alpha = xop.alpha1.mean();
  for (std::size_t n = 0; n < K; ++n) {
    out.eps_gap = std::max(out.eps_gap, std::abs(xop.alpha1(as_index(n)) - data.eps[n]));
  }
  const double mismatch = (xop.alpha1 - xop.alpha2).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, amax);
  if (mismatch > class_tol * scale) {
    out.kind = XRelationCase::NoClosedRelation;
  } else if (out.alpha_spread <= class_tol * scale) {
    out.kind = XRelationCase::ConstantAlpha;
  } else if (out.eps_gap <= class_tol * std::max(1.0, data.eps.back())) {
    out.kind = XRelationCase::AlphaEqualsEps;
  } else {
    out.kind = XRelationCase::NoClosedRelation;
  }
  if (out.kind == XRelationCase::NoClosedRelation) return out;

  const VectorCoherentState psi = synthesize_vector_cs(params, data);
  VectorCSParams swapped = params;
  std::swap(swapped.J1, swapped.J2);
  swapped.gamma = -params.gamma;
  swapped.n_max = psi.size() - 1;
  const VectorCoherentState tilde = synthesize_vector_cs(swapped, data);

  const auto k = as_index(K);
  Vector v = Vector::Zero(2 * k);
  for (std::size_t n = 0; n < psi.size(); ++n) {
    v(as_index(n)) = psi.b[n];
    v(k + as_index(n)) = psi.f[n];
  }
  const Vector xv = xop.X * v;

  VectorCoherentState target = tilde;
  if (out.kind == XRelationCase::ConstantAlpha) {
    for (auto& c : target.b) c *= out.alpha;
    for (auto& c : target.f) c *= out.alpha;
  } else {
    // J~^{1/2} = diag(sqrt J2, sqrt J1) on (b, f), then A_{-gamma}^dag
    for (auto& c : target.b) c *= std::sqrt(params.J2);
    for (auto& c : target.f) c *= std::sqrt(params.J1);
    target = apply_A_gamma_adjoint(target, -params.gamma, data);
  }
  Vector t = Vector::Zero(2 * k);
  for (std::size_t n = 0; n < target.size(); ++n) {
    t(as_index(n)) = target.b[n];
    t(k + as_index(n)) = target.f[n];
  }
  out.residual = (xv - t).norm();
  return out;
}

ScalarGKState scalar_gk_state(double J, double gamma, const GKSpectrumData& data,
                              double tail_tol) {
  const MSeries m = big_M(J, data, tail_tol);
  ScalarGKState s;
  s.J = J;
  s.gamma = gamma;
  s.M = partial_M(J, m.terms, data);
  const double log_M = std::log(s.M);
  s.c.resize(m.terms);
  for (std::size_t n = 0; n < m.terms; ++n) {
    s.c[n] = std::polar(std::exp(0.5 * (log_term(J, n, data) - log_M)), -data.eps[n] * gamma);
  }
  return s;
}

std::vector<cplx> apply_a_gamma(const std::vector<cplx>& c, double gamma,
                                const GKSpectrumData& data) {
  std::vector<cplx> out(c.size());
  for (std::size_t n = 1; n < c.size(); ++n) {
    out[n - 1] = std::sqrt(data.eps[n]) *
                 std::polar(1.0, (data.eps[n] - data.eps[n - 1]) * gamma) * c[n];
  }
  return out;
}

std::vector<cplx> evolve_scalar(const std::vector<cplx>& c, double t, const GKSpectrumData& data) {
  std::vector<cplx> out(c.size());
  for (std::size_t n = 0; n < c.size(); ++n) {
    out[n] = c[n] * std::polar(1.0, -data.omega * data.eps[n] * t);
  }
  return out;
}

double scalar_eigen_residual(const ScalarGKState& s, const GKSpectrumData& data) {
  const auto a = apply_a_gamma(s.c, s.gamma, data);
  const double root = std::sqrt(s.J);
  double r = 0.0;
  for (std::size_t n = 0; n + 1 < s.c.size(); ++n) r += std::norm(a[n] - root * s.c[n]);
  return std::sqrt(r);
}

}  // namespace isospec
