#include <doctest.h>

#include <cmath>

#include "isospec/coherent.hpp"
#include "isospec/intertwining.hpp"
#include "oracles.hpp"

using namespace isospec;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Config;
}

VectorCSParams cs(double J1, double J2, double gamma, double delta) {
  VectorCSParams p;
  p.J1 = J1;
  p.J2 = J2;
  p.gamma = gamma;
  p.delta = delta;
  return p;
}

const GKSpectrumData& boson_data() {
  static const GKSpectrumData d = spectrum_from_fock(FockSpec::boson(2), 4096);
  return d;
}

}  // namespace

TEST_CASE("boson spectrum: eps_n = n and eps_n! = Gamma(n + 1)") {
  const auto& d = boson_data();
  CHECK(d.eps[7] == 7.0);
  CHECK(d.shift == 0.0);
  CHECK(std::isinf(d.radius));
  for (std::size_t n : {0u, 1u, 5u, 12u, 20u}) {
    CHECK(d.rho(n) == doctest::Approx(std::tgamma(double(n) + 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("quon spectrum: radius 1/(1-q); q <= 0 is not increasing") {
  const GKSpectrumData d = spectrum_from_fock(FockSpec::quon(0.5, 2), 512);
  CHECK(d.radius == doctest::Approx(2.0));
  CHECK(d.eps[3] == doctest::Approx(1.75));
  CHECK(kind_of([] { spectrum_from_fock(FockSpec::quon(-0.5, 2), 64); }) == ErrorKind::Degenerate);
}

TEST_CASE("explicit spectra are shifted to eps_0 = 0 and must increase") {
  const GKSpectrumData d = spectrum_from_values({2.0, 3.0, 5.5}, true);
  CHECK(d.shift == 2.0);
  CHECK(d.eps == std::vector<double>{0.0, 1.0, 3.5});
  CHECK(d.rho(2) == doctest::Approx(3.5));
  CHECK(kind_of([] { spectrum_from_values({0.0, 1.0, 1.0}, true); }) == ErrorKind::Degenerate);
  RealVector v(3);
  v << 1.0, 1.0, 2.0;
  const EigenSystem es = hermitian_eigensystem(Operator::diagonal(v));
  CHECK(kind_of([&] { spectrum_from_eigensystem(es); }) == ErrorKind::Degenerate);
}

TEST_CASE("M(J) against extended-precision series") {
  for (double J : {0.0, 0.3, 1.0, 4.0, 25.0}) {
    const MSeries m = big_M(J, boson_data());
    CHECK(m.value == doctest::Approx(std::exp(J)).epsilon(1e-13));
    CHECK(m.tail_bound <= 1e-14 * std::max(1.0, m.value));
  }
  const GKSpectrumData q = spectrum_from_fock(FockSpec::quon(0.5, 2), 4096);
  for (double J : {0.2, 1.0, 1.8}) {
    const double expected = static_cast<double>(oracle::big_M(J, 0.5L, false));
    CHECK(big_M(J, q).value == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(kind_of([&] { big_M(-0.1, q); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { big_M(2.0, q); }) == ErrorKind::Domain);
}

TEST_CASE("vector coherent state coefficients match the closed form") {
  VectorCSParams p;
  p.J1 = 0.8;
  p.J2 = 2.5;
  p.gamma = 0.4;
  p.delta = 0.5;
  const VectorCoherentState s = synthesize_vector_cs(p, boson_data());
  const double norm2 = std::exp(0.8) + std::exp(2.5);
  for (std::size_t n : {0u, 1u, 4u, 9u}) {
    const double fact = std::tgamma(double(n) + 1.0);
    const cplx b = std::sqrt(std::pow(0.8, n) / fact / norm2) *
                   std::polar(1.0, -(double(n) + 0.5) * 0.4);
    const cplx f = std::sqrt(std::pow(2.5, n) / fact / norm2) *
                   std::polar(1.0, +(double(n) + 0.5) * 0.4);
    CHECK(std::abs(s.b[n] - b) < 1e-14);
    CHECK(std::abs(s.f[n] - f) < 1e-14);
  }
  CHECK(std::abs(s.norm() - 1.0) < 1e-14);
}

TEST_CASE("property: action identity and temporal stability over a parameter sweep") {
  const auto& d = boson_data();
  for (double J1 : {0.0, 0.7, 3.0}) {
    for (double J2 : {0.0, 1.1, 6.0}) {
      for (double gamma : {-2.0, 0.0, 0.9}) {
        VectorCSParams p;
        p.J1 = J1;
        p.J2 = J2;
        p.gamma = gamma;
        p.delta = 0.25;
        const VectorCoherentState s = synthesize_vector_cs(p, d);
        const double M1 = std::exp(J1), M2 = std::exp(J2);
        const double closed = (J1 * M1 + J2 * M2) / (M1 + M2);
        CHECK(std::abs(action_identity(s, d).expectation - closed) < 1e-12 * std::max(1.0, closed));
        VectorCSParams later = p;
        later.gamma += 2.5;
        later.n_max = s.size() - 1;
        CHECK(susy_distance(evolve(s, 2.5, d), synthesize_vector_cs(later, d)) < 1e-12);
      }
    }
  }
}

TEST_CASE("A_gamma eigen-relation holds only at the matching angle") {
  const auto& d = boson_data();
  VectorCSParams p;
  p.J1 = 1.0;
  p.J2 = 2.0;
  p.gamma = 0.6;
  const VectorCoherentState s = synthesize_vector_cs(p, d);
  CHECK(check_A_eigen_relation(s, 0.6, d).residual < 1e-12);
  const EigenRelation off = check_A_eigen_relation(s, 1.3, d);
  CHECK(off.residual > 0.01);
  CHECK(off.proportionality_residual > 0.01);
  // A_gamma^dag is the adjoint of A_gamma in the coefficient inner product
  auto inner = [](const VectorCoherentState& x, const VectorCoherentState& y) {
    cplx acc = 0.0;
    const std::size_t n = std::min(x.size(), y.size());
    for (std::size_t k = 0; k < n; ++k) acc += std::conj(x.b[k]) * y.b[k] + std::conj(x.f[k]) * y.f[k];
    return acc;
  };
  VectorCSParams tp = cs(0.4, 0.9, -0.3, 1.0);
  tp.n_max = s.size() - 1;
  const VectorCoherentState tt = synthesize_vector_cs(tp, d);
  const cplx lhs = inner(tt, apply_A_gamma(s, 0.2, d));
  const cplx rhs = inner(apply_A_gamma_adjoint(tt, 0.2, d), s);
  CHECK(std::abs(lhs - rhs) < 1e-14);
}

TEST_CASE("states are refused outside their domain") {
  const auto& d = boson_data();
  CHECK(kind_of([&] { synthesize_vector_cs(cs(1.0, 1.0, 0.0, -1.0), d); }) ==
        ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { synthesize_vector_cs(cs(-1.0, 1.0, 0.0, 1.0), d); }) ==
        ErrorKind::Domain);
}

TEST_CASE("scalar states: eigen-relation, N^2 = M, evolution") {
  const auto& d = boson_data();
  const ScalarGKState s = scalar_gk_state(1.0, 0.5, d);
  CHECK(s.M == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(scalar_eigen_residual(s, d) < 1e-14);
  double n2 = 0.0;
  for (const auto& c : s.c) n2 += std::norm(c);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-14));
  const auto e = evolve_scalar(s.c, 0.7, d);
  const ScalarGKState later = scalar_gk_state(1.0, 1.2, d);
  for (std::size_t n = 0; n < s.c.size(); ++n) CHECK(std::abs(e[n] - later.c[n]) < 1e-14);
}

TEST_CASE("moments of e^{-u}: integer and half-integer orders against tgamma") {
  const MomentWeight w = MomentWeight::exponential(1.0);
  for (double s : {0.0, 0.5, 1.0, 2.5, 7.0, 15.0}) {
    CHECK(weight_moment(w, s).value == doctest::Approx(std::tgamma(s + 1.0)).epsilon(1e-11));
  }
  const MomentCheck ok = moment_check(w, boson_data(), 15);
  CHECK(ok.pass());
  CHECK(ok.rows.size() == 16);
  CHECK_FALSE(moment_check(MomentWeight::exponential(2.0), boson_data(), 15).pass());
}

TEST_CASE("frame operator: identity for delta > 0, cross term at delta = 0") {
  const GKSpectrumData d = spectrum_from_fock(FockSpec::boson(2), 64);
  const MomentWeight w = MomentWeight::exponential(1.0);
  FrameOptions opts;
  opts.leading = 6;
  const FrameDefect pos = frame_operator_defect(d, w, 0.5, opts);
  CHECK(pos.max_defect < 1e-8);
  CHECK(pos.defect.rows() == 12);
  const FrameDefect zero = frame_operator_defect(d, w, 0.0, opts);
  CHECK(zero.cross_corner == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(zero.max_defect_outside_cross < 1e-8);
  CHECK(std::abs(zero.defect(0, 6) - cplx(1.0)) < 1e-8);
  CHECK(std::abs(zero.defect(6, 0) - cplx(1.0)) < 1e-8);
  // finite-Gamma leakage stays under the 1/Gamma envelope and decays like it
  for (const auto& row : pos.finite_gamma) {
    CHECK(row.leakage <= row.envelope * (1.0 + 1e-9));
    CHECK(row.oracle_error < 1e-10);
  }
  CHECK(pos.decay_slope == doctest::Approx(-1.0).epsilon(0.25));
  CHECK(kind_of([&] { frame_operator_defect(d, MomentWeight::exponential(3.0), 0.5, opts); }) ==
        ErrorKind::HypothesisFailure);
}

TEST_CASE("X operator classification") {
  // constant alpha: x1 = alpha * unitary
  {
    AngularParams ap;
    const FiniteExample ex = angular_example(ap);
    const IntertwinedPair pair = construct_partner(ex.h1, ex.x1);
    const EigenSystem es1 = hermitian_eigensystem(ex.h1);
    const EigenSystem es2 = hermitian_eigensystem(pair.h2);
    const XOperator xop = build_X_operator(ex.x1, es1, es2);
    CHECK(xop.basis_defect < 1e-13);
    CHECK(xop.structure_residual < 1e-13);
    for (Eigen::Index k = 0; k < 3; ++k) CHECK(xop.alpha1(k) == doctest::Approx(ap.alpha));
    const XRelationReport rep =
        check_X_relations(xop, cs(0.3, 1.2, 0.4, 1.0), spectrum_from_eigensystem(es1));
    CHECK(rep.kind == XRelationCase::ConstantAlpha);
    REQUIRE(rep.residual.has_value());
    CHECK(*rep.residual < 1e-12);
  }
  // generic: alpha_n = sqrt((n+1)(n+2)) is neither constant nor eps_n
  {
    const Ladder lad = build_ladder(FockSpec::boson(8));
    const Operator h1 = lad.a_dagger * lad.a;
    const Operator x1 = power(lad.a_dagger, 2);
    const IntertwinedPair pair = construct_partner(h1, x1);
    const EigenSystem es1 = hermitian_eigensystem(h1);
    const EigenSystem es2 = hermitian_eigensystem(pair.h2);
    const XRelationReport rep = check_X_relations(build_X_operator(x1, es1, es2), VectorCSParams{},
                                                  spectrum_from_eigensystem(es1));
    CHECK(rep.kind == XRelationCase::NoClosedRelation);
    CHECK_FALSE(rep.residual.has_value());
    CHECK(to_string(rep.kind) == "no closed relation");
  }
}
