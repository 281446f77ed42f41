#include <doctest.h>

#include <random>

#include "isospec/fock.hpp"
#include "isospec/intertwining.hpp"
#include "oracles.hpp"

using namespace isospec;

namespace {

Ladder boson(std::size_t D) { return build_ladder(FockSpec::boson(D)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Config;
}

}  // namespace

TEST_CASE("a^dag a with x1 = a^dag gives a a^dag") {
  const auto lad = boson(25);
  const IntertwinedPair pair = construct_partner(lad.a_dagger * lad.a, lad.a_dagger);
  const oracle::Mat a = oracle::annihilator(25);
  CHECK(pair.interior.margin == 2);
  CHECK(oracle::block_norm(pair.h2.matrix() - a * a.adjoint(), 23) < 1e-12);
  CHECK(pair.report.all_pass());
  // a annihilates the vacuum
  CHECK(pair.report.annihilated == std::vector<std::size_t>{0});
  CHECK(pair.report.interior_kernel_dim == 0);
}

TEST_CASE("(a^dag)^p annihilates the first p eigenvectors") {
  for (unsigned p : {1u, 2u, 3u, 4u}) {
    const auto lad = boson(30);
    const IntertwinedPair pair = construct_partner(lad.a_dagger * lad.a, power(lad.a_dagger, p));
    REQUIRE(pair.report.annihilated.size() == p);
    for (std::size_t k = 0; k < p; ++k) CHECK(pair.report.annihilated[k] == k);
    const oracle::Mat a = oracle::annihilator(30);
    const oracle::Mat N = a.adjoint() * a;
    const std::size_t keep = 30 - 2 * p;
    CHECK(oracle::block_norm(pair.h2.matrix() - N - double(p) * oracle::Mat::Identity(30, 30), keep) <
          1e-10);
    // survivors: mu_n = ||a^p phi_n|| = sqrt(n!/(n-p)!)
    for (const auto& g : pair.report.gamma) {
      double expected = 1.0;
      for (unsigned k = 0; k < p; ++k) expected *= double(g.n - k);
      CHECK(g.mu == doctest::Approx(std::sqrt(expected)).epsilon(1e-12));
    }
  }
}

TEST_CASE("hypothesis gate refuses a non-commuting x x^dag") {
  RealVector d(3);
  d << 0.0, 1.0, 2.0;
  const Operator h1 = Operator::diagonal(d);
  Matrix x = Matrix::Identity(3, 3);
  x(0, 1) = 0.5;
  CHECK(kind_of([&] { construct_partner(h1, Operator(x)); }) == ErrorKind::HypothesisFailure);
  const HypothesisCheck hc = check_hypotheses(h1, Operator(x), InteriorSpec{0});
  CHECK(hc.r_commutant > 0.1);
}

TEST_CASE("singular N1 is refused unless a kernel is allowed") {
  const auto lad = boson(20);
  const Operator h1 = lad.a_dagger * lad.a;
  CHECK(kind_of([&] { construct_partner(h1, power(lad.a, 2)); }) == ErrorKind::IllConditioned);
  PartnerOptions opts;
  opts.allow_kernel = true;
  const IntertwinedPair pair = construct_partner(h1, power(lad.a, 2), opts);
  CHECK(pair.report.interior_kernel_dim == 2);
  CHECK(pair.interior_kernel.cols() == 2);
  CHECK(pair.report.alpha_pass());
  CHECK(pair.report.beta_pass());
}

TEST_CASE("non-Hermitian h1 and mismatched sizes are errors") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 2) = 1.0;
  CHECK(kind_of([&] { construct_partner(Operator(m), Operator::identity(3)); }) ==
        ErrorKind::NotHermitian);
  CHECK(kind_of([&] { construct_partner(Operator::identity(3), Operator::identity(4)); }) ==
        ErrorKind::DimensionMismatch);
  PartnerOptions opts;
  opts.interior = InteriorSpec{3};
  CHECK(kind_of([&] { construct_partner(Operator::identity(3), Operator::identity(3), opts); }) ==
        ErrorKind::Config);
}

TEST_CASE("property: random isospectral pairs are recovered exactly") {
  // h1 = V E V^dag, x1 = V S W^dag with S > 0 diagonal: x x^dag = V S^2 V^dag
  // commutes with h1 and the partner is W E W^dag.
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 2 + seed % 7;
    const Matrix V = oracle::random_unitary(n, rng);
    const Matrix W = oracle::random_unitary(n, rng);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    RealVector e(static_cast<Eigen::Index>(n)), s(static_cast<Eigen::Index>(n));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      acc += u(rng);
      e(k) = acc;
      s(k) = u(rng);
    }
    const Matrix E = e.cast<cplx>().asDiagonal();
    const Matrix S = s.cast<cplx>().asDiagonal();
    Matrix h1 = V * E * V.adjoint();
    h1 = (0.5 * (h1 + h1.adjoint())).eval();
    const IntertwinedPair pair = construct_partner(Operator(h1), Operator(V * S * W.adjoint()));
    const Matrix expected = W * E * W.adjoint();
    CHECK((pair.h2.matrix() - expected).norm() < 1e-10 * expected.norm());
    CHECK(pair.report.all_pass());
    CHECK(pair.report.gamma.size() == n);
  }
}

TEST_CASE("reverse map recovers the original eigenvector") {
  const auto lad = boson(30);
  const Operator h1 = lad.a_dagger * lad.a;
  const IntertwinedPair pair = construct_partner(h1, power(lad.a_dagger, 2));
  const EigenSystem es1 = hermitian_eigensystem(h1);
  for (std::size_t n : {2u, 5u, 10u}) {
    const ReverseMap rm = reverse_map_eigenvector(pair, es1, n);
    CHECK(rm.collinearity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rm.eigen_residual < 1e-10);
  }
}

TEST_CASE("chains share Hamiltonians and accumulate margins") {
  const Ladder lad = build_ladder(FockSpec::quon(0.5, 30));
  const Operator h1 = lad.a_dagger * lad.a;
  const HamiltonianChain c1 = start_chain(h1, power(lad.a_dagger, 2));
  const HamiltonianChain c2 = extend_chain(c1, power(lad.a_dagger, 2));
  CHECK(c2.links.size() == 2);
  CHECK(c2.links[1].h1 == c2.links[0].h2);
  CHECK(c2.links[1].interior.margin > c2.links[0].interior.margin);
  CHECK(&c2.hamiltonian(0) == &c2.links[0].h1);
  CHECK_FALSE(c2.cyclic_at.has_value());

  PartnerOptions opts;
  opts.allow_kernel = true;
  const HamiltonianChain back = extend_chain(c1, power(lad.a, 2), opts);
  REQUIRE(back.cyclic_at.has_value());
  CHECK(*back.cyclic_at == 0);
  CHECK(back.cyclic_distance < 1e-10);
}

TEST_CASE("unitary step: x x^dag = a^dag a and h_next = N") {
  const auto lad = boson(40);
  const Operator X = lad.a + lad.a_dagger;
  const UnitaryStep s = build_unitary_chain_step(lad.a, X * X);
  CHECK(s.unitarity_defect < 1e-12);
  CHECK(s.r_factorization < 1e-10);
  CHECK(s.r_partner < 1e-10);
  const Operator expected_a = adjoint(s.unitary) * lad.a_dagger * s.unitary;
  CHECK((s.a_next - expected_a).frobenius() < 1e-12);
}

TEST_CASE("superalgebra for the factorized pair, refusal otherwise") {
  const auto lad = boson(20);
  const Operator H1 = lad.a_dagger * lad.a;
  const Operator H2 = lad.a * lad.a_dagger;
  const SusyAlgebra s = build_susy_algebra(H1, H2, lad.a, InteriorSpec{2});
  CHECK(s.r_H_Q < 1e-12);
  CHECK(s.r_H_Qdag < 1e-12);
  CHECK(s.r_Q2 < 1e-12);
  CHECK(s.r_Qdag2 < 1e-12);
  CHECK(s.r_anticommutator < 1e-12);
  CHECK(s.H.dim() == 40);
  CHECK(s.Q(20, 1) == lad.a(0, 1));
  CHECK(kind_of([&] {
          build_susy_algebra(H1, H2 + Operator::identity(20, true), lad.a, InteriorSpec{2});
        }) == ErrorKind::HypothesisFailure);
}

TEST_CASE("property report serializes every residual") {
  const auto lad = boson(12);
  const IntertwinedPair pair = construct_partner(lad.a_dagger * lad.a, lad.a_dagger);
  const json j = pair.report.to_json();
  for (const char* k : {"r_alpha", "r_beta", "r_beta_adjoint", "r_commutant", "gamma"}) {
    CHECK(j.contains(k));
  }
}
