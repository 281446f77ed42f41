#include <doctest.h>

#include "isospec/fock.hpp"
#include "isospec/intertwining.hpp"
#include "oracles.hpp"

using namespace isospec;

TEST_CASE("q-numbers agree with direct summation") {
  for (double q : {-0.9, -0.5, 0.0, 0.3, 0.5, 0.99, 1.0}) {
    for (std::size_t n : {0u, 1u, 2u, 7u, 40u, 200u}) {
      const double expected = static_cast<double>(oracle::qsum(q, n));
      CHECK(q_number(q, n) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  const QNumberTable t = QNumberTable::make(0.5, 6);
  CHECK(t.alpha[0] == 0.0);
  CHECK(t.alpha[3] == doctest::Approx(1.75));
  CHECK(t.beta[2] == doctest::Approx(std::sqrt(1.75)));
}

TEST_CASE("Fock specs outside the admissible range are rejected") {
  CHECK_THROWS_AS(FockSpec::quon(1.5, 10).validate(), Error);
  CHECK_THROWS_AS(FockSpec::quon(-1.2, 10).validate(), Error);
  CHECK_THROWS_AS(FockSpec::boson(1).validate(), Error);
  CHECK_THROWS_AS(FockSpec::quon(-1.0, 10).validate(), Error);
  CHECK_THROWS_AS(FockSpec::quon(1.0, 10).validate(), Error);
  CHECK_NOTHROW(FockSpec::quon(-0.99, 10).validate());
  CHECK_NOTHROW(FockSpec::boson(10).validate());
}

TEST_CASE("ladders match the test-side construction") {
  for (double q : {-0.5, 0.5}) {
    const Ladder lad = build_ladder(FockSpec::quon(q, 20));
    CHECK((lad.a.matrix() - oracle::annihilator(20, q)).norm() < 1e-14);
    CHECK(lad.a.truncated());
    CHECK(lad.a.band() == 1);
    CHECK(lad.a_dagger == adjoint(lad.a));
  }
  const Ladder b = build_ladder(FockSpec::boson(15));
  CHECK((b.a.matrix() - oracle::annihilator(15)).norm() < 1e-14);
}

TEST_CASE("quon relation a a^dag - q a^dag a = 1 holds on the interior") {
  for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const Ladder lad = build_ladder(FockSpec::quon(q, 30));
    const Operator I = Operator::identity(30, true);
    const Operator rel = lad.a * lad.a_dagger - lad.a_dagger * lad.a * q - I;
    CHECK(interior_norm(rel, InteriorSpec{1}) < 1e-13);
    const Operator N = number_operator(FockSpec::quon(q, 30));
    for (std::size_t n = 0; n < 30; ++n) {
      CHECK(std::abs(N(n, n) - cplx(static_cast<double>(oracle::qsum(q, n)))) < 1e-13);
    }
  }
}

TEST_CASE("shift intertwiner maps eigenvector l to l + step") {
  const Operator h = number_operator(FockSpec::quon(0.5, 12));
  const EigenSystem es = hermitian_eigensystem(h);
  const Operator x = build_shift_intertwiner(es, 2);
  for (std::size_t l = 0; l < 12; ++l) {
    const Vector img = x.apply(es.vector(l));
    if (l + 2 < 12) {
      CHECK((img - es.vector(l + 2)).norm() < 1e-14);
    } else {
      CHECK(img.norm() < 1e-14);
    }
  }
}

TEST_CASE("two-level seed: hypotheses and refusals") {
  TwoLevelParams p;
  const FiniteExample ex = two_level_example(p);
  Matrix h1(2, 2), x1(2, 2);
  h1 << 1, 0, 0, 3;
  x1 << 0, 1, 1, 0;
  CHECK(ex.h1.matrix() == h1);
  CHECK(ex.x1.matrix() == x1);
  Matrix h2(2, 2);
  h2 << 3, 0, 0, 1;
  CHECK((two_level_expected_partner(p).matrix() - h2).norm() < 1e-15);

  TwoLevelParams bad = p;
  bad.c = cplx(1.0, 0.0);
  bad.alpha = 2.0;
  try {
    two_level_example(bad);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
  TwoLevelParams zero = p;
  zero.beta = 0.0;
  CHECK_THROWS_AS(two_level_example(zero), Error);
  CHECK_NOTHROW(two_level_matrices(bad));
}

TEST_CASE("two-level phase branch against a hand computation") {
  // h1 = [[0, 1], [1, 0]], x1 = [[0, 1], [i, 0]]: N1 = 1, h2 = x1^dag h1 x1
  TwoLevelParams p;
  p.a = 0.0;
  p.b = 0.0;
  p.c = 1.0;
  p.alpha = 1.0;
  p.beta = cplx(0.0, 1.0);
  const FiniteExample ex = two_level_example(p);
  const Matrix x = ex.x1.matrix();
  const Matrix expected = x.adjoint() * ex.h1.matrix() * x;
  CHECK((two_level_expected_partner(p).matrix() - expected).norm() < 1e-15);
  CHECK(std::abs(expected(0, 1) - cplx(0.0, -1.0)) < 1e-15);
}

TEST_CASE("angular seed: x1 is Hermitian and N1 = alpha^2") {
  AngularParams p;
  const FiniteExample ex = angular_example(p);
  CHECK((ex.x1.matrix() - ex.x1.matrix().adjoint()).norm() < 1e-15);
  const Matrix N1 = ex.x1.matrix().adjoint() * ex.x1.matrix();
  CHECK((N1 - p.alpha * p.alpha * Matrix::Identity(3, 3)).norm() < 1e-14);
  const Matrix h2 = N1.inverse() * ex.x1.matrix().adjoint() * ex.h1.matrix() * ex.x1.matrix();
  CHECK((angular_expected_partner(p).matrix() - h2).norm() < 1e-14);
  AngularParams bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(angular_example(bad), Error);
}
