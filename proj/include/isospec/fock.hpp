#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "isospec/operator.hpp"

namespace isospec {

enum class FockKind { Boson, Quon };

/// Truncated Fock space of a boson (q = 1) or a quon with a a^dag - q a^dag a = 1.
struct FockSpec {
  FockKind kind = FockKind::Boson;
  double q = 1.0;
  std::size_t dim = 2;

  static FockSpec boson(std::size_t dim) { return {FockKind::Boson, 1.0, dim}; }
  static FockSpec quon(double q, std::size_t dim) { return {FockKind::Quon, q, dim}; }

  double deformation() const { return kind == FockKind::Boson ? 1.0 : q; }
  void validate() const;
};

/// q-numbers [n]_q = 1 + q + ... + q^{n-1}, from the closed form (1 - q^n)/(1 - q).
double q_number(double q, std::size_t n);

struct QNumberTable {
  std::vector<double> alpha;  ///< alpha_n = [n]_q, alpha_0 = 0
  std::vector<double> beta;   ///< beta_n = sqrt(alpha_{n+1})

  static QNumberTable make(double q, std::size_t count);
};

struct Ladder {
  Operator a;
  Operator a_dagger;
};

Ladder build_ladder(const FockSpec& spec);
Operator number_operator(const FockSpec& spec);

/// x = sum_l |phi_{l+step}><phi_l| over the eigenbasis of `es`.
Operator build_shift_intertwiner(const EigenSystem& es, std::size_t step);

struct FiniteExample {
  Operator h1;
  Operator x1;
};

/// Two-level seed h1 = [[a, c], [conj(c), b]] with x1 = [[0, alpha], [beta, 0]].
struct TwoLevelParams {
  double a = 1.0;
  double b = 3.0;
  cplx c = 0.0;
  cplx alpha = 1.0;
  cplx beta = 1.0;
};

/// Spin-1 J_z-type seed with the Hermitian, unitary-up-to-scale x1.
struct AngularParams {
  double alpha = 1.4142135623730951;
  double hbar = 1.0;
};

/// Builds the matrices without checking the construction's hypotheses.
FiniteExample two_level_matrices(const TwoLevelParams& p);
FiniteExample angular_matrices(const AngularParams& p);

/// Validated builders. The two-level case requires alpha, beta != 0 (so N1 is
/// invertible) and c = 0 or |alpha| = |beta| (so x1 x1^dag commutes with h1);
/// violations throw InvalidParameter naming the broken condition.
FiniteExample two_level_example(const TwoLevelParams& p);
FiniteExample angular_example(const AngularParams& p);

/// The closed-form partners these seeds are known to produce.
Operator two_level_expected_partner(const TwoLevelParams& p);
Operator angular_expected_partner(const AngularParams& p);

}  // namespace isospec
