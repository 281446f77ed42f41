#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "isospec/json_io.hpp"
#include "isospec/operator.hpp"

namespace isospec {

/// Tolerances for the partner construction. All of them are relative.
struct PartnerOptions {
  /// Interior block on which identities are asserted. Unset: the default
  /// margin of x^dag h x (plus whatever the chain has accumulated).
  std::optional<InteriorSpec> interior;
  /// Gate on ||[x x^dag, h1]|| <= tol * ||x x^dag||_F ||h1||_F.
  double tol_commutant = 1e-9;
  /// Gate on sigma_min(N1) > tol * ||N1||_2, both over the interior block.
  double tol_invert = 1e-8;
  /// phi_n^(2) counts as annihilated when mu_n < tol * max_m mu_m.
  double vanish_tol = 1e-8;
  /// Accept an interior kernel of N1. h2 is then the minimum-norm solution
  /// and is only meaningful on the interior minus that kernel.
  bool allow_kernel = false;

  double tol_alpha = 1e-10;      ///< r_alpha < tol * ||h2||_F
  double tol_beta = 1e-9;        ///< r_beta < tol * ||h1||_F ||x1||_F
  double tol_gamma = 1e-8;       ///< gamma residual / max(1, |eps_n|)
  double tol_n1_commute = 1e-9;  ///< ||[N1^-1, R]|| < tol * ||R||_F
};

struct HypothesisCheck {
  InteriorSpec interior;
  double r_commutant = 0.0;
  double commutant_scale = 0.0;  ///< ||x x^dag||_F ||h1||_F
  double n1_min_singular = 0.0;  ///< over the interior block of N1
  double n1_norm = 0.0;          ///< spectral norm of that block
};

HypothesisCheck check_hypotheses(const Operator& h1, const Operator& x1, InteriorSpec interior);

/// phi_n^(2) = x1^dag phi_n^(1) and its norm mu_n.
struct MappedVector {
  std::size_t n = 0;
  double eps = 0.0;
  Vector phi;
  double mu = 0.0;
  bool annihilated = false;
};

struct GammaRecord {
  std::size_t n = 0;
  double eps = 0.0;
  double mu = 0.0;
  double interior_weight = 0.0;
  double residual = 0.0;      ///< ||(h2 phi - eps phi)_interior|| / mu
  double rel_residual = 0.0;  ///< residual / max(1, |eps|)
};

struct PropertyReport {
  InteriorSpec interior;
  double r_commutant = 0.0;
  double r_alpha = 0.0;
  double r_beta = 0.0;
  double r_beta_adjoint = 0.0;
  double r_beta_strong = 0.0;
  double n1_commutation = 0.0;
  double n1_min_singular = 0.0;
  double solve_residual = 0.0;
  std::size_t interior_kernel_dim = 0;
  std::size_t n1_rank = 0;

  double h1_norm = 0.0;
  double x1_norm = 0.0;
  double h2_norm = 0.0;
  double rhs_norm = 0.0;

  std::vector<GammaRecord> gamma;
  std::vector<std::size_t> annihilated;

  PartnerOptions tolerances;

  double max_gamma_rel() const;
  bool alpha_pass() const;
  bool beta_pass() const;
  bool gamma_pass() const;
  bool n1_commutation_pass() const;
  bool all_pass() const;

  json to_json() const;
};

struct IntertwinedPair {
  Operator h1;
  Operator x1;
  Operator N1;
  Operator h2;
  InteriorSpec interior;
  /// Orthonormal basis (interior-sized columns) of the interior kernel of N1.
  Matrix interior_kernel;
  PropertyReport report;

  /// ||P (a - b) P||_F with P the interior projector minus the kernel.
  double support_distance(const Operator& a, const Operator& b) const;
};

IntertwinedPair construct_partner(const Operator& h1, const Operator& x1,
                                  const PartnerOptions& options = {});

std::vector<MappedVector> map_eigenvectors(const Operator& x1, const EigenSystem& es1,
                                           double vanish_tol = 1e-8);

std::vector<GammaRecord> verify_gamma(const IntertwinedPair& pair,
                                      const std::vector<MappedVector>& mapped,
                                      double tol_gamma = 1e-8);

struct ReverseMap {
  Vector phi1;
  double eigen_residual = 0.0;  ///< ||(h1 v - eps v)_interior|| / ||v||
  double collinearity = 0.0;    ///< |<v, phi_n^(1)>| / ||v||
};

/// x1 phi_n^(2), which for a nondegenerate eps_n is parallel to phi_n^(1).
ReverseMap reverse_map_eigenvector(const IntertwinedPair& pair, const EigenSystem& es1,
                                   std::size_t n);

struct HamiltonianChain {
  std::vector<IntertwinedPair> links;
  /// Set when the newest Hamiltonian matches an earlier one: 0 is the seed,
  /// j >= 1 the partner produced by link j - 1.
  std::optional<std::size_t> cyclic_at;
  double cyclic_distance = 0.0;

  const Operator& seed() const { return links.front().h1; }
  const Operator& last() const { return links.back().h2; }
  /// Hamiltonian k of the chain: 0 is the seed, k >= 1 the partner of link k-1.
  const Operator& hamiltonian(std::size_t k) const;
};

HamiltonianChain start_chain(const Operator& h1, const Operator& x1,
                             const PartnerOptions& options = {});
HamiltonianChain extend_chain(const HamiltonianChain& chain, const Operator& x_next,
                              const PartnerOptions& options = {});

struct UnitaryStep {
  Operator unitary;  ///< e^{iB}
  Operator x;        ///< a^dag e^{iB}
  Operator a_next;   ///< e^{-iB} a^dag e^{iB}
  Operator h_next;   ///< a_next^dag a_next
  Operator N;        ///< x^dag x
  double unitarity_defect = 0.0;
  double r_factorization = 0.0;  ///< ||x x^dag - a^dag a||_F
  double r_partner = 0.0;        ///< ||h_next - N||_F
};

UnitaryStep build_unitary_chain_step(const Operator& a, const Operator& b);

struct SusyAlgebra {
  Operator H;
  Operator Q;
  Operator Q_dagger;
  double r_H_Q = 0.0;
  double r_H_Qdag = 0.0;
  double r_Q2 = 0.0;
  double r_Qdag2 = 0.0;
  double r_anticommutator = 0.0;
  double r_factor_H1 = 0.0;
  double r_factor_H2 = 0.0;
};

/// H = diag(H1, H2), Q = [[0, 0], [A, 0]]. Refused unless H1 = A^dag A and
/// H2 = A A^dag on the interior: the superalgebra needs the factorized form.
SusyAlgebra build_susy_algebra(const Operator& H1, const Operator& H2, const Operator& A,
                               InteriorSpec interior, double tol = 1e-10);

/// Norm of the four interior sector blocks of a 2D x 2D block operator.
double sector_interior_norm(const Matrix& m, std::size_t dim, InteriorSpec interior);

}  // namespace isospec
