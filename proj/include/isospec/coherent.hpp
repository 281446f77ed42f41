#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "isospec/fock.hpp"
#include "isospec/operator.hpp"

namespace isospec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Strictly increasing spectrum with eps[0] = 0, stored with log(eps_n!).
struct GKSpectrumData {
  std::vector<double> eps;
  std::vector<double> log_rho;  ///< log(eps_1 ... eps_n), log_rho[0] = 0
  double shift = 0.0;           ///< subtracted from the raw spectrum to make eps[0] = 0
  double radius = kInf;         ///< lim eps_n; J must stay below it
  /// The list is the whole spectrum (finite matrix) rather than a prefix of
  /// an infinite one, so series over it terminate exactly.
  bool finite = false;
  double omega = 1.0;
  std::string source;

  std::size_t size() const { return eps.size(); }
  double rho(std::size_t n) const;
};

/// Boson: eps_n = n. Quon 0 < q < 1: eps_n = [n]_q. Quons with q <= 0 do
/// not give an increasing spectrum and are rejected.
GKSpectrumData spectrum_from_fock(const FockSpec& spec, std::size_t count = 4096);
/// Finite spectrum of a Hermitian matrix, shifted to eps_0 = 0.
GKSpectrumData spectrum_from_eigensystem(const EigenSystem& es);
/// Explicit list; `finite` as in GKSpectrumData.
GKSpectrumData spectrum_from_values(std::vector<double> values, bool finite);

struct MSeries {
  double value = 0.0;
  std::size_t terms = 0;    ///< terms summed, n = 0 .. terms-1
  double tail_bound = 0.0;  ///< certified bound on the neglected tail
};

/// M(J) = sum_k J^k / eps_k!, truncated once the ratio-test tail bound drops
/// below tail_tol * max(1, partial sum).
MSeries big_M(double J, const GKSpectrumData& data, double tail_tol = 1e-14);

struct VectorCSParams {
  double J1 = 1.0;
  double J2 = 1.0;
  double gamma = 0.0;
  double delta = 1.0;
  double tail_tol = 1e-14;
  /// Fixed truncation order; unset picks it from the certified tails.
  std::optional<std::size_t> n_max;
};

/// Coefficients along Phi_n^(b) and Phi_n^(f), n = 0 .. n_max.
struct VectorCoherentState {
  std::vector<cplx> b;
  std::vector<cplx> f;
  VectorCSParams params;
  double M1 = 1.0;
  double M2 = 1.0;
  double tail_bound = 0.0;

  std::size_t size() const { return b.size(); }
  double norm() const;
};

VectorCoherentState synthesize_vector_cs(const VectorCSParams& params, const GKSpectrumData& data);

/// ||s - t|| in the susy scalar product, the shorter state padded with zeros.
double susy_distance(const VectorCoherentState& s, const VectorCoherentState& t);

struct ActionIdentity {
  double expectation = 0.0;  ///< omega * sum eps_n (|b_n|^2 + |f_n|^2)
  double closed_form = 0.0;  ///< omega * (J1 M(J1) + J2 M(J2)) / (M(J1) + M(J2))
  double difference = 0.0;
};

ActionIdentity action_identity(const VectorCoherentState& state, const GKSpectrumData& data);

/// V_delta(t): b_n picks up e^{-i(eps_n+delta)t}, f_n picks up e^{+i(eps_n+delta)t}.
VectorCoherentState evolve(const VectorCoherentState& state, double t, const GKSpectrumData& data);

/// A_gamma and its adjoint on coefficient vectors of the same length. The
/// adjoint drops the component pushed past n_max.
VectorCoherentState apply_A_gamma(const VectorCoherentState& state, double gamma,
                                  const GKSpectrumData& data);
VectorCoherentState apply_A_gamma_adjoint(const VectorCoherentState& state, double gamma,
                                          const GKSpectrumData& data);

struct EigenRelation {
  double residual = 0.0;  ///< ||A Psi - diag(sqrt J1, sqrt J2) Psi||
  /// Residual of the best fit A Psi = c Psi over complex c; zero only when
  /// A Psi is proportional to Psi.
  double proportionality_residual = 0.0;
};

/// Checks A_{gamma_op} Psi(J, gamma) against J^{1/2} Psi(J, gamma).
EigenRelation check_A_eigen_relation(const VectorCoherentState& state, double gamma_op,
                                     const GKSpectrumData& data);

double continuity_check(const VectorCSParams& p, const VectorCSParams& p0,
                        const GKSpectrumData& data);

/// Density on [0, radius) whose moments should reproduce eps_n!.
struct MomentWeight {
  std::string name;
  std::function<double(double)> density;
  double radius = kInf;

  /// rate * e^{-rate u} on the half-line; rate = 1 is the boson weight.
  static MomentWeight exponential(double rate = 1.0);
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Integral of density(u) u^s over [0, radius).
QuadratureResult weight_moment(const MomentWeight& weight, double s, double tol = 1e-13);

struct MomentRow {
  std::size_t n = 0;
  double computed = 0.0;
  double expected = 0.0;
  double rel_error = 0.0;
  double error_estimate = 0.0;
};

struct MomentCheck {
  std::vector<MomentRow> rows;
  double tol = 1e-8;
  double max_rel_error() const;
  bool pass() const { return max_rel_error() < tol; }
};

MomentCheck moment_check(const MomentWeight& weight, const GKSpectrumData& data,
                         std::size_t n_up_to, double tol = 1e-8);

struct FiniteGammaRow {
  double Gamma = 0.0;
  double leakage = 0.0;          ///< max |F_Gamma - F| over entries the average kills
  double envelope = 0.0;         ///< max A_nm / (|w_nm| Gamma), bound on the leakage
  double oracle_error = 0.0;     ///< max |numeric gamma average - sin(w Gamma)/(w Gamma)|
};

struct FrameOptions {
  std::size_t leading = 12;  ///< basis vectors per sector
  std::vector<double> finite_gammas = {1e2, 1e3, 1e4};
  double moment_tol = 1e-8;
};

struct FrameDefect {
  double delta = 0.0;
  std::size_t leading = 0;
  /// F - 1 in the order b_0 .. b_{K-1}, f_0 .. f_{K-1}.
  Matrix defect;
  double max_defect = 0.0;
  double cross_corner = 0.0;              ///< |(F - 1)(b_0, f_0)|
  double max_defect_outside_cross = 0.0;  ///< everything except the (b_0, f_0) pair
  std::vector<FiniteGammaRow> finite_gamma;
  double decay_slope = 0.0;  ///< least-squares slope of log leakage vs log Gamma
};

/// Frame operator of the vector coherent states over the leading block. The
/// gamma-average is taken analytically; finite-Gamma averages validate it.
FrameDefect frame_operator_defect(const GKSpectrumData& data, const MomentWeight& weight,
                                  double delta, const FrameOptions& options = {});

/// X = L + L^dag with L = [[0, 0], [x1^dag, 0]], written in the basis
/// Phi_n^(b) = (phi_n^(1), 0), Phi_n^(f) = (0, phi_n^(2)).
struct XOperator {
  Operator L;       ///< physical 2D x 2D
  Operator L_dagger;
  Matrix X;         ///< coefficient matrix, order b_0 .. b_{D-1}, f_0 .. f_{D-1}
  RealVector alpha1;  ///< ||x1^dag phi_n^(1)||
  RealVector alpha2;  ///< ||x1 phi_n^(2)||
  Matrix basis2;      ///< columns phi_n^(2)
  double basis_defect = 0.0;      ///< ||V2^dag V2 - 1||_F
  double structure_residual = 0.0;  ///< ||X - (alpha-weighted sector swap)||_F
};

/// phi_n^(2) = x1^dag phi_n^(1) / alpha_n; where that vanishes the eigenvector
/// n of es2 stands in. es1 must be nondegenerate.
XOperator build_X_operator(const Operator& x1, const EigenSystem& es1, const EigenSystem& es2,
                           double vanish_tol = 1e-8);

enum class XRelationCase { ConstantAlpha, AlphaEqualsEps, NoClosedRelation };
std::string to_string(XRelationCase c);

struct XRelationReport {
  XRelationCase kind = XRelationCase::NoClosedRelation;
  double alpha = 0.0;       ///< the common value in the constant case
  double alpha_spread = 0.0;
  double eps_gap = 0.0;     ///< max |alpha_n - eps_n|
  std::optional<double> residual;
};

/// Classifies alpha_n and evaluates the matching relation on Psi(J, gamma):
/// constant alpha gives X Psi(J, gamma) = alpha Psi(J~, -gamma), alpha_n = eps_n
/// gives X Psi(J, gamma) = A_{-gamma}^dag J~^{1/2} Psi(J~, -gamma), J~ = (J2, J1).
XRelationReport check_X_relations(const XOperator& xop, const VectorCSParams& params,
                                  const GKSpectrumData& data, double class_tol = 1e-10);

/// Original scalar states, normalized so that N(J)^2 = M(J).
struct ScalarGKState {
  std::vector<cplx> c;
  double J = 0.0;
  double gamma = 0.0;
  double M = 1.0;
};

ScalarGKState scalar_gk_state(double J, double gamma, const GKSpectrumData& data,
                              double tail_tol = 1e-14);
std::vector<cplx> apply_a_gamma(const std::vector<cplx>& c, double gamma,
                                const GKSpectrumData& data);
/// e^{-iHt} with H |n> = omega eps_n |n>.
std::vector<cplx> evolve_scalar(const std::vector<cplx>& c, double t, const GKSpectrumData& data);

/// ||a_gamma psi - sqrt(J) psi||.
double scalar_eigen_residual(const ScalarGKState& s, const GKSpectrumData& data);

}  // namespace isospec
