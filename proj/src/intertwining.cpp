#include "isospec/intertwining.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isospec {

namespace {

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

InteriorSpec resolve_interior(const Operator& h, const Operator& x,
                              const PartnerOptions& options, std::size_t carried_margin) {
  if (options.interior) return *options.interior;
  const Operator xd = adjoint(x);
  InteriorSpec spec{carried_margin + default_margin({&xd, &h, &x})};
  if (spec.margin >= h.dim()) {
    std::ostringstream msg;
    msg << "default interior margin " << spec.margin << " swallows the dimension-" << h.dim()
        << " space; pass an explicit interior for dense truncated intertwiners";
    throw Error(ErrorKind::Config, msg.str());
  }
  return spec;
}

struct Solved {
  Matrix h2;
  std::size_t rank = 0;
};

/// Solves N h = R. Full rank: LU. Otherwise the minimum-norm solution from a
/// complete orthogonal decomposition with the same relative threshold.
Solved solve_with_n1(const Matrix& n1, const Matrix& rhs, double tol_invert) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(tol_invert);
  cod.compute(n1);
  const auto rank = static_cast<std::size_t>(cod.rank());
  if (rank == static_cast<std::size_t>(n1.rows())) {
    return {n1.partialPivLu().solve(rhs), rank};
  }
  return {cod.solve(rhs), rank};
}

Matrix leading(const Matrix& m, std::size_t size) {
  return m.topLeftCorner(as_index(size), as_index(size));
}

void require_square_pair(const Operator& h1, const Operator& x1) {
  if (h1.dim() != x1.dim()) {
    std::ostringstream msg;
    msg << "h1 and x1 dimensions differ (" << h1.dim() << " vs " << x1.dim() << ")";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  const double asym = h1.hermitian_asymmetry();
  if (asym >= kHermitianTol) {
    std::ostringstream msg;
    msg << "h1 must be self-adjoint; relative asymmetry " << asym;
    throw Error(ErrorKind::NotHermitian, msg.str(), asym);
  }
}

IntertwinedPair build_pair(const Operator& h1, const Operator& x1, const PartnerOptions& options,
                           std::size_t carried_margin) {
  require_square_pair(h1, x1);
  const InteriorSpec interior = resolve_interior(h1, x1, options, carried_margin);
  const HypothesisCheck hyp = check_hypotheses(h1, x1, interior);

  if (hyp.r_commutant > options.tol_commutant * hyp.commutant_scale) {
    std::ostringstream msg;
    msg << "[x1 x1^dag, h1] does not vanish on the interior: residual " << hyp.r_commutant
        << " (scale " << hyp.commutant_scale << ")";
    throw Error(ErrorKind::HypothesisFailure, msg.str(), hyp.r_commutant);
  }

  const std::size_t m = interior.size(h1.dim());
  Matrix kernel;
  const bool singular_interior = hyp.n1_min_singular <= options.tol_invert * hyp.n1_norm;
  if (singular_interior) {
    if (!options.allow_kernel) {
      std::ostringstream msg;
      msg << "N1 = x1^dag x1 is not invertible on the interior (smallest singular value "
          << hyp.n1_min_singular << "); the partner is only defined when N1 is invertible";
      throw Error(ErrorKind::IllConditioned, msg.str(), hyp.n1_min_singular);
    }
  }

  const Operator x1d = adjoint(x1);
  const Operator n1 = x1d * x1;
  const Operator rhs = x1d * h1 * x1;

  if (singular_interior) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(leading(n1.matrix(), m));
    const double cut = options.tol_invert * hyp.n1_norm;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      if (std::abs(eig.eigenvalues()(k)) <= cut) cols.push_back(k);
    }
    kernel.resize(as_index(m), as_index(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      kernel.col(as_index(c)) = eig.eigenvectors().col(cols[c]);
    }
  }

  Solved solved = solve_with_n1(n1.matrix(), rhs.matrix(), options.tol_invert);
  Operator h2(std::move(solved.h2), h1.truncated() || x1.truncated());

  PropertyReport rep;
  rep.interior = interior;
  rep.tolerances = options;
  rep.r_commutant = hyp.r_commutant;
  rep.n1_min_singular = hyp.n1_min_singular;
  rep.n1_rank = solved.rank;
  rep.interior_kernel_dim = static_cast<std::size_t>(kernel.cols());
  rep.h1_norm = h1.frobenius();
  rep.x1_norm = x1.frobenius();
  rep.h2_norm = h2.frobenius();
  rep.rhs_norm = rhs.frobenius();

  const double rhs_scale = rep.rhs_norm > 0.0 ? rep.rhs_norm : 1.0;
  rep.solve_residual = (n1.matrix() * h2.matrix() - rhs.matrix()).norm() / rhs_scale;
  if (rep.solve_residual > 1e-8) {
    std::ostringstream msg;
    msg << "x1^dag h1 x1 is not in the range of N1 (relative solve residual "
        << rep.solve_residual << ")";
    throw Error(ErrorKind::HypothesisFailure, msg.str(), rep.solve_residual);
  }

  rep.r_alpha = (h2.matrix() - h2.matrix().adjoint()).norm();
  rep.r_beta = interior_norm(x1d * (x1 * h2 - h1 * x1), interior);
  rep.r_beta_adjoint = interior_norm((h2 * x1d - x1d * h1) * x1, interior);
  rep.r_beta_strong = interior_norm(x1 * h2 - h1 * x1, interior);

  // [N1^-1, R] through two solves: N^-1 R and (N^-1 R^dag)^dag = R N^-1
  const Matrix left = solve_with_n1(n1.matrix(), rhs.matrix(), options.tol_invert).h2;
  const Matrix right =
      solve_with_n1(n1.matrix(), rhs.matrix().adjoint(), options.tol_invert).h2.adjoint();
  rep.n1_commutation = interior_norm(Matrix(left - right), interior);

  IntertwinedPair pair{h1, x1, n1, std::move(h2), interior, std::move(kernel), std::move(rep)};

  const EigenSystem es1 = hermitian_eigensystem(h1);
  const auto mapped = map_eigenvectors(x1, es1, options.vanish_tol);
  for (const auto& mv : mapped) {
    if (mv.annihilated) pair.report.annihilated.push_back(mv.n);
  }
  pair.report.gamma = verify_gamma(pair, mapped, options.tol_gamma);
  return pair;
}

}  // namespace

HypothesisCheck check_hypotheses(const Operator& h1, const Operator& x1, InteriorSpec interior) {
  require_square_pair(h1, x1);
  const Operator x1d = adjoint(x1);
  const Operator xxd = x1 * x1d;
  HypothesisCheck out;
  out.interior = interior;
  out.r_commutant = interior_norm(commutator(xxd, h1), interior);
  out.commutant_scale = xxd.frobenius() * h1.frobenius();

  const std::size_t m = interior.size(h1.dim());
  const Matrix n1 = leading((x1d * x1).matrix(), m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(n1, Eigen::EigenvaluesOnly);
  const RealVector mags = eig.eigenvalues().cwiseAbs();
  out.n1_min_singular = mags.minCoeff();
  out.n1_norm = mags.maxCoeff();
  return out;
}

double PropertyReport::max_gamma_rel() const {
  double worst = 0.0;
  for (const auto& g : gamma) worst = std::max(worst, g.rel_residual);
  return worst;
}

bool PropertyReport::alpha_pass() const { return r_alpha < tolerances.tol_alpha * h2_norm; }

bool PropertyReport::beta_pass() const {
  return r_beta < tolerances.tol_beta * h1_norm * x1_norm &&
         r_beta_adjoint < tolerances.tol_beta * h1_norm * x1_norm;
}

bool PropertyReport::gamma_pass() const { return max_gamma_rel() < tolerances.tol_gamma; }

bool PropertyReport::n1_commutation_pass() const {
  return n1_commutation < tolerances.tol_n1_commute * std::max(rhs_norm, 1.0);
}

bool PropertyReport::all_pass() const {
  return alpha_pass() && beta_pass() && gamma_pass() && n1_commutation_pass();
}

json PropertyReport::to_json() const {
  json gamma_rows = json::array();
  for (const auto& g : gamma) {
    gamma_rows.push_back({{"n", g.n},
                          {"eps", g.eps},
                          {"mu", g.mu},
                          {"interior_weight", g.interior_weight},
                          {"residual", g.residual},
                          {"rel_residual", g.rel_residual}});
  }
  return json{
      {"interior_margin", interior.margin},
      {"r_commutant", r_commutant},
      {"r_alpha", r_alpha},
      {"r_beta", r_beta},
      {"r_beta_adjoint", r_beta_adjoint},
      {"r_beta_strong", r_beta_strong},
      {"n1_commutation", n1_commutation},
      {"n1_min_singular", n1_min_singular},
      {"n1_rank", n1_rank},
      {"interior_kernel_dim", interior_kernel_dim},
      {"solve_residual", solve_residual},
      {"gamma", std::move(gamma_rows)},
      {"annihilated", annihilated},
      {"tolerances",
       {{"commutant", tolerances.tol_commutant},
        {"invert", tolerances.tol_invert},
        {"vanish", tolerances.vanish_tol},
        {"alpha", tolerances.tol_alpha},
        {"beta", tolerances.tol_beta},
        {"gamma", tolerances.tol_gamma},
        {"n1_commute", tolerances.tol_n1_commute}}},
      {"scales",
       {{"h1_frobenius", h1_norm},
        {"x1_frobenius", x1_norm},
        {"h2_frobenius", h2_norm},
        {"rhs_frobenius", rhs_norm}}},
      {"pass",
       {{"alpha", alpha_pass()},
        {"beta", beta_pass()},
        {"gamma", gamma_pass()},
        {"n1_commutation", n1_commutation_pass()}}},
  };
}

double IntertwinedPair::support_distance(const Operator& a, const Operator& b) const {
  const std::size_t m = interior.size(a.dim());
  Matrix diff = leading((a - b).matrix(), m);
  if (interior_kernel.cols() > 0) {
    const Matrix p = Matrix::Identity(as_index(m), as_index(m)) -
                     interior_kernel * interior_kernel.adjoint();
    diff = p * diff * p;
  }
  return diff.norm();
}

IntertwinedPair construct_partner(const Operator& h1, const Operator& x1,
                                  const PartnerOptions& options) {
  return build_pair(h1, x1, options, 0);
}

std::vector<MappedVector> map_eigenvectors(const Operator& x1, const EigenSystem& es1,
                                           double vanish_tol) {
  if (x1.dim() != es1.source_dim) {
    throw Error(ErrorKind::DimensionMismatch, "map_eigenvectors: x1 and eigensystem differ");
  }
  const Matrix images = x1.matrix().adjoint() * es1.vectors;
  std::vector<MappedVector> out(es1.size());
  double largest = 0.0;
  for (std::size_t n = 0; n < es1.size(); ++n) {
    out[n].n = n;
    out[n].eps = es1.value(n);
    out[n].phi = images.col(as_index(n));
    out[n].mu = out[n].phi.norm();
    largest = std::max(largest, out[n].mu);
  }
  for (auto& mv : out) mv.annihilated = mv.mu < vanish_tol * largest || largest == 0.0;
  return out;
}

std::vector<GammaRecord> verify_gamma(const IntertwinedPair& pair,
                                      const std::vector<MappedVector>& mapped, double) {
  std::vector<GammaRecord> records;
  for (const auto& mv : mapped) {
    if (mv.annihilated) continue;
    const double weight = interior_norm(mv.phi, pair.interior) / mv.mu;
    // vectors living entirely in the truncation corner say nothing about h2
    if (weight <= 1e-8) continue;
    const Vector r = pair.h2.apply(mv.phi) - mv.eps * mv.phi;
    GammaRecord g;
    g.n = mv.n;
    g.eps = mv.eps;
    g.mu = mv.mu;
    g.interior_weight = weight;
    g.residual = interior_norm(r, pair.interior) / mv.mu;
    g.rel_residual = g.residual / std::max(1.0, std::abs(mv.eps));
    records.push_back(g);
  }
  return records;
}

ReverseMap reverse_map_eigenvector(const IntertwinedPair& pair, const EigenSystem& es1,
                                   std::size_t n) {
  if (n >= es1.size()) throw Error(ErrorKind::InvalidParameter, "reverse map: index out of range");
  if (es1.is_degenerate(n)) {
    std::ostringstream msg;
    msg << "reverse map needs a nondegenerate eigenvalue; eps_" << n << " = " << es1.value(n)
        << " sits in a degenerate cluster";
    throw Error(ErrorKind::Degenerate, msg.str(), es1.value(n));
  }
  const Vector phi1 = es1.vector(n);
  const Vector phi2 = pair.x1.matrix().adjoint() * phi1;
  if (phi2.norm() == 0.0) {
    throw Error(ErrorKind::HypothesisFailure,
                "reverse map: phi_n^(2) vanishes, nothing to map back", 0.0);
  }
  ReverseMap out;
  out.phi1 = pair.x1.apply(phi2);
  const double len = out.phi1.norm();
  if (len == 0.0) {
    throw Error(ErrorKind::HypothesisFailure, "reverse map: x1 phi_n^(2) vanishes", 0.0);
  }
  const Vector r = pair.h1.apply(out.phi1) - es1.value(n) * out.phi1;
  out.eigen_residual = interior_norm(r, pair.interior) / len;
  out.collinearity = std::abs(phi1.dot(out.phi1)) / len;
  return out;
}

const Operator& HamiltonianChain::hamiltonian(std::size_t k) const {
  if (k == 0) return seed();
  if (k > links.size()) throw Error(ErrorKind::InvalidParameter, "chain index out of range");
  return links[k - 1].h2;
}

namespace {

void detect_cycle(HamiltonianChain& chain) {
  const IntertwinedPair& newest = chain.links.back();
  const std::size_t count = chain.links.size();  // Hamiltonians 0..count-1 precede the newest
  const double scale = std::max(1.0, interior_norm(newest.h2, newest.interior));
  for (std::size_t k = 0; k < count; ++k) {
    const double d = newest.support_distance(newest.h2, chain.hamiltonian(k));
    if (d < 1e-10 * scale) {
      chain.cyclic_at = k;
      chain.cyclic_distance = d;
      return;
    }
  }
}

}  // namespace

HamiltonianChain start_chain(const Operator& h1, const Operator& x1,
                             const PartnerOptions& options) {
  HamiltonianChain chain;
  chain.links.push_back(build_pair(h1, x1, options, 0));
  detect_cycle(chain);
  return chain;
}

HamiltonianChain extend_chain(const HamiltonianChain& chain, const Operator& x_next,
                              const PartnerOptions& options) {
  if (chain.links.empty()) throw Error(ErrorKind::InvalidParameter, "cannot extend an empty chain");
  HamiltonianChain next = chain;
  next.cyclic_at.reset();
  next.cyclic_distance = 0.0;
  const std::size_t carried = chain.links.back().interior.margin;
  next.links.push_back(build_pair(chain.last(), x_next, options, carried));
  detect_cycle(next);
  return next;
}

UnitaryStep build_unitary_chain_step(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "unitary step: ladder and generator differ in dim");
  }
  UnitaryStep s;
  s.unitary = unitary_from_hermitian(b);
  const Operator ad = adjoint(a);
  const Operator ud = adjoint(s.unitary);
  s.x = ad * s.unitary;
  s.a_next = ud * ad * s.unitary;
  s.h_next = adjoint(s.a_next) * s.a_next;
  s.N = adjoint(s.x) * s.x;
  s.unitarity_defect = unitarity_defect(s.unitary);
  s.r_factorization = (s.x * adjoint(s.x) - ad * a).frobenius();
  s.r_partner = (s.h_next - s.N).frobenius();
  return s;
}

double sector_interior_norm(const Matrix& m, std::size_t dim, InteriorSpec interior) {
  const auto d = as_index(dim);
  const auto k = as_index(interior.size(dim));
  double sum = 0.0;
  for (Eigen::Index r : {Eigen::Index{0}, d}) {
    for (Eigen::Index c : {Eigen::Index{0}, d}) sum += m.block(r, c, k, k).squaredNorm();
  }
  return std::sqrt(sum);
}

SusyAlgebra build_susy_algebra(const Operator& H1, const Operator& H2, const Operator& A,
                               InteriorSpec interior, double tol) {
  if (H1.dim() != H2.dim() || H1.dim() != A.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "susy algebra: H1, H2 and A must share a dimension");
  }
  const Operator ad = adjoint(A);
  SusyAlgebra s;
  s.r_factor_H1 = interior_norm(H1 - ad * A, interior);
  s.r_factor_H2 = interior_norm(H2 - A * ad, interior);
  const double scale = std::max({1.0, interior_norm(H1, interior), interior_norm(H2, interior)});
  if (s.r_factor_H1 > tol * scale || s.r_factor_H2 > tol * scale) {
    std::ostringstream msg;
    msg << "superalgebra needs H1 = A^dag A and H2 = A A^dag (residuals " << s.r_factor_H1
        << ", " << s.r_factor_H2
        << "); outside the factorized case the commutation rules do not hold in general";
    throw Error(ErrorKind::HypothesisFailure, msg.str(),
                std::max(s.r_factor_H1, s.r_factor_H2));
  }

  const auto d = as_index(H1.dim());
  const bool trunc = H1.truncated() || H2.truncated() || A.truncated();
  Matrix h = Matrix::Zero(2 * d, 2 * d);
  h.topLeftCorner(d, d) = H1.matrix();
  h.bottomRightCorner(d, d) = H2.matrix();
  Matrix q = Matrix::Zero(2 * d, 2 * d);
  q.bottomLeftCorner(d, d) = A.matrix();
  s.H = Operator(std::move(h), trunc);
  s.Q = Operator(std::move(q), trunc);
  s.Q_dagger = adjoint(s.Q);

  s.r_H_Q = sector_interior_norm(commutator(s.H, s.Q).matrix(), H1.dim(), interior);
  s.r_H_Qdag = sector_interior_norm(commutator(s.H, s.Q_dagger).matrix(), H1.dim(), interior);
  s.r_Q2 = (s.Q * s.Q).frobenius();
  s.r_Qdag2 = (s.Q_dagger * s.Q_dagger).frobenius();
  s.r_anticommutator = sector_interior_norm(
      (anticommutator(s.Q, s.Q_dagger) - s.H).matrix(), H1.dim(), interior);
  return s;
}

}  // namespace isospec
