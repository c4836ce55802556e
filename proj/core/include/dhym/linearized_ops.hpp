#pragma once

// Linearization L = L0 + L1 of the symplectic-coordinate Kaehler-Yang-Mills
// system on the 2-torus, with u = |x|^2/2 + phi_u, constant B and bundle
// potential phi. The variation of u is the Hessian of a scalar potential
// gamma; phidot(gamma) solves
//
//     gamma_ij B_ij + Delta phidot - d_i(u^{ia} gamma_ab u^{bj} phi_j) = 0,
//     mean(phidot) = 0,   Delta = d_i u^{ij} d_j.

#include "dhym/core_geometry.hpp"
#include "dhym/kym_ndim.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace dhym {

class LinearizedContext {
 public:
  /// Explicit background bundle potential.
  LinearizedContext(TorusField2D phi_u, SymMatrix B, TorusField2D phi);

  /// Background on the constraint u_ij B_ij + Delta phi = tr B, solved for phi.
  static LinearizedContext at_solution(TorusField2D phi_u, SymMatrix B);

  int size() const { return n_; }
  const TorusField2D& phi_u() const { return phi_u_; }
  const TorusField2D& phi() const { return phi_; }
  const SymMatrix& B() const { return B_; }
  const MatrixField2D& hess_u() const { return hess_; }
  const MatrixField2D& inv_hess_u() const { return inv_; }

  /// -d_i(u^{ij} d_j f): symmetric positive semidefinite, kernel = constants.
  std::vector<double> minus_laplacian(std::span<const double> f) const;

  /// Solves Delta x = rhs for mean-zero x (rhs is projected to mean zero).
  std::vector<double> solve_laplacian(std::span<const double> rhs, double* residual = nullptr) const;

 private:
  int n_;
  TorusField2D phi_u_;
  SymMatrix B_;
  TorusField2D phi_;
  MatrixField2D hess_;
  MatrixField2D inv_;
};

}  // namespace dhym

namespace dhym::linops {

/// phidot for u-dot = Hess gamma.
TorusField2D solve_lincond(const LinearizedContext& ctx, const TorusField2D& gamma);
/// Same with u-dot given directly as a symmetric matrix field.
TorusField2D solve_lincond(const LinearizedContext& ctx, const MatrixField2D& udot);

/// Pointwise LinCond residual of phidot.
TorusField2D lincond_residual(const LinearizedContext& ctx, const MatrixField2D& udot, const TorusField2D& phidot);

struct LTerms {
  /// L0: -d2_ij(M^ij), 2 q_jk g_kl B_jl, -2 (d_i r^l)(d_l p^i), 2 B_ik B_jl g_ij u_kl,
  /// -2 (d_j r^k) u_kl B_jl. L1: 2 (d_j pd^k) u_kl B_jl, 2 (d_i pd^l)(d_l p^i).
  std::array<std::vector<double>, 7> terms;
  std::vector<double> total;
};

LTerms apply_L_terms(const LinearizedContext& ctx, const MatrixField2D& udot);
TorusField2D apply_L(const LinearizedContext& ctx, const TorusField2D& gamma);

/// Dense matrix of L on all N^2 grid values (N <= 32).
Eigen::MatrixXd assemble_dense(const LinearizedContext& ctx);

/// Mean of pointwise products.
double inner(const TorusField2D& a, const TorusField2D& b);

/// |<xi, L gamma> - <gamma, L xi>| / (|xi| |gamma| scale),
/// scale = max(|L gamma| / |gamma|, |L xi| / |xi|).
double selfadjointness_defect(const LinearizedContext& ctx, const TorusField2D& xi, const TorusField2D& gamma);

struct RefinementStudy {
  std::vector<int> grids;
  std::vector<double> defects;
  double order = 0.0;  ///< -slope of log defect against log N
};

struct TrialMode {
  int k1 = 0;
  int k2 = 0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// Samples of sum c cos(2 pi k.x) + s sin(2 pi k.x) on an N x N grid.
TorusField2D band_limited(int n, std::span<const TrialMode> modes);

/// Background and trial fields are given as mode lists so they can be
/// resampled on every grid.
RefinementStudy selfadjointness_refinement(std::span<const TrialMode> background, const SymMatrix& B,
                                           std::span<const TrialMode> xi, std::span<const TrialMode> gamma,
                                           std::span<const int> grids);

/// Max of <gamma, L gamma> / <gamma, gamma>. Throws InvalidConfig for a
/// trial with nonzero mean or zero norm.
double negativity_check(const LinearizedContext& ctx, std::span<const TorusField2D> trials);

}  // namespace dhym::linops
