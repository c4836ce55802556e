#pragma once

// Periodic reductions of the coupled equations to a single ODE in the
// symplectic potential phi(x) on the circle [0, 1):
//
//     -1/4 (1 / w)'' - K0 w + C0 = A,    w = 1 + phi'' > 0,
//
// where the constants depend on the regime:
//
//     DHYM          K0 = alpha b^2 / D,           C0 = -alpha (1 + c^2) / D,
//                   D = cos - c sin
//     LargeRadius   K0 = 4 alpha b^2,             C0 = -2 alpha (a^2 + c^2) + 2 alpha tr^2
//     SmallRadius   K0 = alpha b^2 det / (b^2+c^2), C0 = -alpha c^2 det / (b^2 + c^2)
//
// Newton iterates on sigma = phi'' (mean zero); phi is recovered by double
// integration.

#include "dhym/core_geometry.hpp"
#include "dhym/kym_ndim.hpp"
#include "dhym/legendre.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dhym {

enum class Regime { DHYM, LargeRadius, SmallRadius };

std::string to_string(Regime r);
/// "dhym", "large_radius" or "small_radius".
Regime parse_regime(std::string_view s);

struct SolverTolerances {
  double residual = 1e-10;   ///< sup-norm target
  double step_floor = 1e-4;  ///< smallest continuation step
  int max_newton = 40;       ///< per continuation step
};

struct ODEProblem {
  Regime regime = Regime::DHYM;
  double alpha = 1.0;
  ConstantCurvature2 F0;
  Phase phase;            ///< DHYM only; the torus phase of F0
  PeriodicProfile datum;  ///< A on the x-grid
  SolverTolerances tol;

  /// Fills the phase from F0.
  static ODEProblem make(Regime regime, double alpha, const ConstantCurvature2& F0, PeriodicProfile datum,
                         SolverTolerances tol = {});
  int grid() const { return datum.size(); }
};

}  // namespace dhym

namespace dhym::ode {

struct Coefficients {
  double K0 = 0.0;
  double C0 = 0.0;
};

/// Validates the problem and returns the regime constants.
Coefficients coefficients(const ODEProblem& problem);

/// Mean of A forced by integrating the ODE over a period: C0 - K0.
double compatibility_constant(const ODEProblem& problem);

struct ProjectedDatum {
  PeriodicProfile datum;
  double shift = 0.0;  ///< added to A
};

/// A - mean(A) + compatibility_constant.
ProjectedDatum project_datum(const PeriodicProfile& A, const ODEProblem& problem);

/// Pointwise residual of the regime ODE, differentiating phi spectrally.
PeriodicProfile residual(const PeriodicProfile& phi, const ODEProblem& problem);

/// The same residual from sigma = phi'' samples and a datum on the same grid.
std::vector<double> curvature_residual(std::span<const double> sigma, std::span<const double> A,
                                       const Coefficients& k);

struct Linearization {
  Eigen::MatrixXd jacobian;  ///< dphi -> 1/4 (dphi'' / w^2)'' - K0 dphi''
  Eigen::MatrixXd bordered;  ///< [J 1; 1^T/N 0]
  Eigen::MatrixXd beta;      ///< beta -> 1/4 beta'' - K0 w^2 beta
  std::vector<double> weight;  ///< w^2, so that beta = dphi'' / w^2
};

Linearization linearize(const PeriodicProfile& phi, const ODEProblem& problem);

struct TraceEntry {
  double t = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
};

struct SolutionBundle {
  Regime regime = Regime::DHYM;
  PeriodicProfile phi;          ///< symplectic potential, x-grid
  std::vector<double> phi_dd;   ///< sigma = phi''
  PeriodicProfile psi;          ///< complex-coordinate potential, y-grid
  std::vector<double> psi_dd;   ///< from 1 + psi'' = 1 / (1 + phi'')
  PeriodicProfile phiF;         ///< bundle potential, y-grid
  std::vector<double> phiF_dd;
  MonotoneMap x_to_y;
  MonotoneMap y_to_x;
  double legendre_offset = 0.0;
  PeriodicProfile datum;        ///< projected A actually solved for
  double datum_shift = 0.0;
  std::vector<TraceEntry> trace;
  std::vector<double> newton_history;  ///< residual norms of the last step
  std::vector<double> residual;        ///< final pointwise residual
  double residual_norm = 0.0;
};

/// Damped Newton along A_t = t A + (1 - t) mean(A), starting from phi = 0.
SolutionBundle solve(const ODEProblem& problem);

struct BundlePotential {
  PeriodicProfile phiF;
  std::vector<double> phiF_dd;
  double constant_part = 0.0;  ///< must vanish for DHYM
};

/// Bundle potential from psi'' through the regime identity, with y-grid
/// samples of psi'' given explicitly.
BundlePotential bundle_potential(std::span<const double> psi_dd, const ODEProblem& problem);
BundlePotential reconstruct_bundle_potential(const SolutionBundle& bundle, const ODEProblem& problem);

struct MaxPrincipleReport {
  int argmax = 0;
  double x_bar = 0.0;
  double lhs = 0.0;    ///< K0 w(x_bar) - C0
  double bound = 0.0;  ///< sup |A|
  double margin = 0.0;
  bool holds = false;
};

MaxPrincipleReport max_principle_verify(std::span<const double> sigma, std::span<const double> A,
                                        const ODEProblem& problem, double tolerance = 1e-9);
MaxPrincipleReport max_principle_verify(const SolutionBundle& bundle, const ODEProblem& problem,
                                        double tolerance = 1e-9);

struct LiftedFields {
  MatrixField2D v;
  MatrixField2D F;
  TorusField2D f;  ///< datum pushed to the y-grid
};

/// v = diag(1 + psi''(y1), 1), F = [[a + phiF''(y1), b], [b, c]] on N x N.
LiftedFields lift_to_2d(const SolutionBundle& bundle, const ODEProblem& problem);

struct LiftedResiduals {
  double first = 0.0;      ///< dHYM Im part, HYM, or J-equation
  double second = 0.0;     ///< coupled scalar-curvature equation
  double ma_defect = 0.0;  ///< DHYM only
};

LiftedResiduals lifted_residuals(const SolutionBundle& bundle, const ODEProblem& problem);

}  // namespace dhym::ode
