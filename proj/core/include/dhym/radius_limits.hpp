#pragma once

// Large and small radius behaviour of z(t) = det(t I - i F0) for a constant
// representative F0 on the unit torus, and convergence of scaled dHYM ODE
// solutions to the limit ODEs.
//
// With e_k the elementary symmetric functions of the eigenvalues of F0,
//
//     z(t) = sum_k (-i)^k e_k t^(n-k),
//     exp(-i theta(t)) = 1 + i c t^-1 - c^2 t^-2 / 2 + O(t^-3),  c = e_1,
//     exp(-i theta(t)) = i^n sgn(e_n) (1 - i c' t + O(t^2)),     c' = e_(n-1) / e_n.

#include "dhym/core_geometry.hpp"
#include "dhym/ode_solver.hpp"

#include <complex>
#include <span>
#include <vector>

namespace dhym {

struct CohomologyData {
  int n = 0;
  SymMatrix F0;
  std::vector<double> e;  ///< e[0] = 1, ..., e[n] = det F0
  double c_large = 0.0;
  double c_small = 0.0;   ///< NaN when e_n = 0

  static CohomologyData from(const SymMatrix& F0);
};

}  // namespace dhym

namespace dhym::limits {

std::complex<double> exact_z(double t, const CohomologyData& data);

/// Least-squares slope of log y against log x; needs at least 4 points and
/// positive values, else NaN.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct PhaseCheck {
  std::vector<double> t;
  std::vector<double> error;
  double slope = 0.0;
  bool monotone = false;  ///< errors decrease along the list
};

/// t increasing, at least 4 values.
PhaseCheck large_radius_phase_check(const CohomologyData& data, std::span<const double> ts);

/// t decreasing toward 0, at least 4 values. Throws DegenerateTopPower if e_n = 0.
PhaseCheck small_radius_phase_check(const CohomologyData& data, std::span<const double> ts);

enum class LimitKind { Large, Small };

struct LimitStudy {
  std::vector<double> t;
  std::vector<double> difference;  ///< sup |phi_t - phi_limit|
  std::vector<double> scaled_K0;
  double limit_K0 = 0.0;
  double order = 0.0;       ///< fitted exponent of t; NaN at the noise floor
  bool noise_floor = false; ///< all differences at round-off
};

/// Solves the dHYM ODE for the class F0 / t with coupling 4 alpha t^2 (large)
/// or alpha t^2 (small) and compares with the limit problem `base`, which
/// must be in the LargeRadius or SmallRadius regime.
LimitStudy limit_convergence_study(const ODEProblem& base, std::span<const double> ts);

}  // namespace dhym::limits
