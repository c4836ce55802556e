#pragma once

// Pointwise linear algebra of the Lagrangian phase: pencil eigenvalues,
// radius and phase, the topological phase of a constant curvature class on
// the unit torus, and the surface residuals and a priori bounds.
//
// Sign convention: the curvature of the Chern connection is F(h) = i F with
// F real symmetric, and the "eigenvalues" are those of v^{-1} F, so that
//
//     det(v - i F) = det(v) * r * exp(-i * Theta),
//     r = prod sqrt(1 + lambda^2),  Theta = sum atan(lambda).
//
// Intersection numbers of constant representatives are evaluated on the unit
// cube [0,1]^n with Lebesgue measure, so the integral of det(t I - i F0) is
// det(t I - i F0) itself.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace dhym {

/// Real symmetric n-by-n matrix; symmetry is checked exactly on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }
  static SymMatrix zero(int n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }
  static SymMatrix diagonal(std::span<const double> d);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// The constant curvature representative F0 = [[a, b], [b, c]] on T^2.
struct ConstantCurvature2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double det() const { return a * c - b * b; }
  double tr() const { return a + c; }
  SymMatrix matrix() const;
};

/// Unit complex number exp(i theta_hat) stored as its two components.
struct Phase {
  double cos = 1.0;
  double sin = 0.0;

  static Phase from_angle(double theta);
  double angle() const;
  /// exp(-i theta_hat)
  std::complex<double> conj() const { return {cos, -sin}; }
};

struct SpectralData {
  std::vector<double> lambdas;
  double radius = 1.0;
  double theta = 0.0;
};

}  // namespace dhym

namespace dhym::geometry {

/// Ascending eigenvalues of v^{-1} F, computed as the spectrum of the
/// symmetric matrix v^{-1/2} F v^{-1/2}.
std::vector<double> pencil_eigenvalues(const SymMatrix& v, const SymMatrix& F);

SpectralData phase_radius(std::span<const double> lambdas);

/// det(v - i F) evaluated directly in complex arithmetic.
std::complex<double> complex_det(const SymMatrix& v, const SymMatrix& F);

struct TorusPhase {
  Phase phase;
  double magnitude = 0.0;  ///< N = |1 - det F0 - i tr F0|
};

/// Phase of the integral of det(I - i F0) over the unit torus.
TorusPhase torus_constant_phase(const ConstantCurvature2& F0);

/// b^2 / (cos - c sin). Throws DegenerateDenominator if the denominator
/// vanishes and InvariantViolation if it disagrees with b^2 N / (1+b^2+c^2).
double phase_positivity_constant(const ConstantCurvature2& F0, const Phase& phase,
                                 double tolerance = 1e-12);

struct SurfaceResidual {
  std::vector<double> im_part;
  std::vector<double> re_part;
};

/// Pointwise Im and Re of exp(-i theta_hat) det(v - i F) for 2x2 fields.
SurfaceResidual dhym_residual_surface(std::span<const SymMatrix> v, std::span<const SymMatrix> F,
                                      const Phase& phase);

/// sup |det(chi) - det(v)| with chi = -sin * F + cos * v.
double surface_ma_check(std::span<const SymMatrix> v, std::span<const SymMatrix> F,
                        const Phase& phase);

struct AprioriSurfaceReport {
  std::vector<bool> det_ratio_ok;  ///< det F / det v < 1
  std::vector<bool> trace_ok;      ///< tr(v^{-1} F) / 2 < |tan theta_hat| / 2
  bool curvature_semipositive = true;
  double max_det_ratio = 0.0;
  double max_half_trace = 0.0;
  double tan_bound = 0.0;  ///< |tan theta_hat| / 2
  bool pass = false;       ///< all samples ok and F >= 0 everywhere
};

/// Throws PhasePreconditionViolated unless sin < 0 < cos.
AprioriSurfaceReport surface_apriori_check(std::span<const SymMatrix> v,
                                           std::span<const SymMatrix> F, const Phase& phase,
                                           double tolerance = 1e-10);

/// |det(I - i F0)|, the average radius of a constant representative.
double average_radius(const SymMatrix& F0);

}  // namespace dhym::geometry
