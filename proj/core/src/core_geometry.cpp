#include "dhym/core_geometry.hpp"

#include "dhym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dhym {

SymMatrix::SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) raise(ErrorKind::DimensionMismatch, "SymMatrix must be square");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m_.cols(); ++j) {
      if (m_(i, j) != m_(j, i)) raise(ErrorKind::DimensionMismatch, "SymMatrix is not symmetric");
    }
  }
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymMatrix(std::move(m));
}

SymMatrix ConstantCurvature2::matrix() const {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, c;
  return SymMatrix(std::move(m));
}

Phase Phase::from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

double Phase::angle() const { return std::atan2(sin, cos); }

}  // namespace dhym

namespace dhym::geometry {

std::vector<double> pencil_eigenvalues(const SymMatrix& v, const SymMatrix& F) {
  if (v.dim() != F.dim()) raise(ErrorKind::DimensionMismatch, "pencil: v and F differ in size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> metric(v.matrix());
  const Eigen::VectorXd mu = metric.eigenvalues();
  if (mu.minCoeff() <= 0.0) raise(ErrorKind::NonPositiveMetric, "pencil: v is not positive definite");
  const Eigen::MatrixXd q = metric.eigenvectors();
  const Eigen::MatrixXd inv_sqrt = q * mu.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
  Eigen::MatrixXd s = inv_sqrt * F.matrix() * inv_sqrt;
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pencil(s, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = pencil.eigenvalues();
  return {lam.data(), lam.data() + lam.size()};
}

SpectralData phase_radius(std::span<const double> lambdas) {
  SpectralData out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  std::sort(out.lambdas.begin(), out.lambdas.end());
  out.radius = 1.0;
  out.theta = 0.0;
  for (double l : out.lambdas) {
    out.radius *= std::hypot(1.0, l);
    out.theta += std::atan(l);
  }
  return out;
}

std::complex<double> complex_det(const SymMatrix& v, const SymMatrix& F) {
  if (v.dim() != F.dim()) raise(ErrorKind::DimensionMismatch, "complex_det: size mismatch");
  const Eigen::MatrixXcd m =
      v.matrix().cast<std::complex<double>>() - std::complex<double>(0.0, 1.0) * F.matrix().cast<std::complex<double>>();
  return m.determinant();
}

TorusPhase torus_constant_phase(const ConstantCurvature2& F0) {
  const double re = 1.0 - F0.det();
  const double im = -F0.tr();
  const double n = std::hypot(re, im);
  if (!(n > 0.0)) raise(ErrorKind::DegeneratePhase, "integral of det(I - iF0) vanishes");
  return {Phase{re / n, im / n}, n};
}

double phase_positivity_constant(const ConstantCurvature2& F0, const Phase& phase, double tolerance) {
  const double denom = phase.cos - F0.c * phase.sin;
  if (std::abs(denom) < 1e-14) raise(ErrorKind::DegenerateDenominator, "cos - c sin vanishes");
  const double value = F0.b * F0.b / denom;
  const double n = torus_constant_phase(F0).magnitude;
  const double closed = F0.b * F0.b * n / (1.0 + F0.b * F0.b + F0.c * F0.c);
  if (std::abs(value - closed) > tolerance * std::max(1.0, std::abs(closed))) {
    raise(ErrorKind::InvariantViolation, "b^2/(cos - c sin) disagrees with b^2 N/(1+b^2+c^2)");
  }
  return value;
}

namespace {

void check_fields(std::span<const SymMatrix> v, std::span<const SymMatrix> F) {
  if (v.size() != F.size()) raise(ErrorKind::DimensionMismatch, "field sizes differ");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k].dim() != 2 || F[k].dim() != 2) raise(ErrorKind::DimensionMismatch, "surface fields are 2x2");
  }
}

double det2(const SymMatrix& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

bool positive_definite2(const SymMatrix& m) { return m(0, 0) > 0.0 && det2(m) > 0.0; }

}  // namespace

SurfaceResidual dhym_residual_surface(std::span<const SymMatrix> v, std::span<const SymMatrix> F,
                                      const Phase& phase) {
  check_fields(v, F);
  SurfaceResidual out;
  out.im_part.resize(v.size());
  out.re_part.resize(v.size());
  const std::complex<double> rot = phase.conj();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!positive_definite2(v[k])) raise(ErrorKind::NonPositiveMetric, "v is not positive definite");
    // det(v - iF) = det v - det F - i (v11 F22 + v22 F11 - 2 v12 F12)
    const double mixed = v[k](0, 0) * F[k](1, 1) + v[k](1, 1) * F[k](0, 0) - 2.0 * v[k](0, 1) * F[k](0, 1);
    const std::complex<double> z = rot * std::complex<double>(det2(v[k]) - det2(F[k]), -mixed);
    out.im_part[k] = z.imag();
    out.re_part[k] = z.real();
  }
  return out;
}

double surface_ma_check(std::span<const SymMatrix> v, std::span<const SymMatrix> F, const Phase& phase) {
  check_fields(v, F);
  double defect = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Eigen::Matrix2d chi = -phase.sin * F[k].matrix() + phase.cos * v[k].matrix();
    defect = std::max(defect, std::abs(chi.determinant() - det2(v[k])));
  }
  return defect;
}

AprioriSurfaceReport surface_apriori_check(std::span<const SymMatrix> v, std::span<const SymMatrix> F,
                                           const Phase& phase, double tolerance) {
  check_fields(v, F);
  if (!(phase.sin < 0.0 && phase.cos > 0.0)) {
    raise(ErrorKind::PhasePreconditionViolated, "a priori bounds need sin < 0 < cos");
  }
  AprioriSurfaceReport r;
  r.tan_bound = std::abs(phase.sin / phase.cos) / 2.0;
  r.det_ratio_ok.resize(v.size());
  r.trace_ok.resize(v.size());
  bool all_ok = true;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!positive_definite2(v[k])) raise(ErrorKind::NonPositiveMetric, "v is not positive definite");
    const double ratio = det2(F[k]) / det2(v[k]);
    const double half_trace = 0.5 * (v[k].matrix().inverse() * F[k].matrix()).trace();
    r.det_ratio_ok[k] = ratio < 1.0 + tolerance;
    r.trace_ok[k] = half_trace < r.tan_bound + tolerance;
    r.max_det_ratio = std::max(r.max_det_ratio, ratio);
    r.max_half_trace = std::max(r.max_half_trace, half_trace);
    all_ok = all_ok && r.det_ratio_ok[k] && r.trace_ok[k];
    const bool semipositive = F[k](0, 0) >= -tolerance && F[k](1, 1) >= -tolerance && det2(F[k]) >= -tolerance;
    r.curvature_semipositive = r.curvature_semipositive && semipositive;
  }
  r.pass = all_ok && r.curvature_semipositive;
  return r;
}

double average_radius(const SymMatrix& F0) {
  return std::abs(complex_det(SymMatrix::identity(F0.dim()), F0));
}

}  // namespace dhym::geometry
