#include "dhym/kym_ndim.hpp"

#include "dhym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dhym {

TorusField2D::TorusField2D(int n, std::vector<double> samples) : n_(n), samples_(std::move(samples)) {
  if (n < 16 || samples_.size() != static_cast<std::size_t>(n) * n) {
    raise(ErrorKind::DimensionMismatch, "torus field needs N >= 16 and N*N samples");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) raise(ErrorKind::InvalidConfig, "torus field has non-finite samples");
  }
}

TorusField2D TorusField2D::from_profile(std::span<const double> f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> s(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) std::fill_n(s.begin() + static_cast<std::ptrdiff_t>(i) * n, n, f[i]);
  return TorusField2D(n, std::move(s));
}

TorusField2D TorusField2D::derivative(int p, int q) const {
  return TorusField2D(n_, spectral::derivative2d(samples_, n_, p, q));
}

MatrixField2D MatrixField2D::hessian(const TorusField2D& f, bool plus_identity) {
  const auto f11 = f.derivative(2, 0);
  const auto f12 = f.derivative(1, 1);
  const auto f22 = f.derivative(0, 2);
  MatrixField2D out{f.size(), std::vector<Eigen::Matrix2d>(f.count())};
  const double d = plus_identity ? 1.0 : 0.0;
  for (std::size_t k = 0; k < f.count(); ++k) out.m[k] << d + f11[k], f12[k], f12[k], d + f22[k];
  return out;
}

MatrixField2D MatrixField2D::constant(int n, const Eigen::Matrix2d& value) {
  return {n, std::vector<Eigen::Matrix2d>(static_cast<std::size_t>(n) * n, value)};
}

std::vector<SymMatrix> MatrixField2D::to_sym() const {
  std::vector<SymMatrix> out;
  out.reserve(m.size());
  for (const auto& a : m) {
    Eigen::MatrixXd s(2, 2);
    s << a(0, 0), a(0, 1), a(0, 1), a(1, 1);
    out.emplace_back(std::move(s));
  }
  return out;
}

KymData KymData::from_curvature(const SymMatrix& F0, double alpha) {
  return {F0.matrix().trace(), alpha, F0};
}

}  // namespace dhym

namespace dhym::kym {
namespace {

void require_positive(const Eigen::Matrix2d& m, ErrorKind kind, const char* what) {
  if (!(m(0, 0) > 0.0 && m.determinant() > 0.0)) raise(kind, what);
}

Eigen::Matrix2d inverse2(const Eigen::Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

void same_grid(std::size_t a, std::size_t b) {
  if (a != b) raise(ErrorKind::DimensionMismatch, "fields live on different grids");
}

}  // namespace

TorusField2D abreu_operator(const TorusField2D& phi) {
  const int n = phi.size();
  const auto hess = MatrixField2D::hessian(phi, true);
  std::vector<double> u11(hess.count()), u12(hess.count()), u22(hess.count());
  for (std::size_t k = 0; k < hess.count(); ++k) {
    require_positive(hess[k], ErrorKind::NotConvex, "Hess u is not positive definite");
    const Eigen::Matrix2d inv = inverse2(hess[k]);
    u11[k] = inv(0, 0);
    u12[k] = inv(0, 1);
    u22[k] = inv(1, 1);
  }
  const auto d11 = spectral::derivative2d(u11, n, 2, 0);
  const auto d12 = spectral::derivative2d(u12, n, 1, 1);
  const auto d22 = spectral::derivative2d(u22, n, 0, 2);
  std::vector<double> out(hess.count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = d11[k] + 2.0 * d12[k] + d22[k];
  return TorusField2D(n, std::move(out));
}

TorusField2D abreu_operator_divergence(const TorusField2D& phi) {
  const int n = phi.size();
  const auto hess = MatrixField2D::hessian(phi, true);
  std::vector<double> w(hess.count());
  for (std::size_t k = 0; k < hess.count(); ++k) {
    require_positive(hess[k], ErrorKind::NotConvex, "Hess u is not positive definite");
    w[k] = 1.0 / hess[k].determinant();
  }
  const auto w11 = spectral::derivative2d(w, n, 2, 0);
  const auto w12 = spectral::derivative2d(w, n, 1, 1);
  const auto w22 = spectral::derivative2d(w, n, 0, 2);
  std::vector<double> out(hess.count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    // cofactor of [[u11, u12], [u12, u22]] is [[u22, -u12], [-u12, u11]]
    const auto& h = hess[k];
    out[k] = h(1, 1) * w11[k] - 2.0 * h(0, 1) * w12[k] + h(0, 0) * w22[k];
  }
  return TorusField2D(n, std::move(out));
}

TorusField2D log_det_laplacian(const MatrixField2D& v) {
  const int n = v.n;
  std::vector<double> logdet(v.count());
  for (std::size_t k = 0; k < v.count(); ++k) {
    require_positive(v[k], ErrorKind::NonPositiveMetric, "v is not positive definite");
    logdet[k] = std::log(v[k].determinant());
  }
  const auto l11 = spectral::derivative2d(logdet, n, 2, 0);
  const auto l12 = spectral::derivative2d(logdet, n, 1, 1);
  const auto l22 = spectral::derivative2d(logdet, n, 0, 2);
  std::vector<double> out(v.count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Eigen::Matrix2d inv = inverse2(v[k]);
    out[k] = inv(0, 0) * l11[k] + 2.0 * inv(0, 1) * l12[k] + inv(1, 1) * l22[k];
  }
  return TorusField2D(n, std::move(out));
}

ComplexResidual residual_complex(const MatrixField2D& v, const MatrixField2D& F, const KymData& data,
                                 const TorusField2D& f) {
  same_grid(v.count(), F.count());
  same_grid(v.count(), f.count());
  const auto lap = log_det_laplacian(v);
  std::vector<double> hym(v.count()), scalar(v.count());
  const double mu2 = data.mu * data.mu;
  for (std::size_t k = 0; k < v.count(); ++k) {
    const Eigen::Matrix2d vinv = inverse2(v[k]);
    const Eigen::Matrix2d a = vinv * F[k];
    hym[k] = a.trace() - data.mu;
    scalar[k] = lap[k] + 4.0 * f[k] - 8.0 * data.alpha * mu2 + 8.0 * data.alpha * (a * a).trace();
  }
  return {TorusField2D(v.n, std::move(hym)), TorusField2D(v.n, std::move(scalar))};
}

SymplecticResidual residual_symplectic_reduced(const PeriodicProfile& phi, std::span<const double> phiF_dd,
                                               const MonotoneMap& x_to_y, const KymData& data,
                                               const PeriodicProfile& A) {
  const int n = phi.size();
  if (static_cast<int>(phiF_dd.size()) != n || A.size() != n || x_to_y.size() != n || data.B.dim() != 2) {
    raise(ErrorKind::DimensionMismatch, "reduced symplectic residual: grid sizes differ");
  }
  const auto d2 = phi.derivative(2);
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) {
    if (!(1.0 + d2[k] > 0.0)) raise(ErrorKind::NotConvex, "1 + phi'' <= 0");
    g[k] = -d2[k] / (1.0 + d2[k]);
  }
  const auto abreu = spectral::derivative(g, 2);  // [u^{11}]_{11}
  const auto xs = x_to_y.node_values();
  const double a = data.B(0, 0);
  const double b = data.B(0, 1);
  const double c = data.B(1, 1);
  SymplecticResidual out{std::vector<double>(n), std::vector<double>(n)};
  for (int k = 0; k < n; ++k) {
    Eigen::Matrix2d u;
    u << 1.0 + d2[k], 0.0, 0.0, 1.0;
    Eigen::Matrix2d F;
    F << a + spectral::interpolate(phiF_dd, xs[k]), b, b, c;
    const Eigen::Matrix2d uf = u * F;
    out.hym[k] = uf.trace() - data.mu;
    out.scalar[k] = abreu[k] + 4.0 * A[k] - 8.0 * data.alpha * data.mu * data.mu + 8.0 * data.alpha * (uf * uf).trace();
  }
  return out;
}

AprioriReport apriori_verify(const MatrixField2D& v, const MatrixField2D& F, double mu, double tolerance) {
  same_grid(v.count(), F.count());
  AprioriReport r;
  r.sum_squares_bound = 2.0 * mu * mu;
  r.min_lambda = INFINITY;
  r.max_lambda = -INFINITY;
  for (std::size_t k = 0; k < v.count(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> metric(v[k]);
    const Eigen::Vector2d ev = metric.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) raise(ErrorKind::NonPositiveMetric, "v is not positive definite");
    const Eigen::Matrix2d q = metric.eigenvectors();
    const Eigen::Matrix2d s = q * ev.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
    Eigen::Matrix2d p = s * F[k] * s;
    p = 0.5 * (p + p.transpose()).eval();
    const Eigen::Vector2d lam = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(p, Eigen::EigenvaluesOnly).eigenvalues();
    r.min_lambda = std::min(r.min_lambda, lam.minCoeff());
    r.max_lambda = std::max(r.max_lambda, lam.maxCoeff());
    r.max_sum_squares = std::max(r.max_sum_squares, lam.squaredNorm());
    const double fmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(F[k], Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    r.curvature_semipositive = r.curvature_semipositive && fmin >= -tolerance;
  }
  r.eigenvalues_in_range = r.min_lambda >= -tolerance && r.max_lambda <= mu + tolerance;
  r.pass = r.curvature_semipositive && r.eigenvalues_in_range && r.max_sum_squares < r.sum_squares_bound + tolerance;
  return r;
}

DetBoundReport det_bound_verify(const MatrixField2D& v, double lower, double upper) {
  DetBoundReport r;
  r.min_det = INFINITY;
  r.max_det = -INFINITY;
  for (const auto& m : v.m) {
    const double d = m.determinant();
    r.min_det = std::min(r.min_det, d);
    r.max_det = std::max(r.max_det, d);
  }
  r.pass = r.min_det > lower && r.max_det < upper;
  return r;
}

}  // namespace dhym::kym
