#include "dhym/linearized_ops.hpp"

#include "dhym/errors.hpp"
#include "dhym/spectral.hpp"

#include <cmath>
#include <numbers>

namespace dhym {
namespace {

using Field = std::vector<double>;

// Removes the null space of the discrete gradient: the constant and, for
// even N, the three checkerboard modes.
void project_range(Field& f, int n) {
  const std::size_t count = f.size();
  long double c0 = 0, c1 = 0, c2 = 0, c3 = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = f[static_cast<std::size_t>(i) * n + j];
      const int si = (i % 2 == 0) ? 1 : -1;
      const int sj = (j % 2 == 0) ? 1 : -1;
      c0 += v;
      c1 += si * v;
      c2 += sj * v;
      c3 += si * sj * v;
    }
  }
  const bool even = n % 2 == 0;
  const double m0 = static_cast<double>(c0 / count);
  const double m1 = even ? static_cast<double>(c1 / count) : 0.0;
  const double m2 = even ? static_cast<double>(c2 / count) : 0.0;
  const double m3 = even ? static_cast<double>(c3 / count) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int si = (i % 2 == 0) ? 1 : -1;
      const int sj = (j % 2 == 0) ? 1 : -1;
      f[static_cast<std::size_t>(i) * n + j] -= m0 + si * m1 + sj * m2 + si * sj * m3;
    }
  }
}

long double dot(const Field& a, const Field& b) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<long double>(a[k]) * b[k];
  return s;
}

Field d(const Field& f, int n, int p, int q) { return spectral::derivative2d(f, n, p, q); }

// Jacobian of a vector field: X[k](j, c) = d_j x^c.
std::vector<Eigen::Matrix2d> jacobian(const Field& x1, const Field& x2, int n) {
  const auto a = d(x1, n, 1, 0), b = d(x1, n, 0, 1), c = d(x2, n, 1, 0), e = d(x2, n, 0, 1);
  std::vector<Eigen::Matrix2d> out(x1.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] << a[k], c[k], b[k], e[k];
  return out;
}

MatrixField2D invert(const MatrixField2D& h) {
  MatrixField2D out{h.n, std::vector<Eigen::Matrix2d>(h.count())};
  for (std::size_t k = 0; k < h.count(); ++k) {
    const auto& m = h[k];
    if (!(m(0, 0) > 0.0 && m.determinant() > 0.0)) raise(ErrorKind::NotConvex, "Hess u is not positive definite");
    out.m[k] = m.inverse();
  }
  return out;
}

}  // namespace

LinearizedContext::LinearizedContext(TorusField2D phi_u, SymMatrix B, TorusField2D phi)
    : n_(phi_u.size()), phi_u_(std::move(phi_u)), B_(std::move(B)), phi_(std::move(phi)) {
  if (B_.dim() != 2) raise(ErrorKind::DimensionMismatch, "B must be 2x2");
  if (phi_.size() != n_) raise(ErrorKind::DimensionMismatch, "background fields live on different grids");
  hess_ = MatrixField2D::hessian(phi_u_, true);
  inv_ = invert(hess_);
}

LinearizedContext LinearizedContext::at_solution(TorusField2D phi_u, SymMatrix B) {
  const int n = phi_u.size();
  LinearizedContext ctx(phi_u, B, TorusField2D::zero(n));
  const Eigen::Matrix2d b = ctx.B_.matrix();
  Field rhs(ctx.hess_.count());
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = b.trace() - ctx.hess_[k].cwiseProduct(b).sum();
  ctx.phi_ = TorusField2D(n, ctx.solve_laplacian(rhs));
  return ctx;
}

std::vector<double> LinearizedContext::minus_laplacian(std::span<const double> f) const {
  const Field ff(f.begin(), f.end());
  const auto f1 = d(ff, n_, 1, 0);
  const auto f2 = d(ff, n_, 0, 1);
  Field g1(ff.size()), g2(ff.size());
  for (std::size_t k = 0; k < ff.size(); ++k) {
    g1[k] = inv_[k](0, 0) * f1[k] + inv_[k](0, 1) * f2[k];
    g2[k] = inv_[k](1, 0) * f1[k] + inv_[k](1, 1) * f2[k];
  }
  const auto a = d(g1, n_, 1, 0);
  const auto b = d(g2, n_, 0, 1);
  Field out(ff.size());
  for (std::size_t k = 0; k < ff.size(); ++k) out[k] = -(a[k] + b[k]);
  return out;
}

std::vector<double> LinearizedContext::solve_laplacian(std::span<const double> rhs, double* residual) const {
  // Preconditioned CG on -Delta x = -rhs, preconditioned by the flat inverse Laplacian.
  Field b(rhs.begin(), rhs.end());
  for (double& v : b) v = -v;
  project_range(b, n_);
  const long double bnorm = std::sqrt(dot(b, b));
  Field x(b.size(), 0.0);
  if (bnorm == 0.0L) {
    if (residual) *residual = 0.0;
    return x;
  }
  auto precondition = [&](const Field& r) {
    auto z = spectral::inverse_laplacian2d(r, n_);
    for (double& v : z) v = -v;
    project_range(z, n_);
    return z;
  };
  Field r = b;
  Field z = precondition(r);
  Field p = z;
  long double rz = dot(r, z);
  for (int it = 0; it < 2000; ++it) {
    const auto ap = minus_laplacian(p);
    const long double pap = dot(p, ap);
    if (!(pap > 0.0L)) raise(ErrorKind::SingularElliptic, "Delta lost definiteness on the range");
    const double step = static_cast<double>(rz / pap);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] += step * p[k];
      r[k] -= step * ap[k];
    }
    if (std::sqrt(dot(r, r)) <= 1e-15L * bnorm) break;
    z = precondition(r);
    const long double rz_next = dot(r, z);
    const double beta = static_cast<double>(rz_next / rz);
    rz = rz_next;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  project_range(x, n_);
  if (residual) {
    const auto ax = minus_laplacian(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(ax[k] - b[k]));
    *residual = worst;
  }
  return x;
}

}  // namespace dhym

namespace dhym::linops {
namespace {

struct Background {
  Field phi1, phi2;                // grad phi
  std::vector<Eigen::Matrix2d> Q;  // d_j p^k, p = u^{-1} grad phi
};

Background background(const LinearizedContext& ctx) {
  const int n = ctx.size();
  const Field phi(ctx.phi().samples().begin(), ctx.phi().samples().end());
  Background bg{d(phi, n, 1, 0), d(phi, n, 0, 1), {}};
  Field p1(phi.size()), p2(phi.size());
  const auto& inv = ctx.inv_hess_u();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    p1[k] = inv[k](0, 0) * bg.phi1[k] + inv[k](0, 1) * bg.phi2[k];
    p2[k] = inv[k](1, 0) * bg.phi1[k] + inv[k](1, 1) * bg.phi2[k];
  }
  bg.Q = jacobian(p1, p2, n);
  return bg;
}

void require_grid(const LinearizedContext& ctx, std::size_t count) {
  if (count != static_cast<std::size_t>(ctx.size()) * ctx.size()) {
    raise(ErrorKind::DimensionMismatch, "field and context grids differ");
  }
}

// r = u^{-1} udot u^{-1} grad phi, together with M = u^{-1} udot u^{-1}.
void transported(const LinearizedContext& ctx, const MatrixField2D& udot, const Background& bg,
                 std::vector<Eigen::Matrix2d>& M, Field& r1, Field& r2) {
  const auto& inv = ctx.inv_hess_u();
  M.resize(udot.count());
  r1.resize(udot.count());
  r2.resize(udot.count());
  for (std::size_t k = 0; k < udot.count(); ++k) {
    M[k] = inv[k] * udot[k] * inv[k];
    const Eigen::Vector2d r = M[k] * Eigen::Vector2d(bg.phi1[k], bg.phi2[k]);
    r1[k] = r[0];
    r2[k] = r[1];
  }
}

TorusField2D lincond_solve(const LinearizedContext& ctx, const MatrixField2D& udot, const Background& bg) {
  const int n = ctx.size();
  std::vector<Eigen::Matrix2d> M;
  Field r1, r2;
  transported(ctx, udot, bg, M, r1, r2);
  const auto a = d(r1, n, 1, 0);
  const auto b = d(r2, n, 0, 1);
  const Eigen::Matrix2d B = ctx.B().matrix();
  Field rhs(udot.count());
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = a[k] + b[k] - udot[k].cwiseProduct(B).sum();
  return TorusField2D(n, ctx.solve_laplacian(rhs));
}

}  // namespace

TorusField2D solve_lincond(const LinearizedContext& ctx, const MatrixField2D& udot) {
  require_grid(ctx, udot.count());
  return lincond_solve(ctx, udot, background(ctx));
}

TorusField2D solve_lincond(const LinearizedContext& ctx, const TorusField2D& gamma) {
  return solve_lincond(ctx, MatrixField2D::hessian(gamma, false));
}

TorusField2D lincond_residual(const LinearizedContext& ctx, const MatrixField2D& udot, const TorusField2D& phidot) {
  require_grid(ctx, udot.count());
  const int n = ctx.size();
  const auto bg = background(ctx);
  std::vector<Eigen::Matrix2d> M;
  Field r1, r2;
  transported(ctx, udot, bg, M, r1, r2);
  const auto a = d(r1, n, 1, 0);
  const auto b = d(r2, n, 0, 1);
  const auto lap = ctx.minus_laplacian(phidot.samples());
  const Eigen::Matrix2d B = ctx.B().matrix();
  Field out(udot.count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = udot[k].cwiseProduct(B).sum() - lap[k] - a[k] - b[k];
  return TorusField2D(n, std::move(out));
}

LTerms apply_L_terms(const LinearizedContext& ctx, const MatrixField2D& udot) {
  require_grid(ctx, udot.count());
  const int n = ctx.size();
  const std::size_t count = udot.count();
  const auto bg = background(ctx);
  const auto& H = ctx.hess_u();
  const auto& inv = ctx.inv_hess_u();
  const Eigen::Matrix2d B = ctx.B().matrix();

  std::vector<Eigen::Matrix2d> M;
  Field r1, r2;
  transported(ctx, udot, bg, M, r1, r2);
  const auto R = jacobian(r1, r2, n);

  Field m11(count), m12(count), m22(count);
  for (std::size_t k = 0; k < count; ++k) {
    m11[k] = M[k](0, 0);
    m12[k] = 0.5 * (M[k](0, 1) + M[k](1, 0));
    m22[k] = M[k](1, 1);
  }
  const auto dm11 = d(m11, n, 2, 0);
  const auto dm12 = d(m12, n, 1, 1);
  const auto dm22 = d(m22, n, 0, 2);

  const auto phidot = lincond_solve(ctx, udot, bg);
  const Field pd(phidot.samples().begin(), phidot.samples().end());
  const auto pd1 = d(pd, n, 1, 0);
  const auto pd2 = d(pd, n, 0, 1);
  Field q1(count), q2(count);
  for (std::size_t k = 0; k < count; ++k) {
    q1[k] = inv[k](0, 0) * pd1[k] + inv[k](0, 1) * pd2[k];
    q2[k] = inv[k](1, 0) * pd1[k] + inv[k](1, 1) * pd2[k];
  }
  const auto Qd = jacobian(q1, q2, n);

  LTerms out;
  for (auto& t : out.terms) t.resize(count);
  out.total.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::Matrix2d& G = udot[k];
    const Eigen::Matrix2d HB = H[k] * B;
    out.terms[0][k] = -(dm11[k] + 2.0 * dm12[k] + dm22[k]);
    out.terms[1][k] = 2.0 * (bg.Q[k] * G * B).trace();
    out.terms[2][k] = -2.0 * (R[k] * bg.Q[k]).trace();
    out.terms[3][k] = 2.0 * G.cwiseProduct(B * H[k] * B).sum();
    out.terms[4][k] = -2.0 * (R[k] * HB).trace();
    out.terms[5][k] = 2.0 * (Qd[k] * HB).trace();
    out.terms[6][k] = 2.0 * (Qd[k] * bg.Q[k]).trace();
    double s = 0.0;
    for (const auto& t : out.terms) s += t[k];
    out.total[k] = s;
  }
  return out;
}

TorusField2D apply_L(const LinearizedContext& ctx, const TorusField2D& gamma) {
  return TorusField2D(ctx.size(), apply_L_terms(ctx, MatrixField2D::hessian(gamma, false)).total);
}

Eigen::MatrixXd assemble_dense(const LinearizedContext& ctx) {
  const int n = ctx.size();
  if (n > 32) raise(ErrorKind::InvalidConfig, "dense assembly is limited to N <= 32");
  const int m = n * n;
  Eigen::MatrixXd out(m, m);
  std::vector<double> e(m, 0.0);
  for (int j = 0; j < m; ++j) {
    e[j] = 1.0;
    const auto col = apply_L(ctx, TorusField2D(n, e));
    for (int i = 0; i < m; ++i) out(i, j) = col[i];
    e[j] = 0.0;
  }
  return out;
}

double inner(const TorusField2D& a, const TorusField2D& b) {
  if (a.count() != b.count()) raise(ErrorKind::DimensionMismatch, "inner product of fields on different grids");
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.count(); ++k) s += static_cast<long double>(a[k]) * b[k];
  return static_cast<double>(s / static_cast<long double>(a.count()));
}

double selfadjointness_defect(const LinearizedContext& ctx, const TorusField2D& xi, const TorusField2D& gamma) {
  const auto Lg = apply_L(ctx, gamma);
  const auto Lx = apply_L(ctx, xi);
  const double nx = std::sqrt(inner(xi, xi));
  const double ng = std::sqrt(inner(gamma, gamma));
  if (nx == 0.0 || ng == 0.0) return 0.0;
  const double scale = std::max(std::sqrt(inner(Lg, Lg)) / ng, std::sqrt(inner(Lx, Lx)) / nx);
  if (scale == 0.0) return 0.0;
  return std::abs(inner(xi, Lg) - inner(gamma, Lx)) / (nx * ng * scale);
}

TorusField2D band_limited(int n, std::span<const TrialMode> modes) {
  const double two_pi = 2.0 * std::numbers::pi;
  return TorusField2D::from_function(n, [&](double x1, double x2) {
    double s = 0.0;
    for (const auto& m : modes) {
      const double arg = two_pi * (m.k1 * x1 + m.k2 * x2);
      s += m.cos_coeff * std::cos(arg) + m.sin_coeff * std::sin(arg);
    }
    return s;
  });
}

RefinementStudy selfadjointness_refinement(std::span<const TrialMode> bg, const SymMatrix& B,
                                           std::span<const TrialMode> xi, std::span<const TrialMode> gamma,
                                           std::span<const int> grids) {
  RefinementStudy out;
  std::vector<double> ns;
  for (int n : grids) {
    const auto ctx = LinearizedContext::at_solution(band_limited(n, bg), B);
    out.grids.push_back(n);
    out.defects.push_back(selfadjointness_defect(ctx, band_limited(n, xi), band_limited(n, gamma)));
    ns.push_back(n);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(out.defects[i] > 0.0)) continue;
    const double lx = std::log(ns[i]), ly = std::log(out.defects[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  out.order = used >= 2 ? -(used * sxy - sx * sy) / (used * sxx - sx * sx) : 0.0;
  return out;
}

double negativity_check(const LinearizedContext& ctx, std::span<const TorusField2D> trials) {
  double worst = -INFINITY;
  for (const auto& g : trials) {
    const double norm2 = inner(g, g);
    if (!(norm2 > 0.0)) raise(ErrorKind::InvalidConfig, "negativity trial is zero");
    if (std::abs(g.mean()) > 1e-12 * std::sqrt(norm2)) raise(ErrorKind::InvalidConfig, "negativity trial must be mean-zero");
    worst = std::max(worst, inner(g, apply_L(ctx, g)) / norm2);
  }
  return worst;
}

}  // namespace dhym::linops
