#include "dhym/ode_solver.hpp"

#include "dhym/errors.hpp"
#include "dhym/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace dhym {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::DHYM: return "dhym";
    case Regime::LargeRadius: return "large_radius";
    case Regime::SmallRadius: return "small_radius";
  }
  return "unknown";
}

Regime parse_regime(std::string_view s) {
  if (s == "dhym") return Regime::DHYM;
  if (s == "large_radius") return Regime::LargeRadius;
  if (s == "small_radius") return Regime::SmallRadius;
  raise(ErrorKind::InvalidConfig, "unknown regime '" + std::string(s) + "'");
}

ODEProblem ODEProblem::make(Regime regime, double alpha, const ConstantCurvature2& F0, PeriodicProfile datum,
                            SolverTolerances tol) {
  ODEProblem p;
  p.regime = regime;
  p.alpha = alpha;
  p.F0 = F0;
  if (regime == Regime::DHYM) p.phase = geometry::torus_constant_phase(F0).phase;
  p.datum = std::move(datum);
  p.tol = tol;
  return p;
}

}  // namespace dhym

namespace dhym::ode {
namespace {

void check_grid(std::size_t got, int n) {
  if (got != static_cast<std::size_t>(n)) raise(ErrorKind::DimensionMismatch, "profiles live on different grids");
}

std::vector<double> sampled_datum(std::span<const double> A, double mean_value, double t) {
  std::vector<double> out(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = t * A[i] + (1.0 - t) * mean_value;
  return out;
}

struct NewtonOutcome {
  bool converged = false;
  bool convexity = false;
  int iterations = 0;
  std::vector<double> sigma;
  std::vector<double> history;
};

double min_weight(std::span<const double> sigma) {
  double m = INFINITY;
  for (double s : sigma) m = std::min(m, 1.0 + s);
  return m;
}

NewtonOutcome newton(std::vector<double> sigma, std::span<const double> A, const Coefficients& k,
                     const Eigen::MatrixXd& d2, const SolverTolerances& tol) {
  const int n = static_cast<int>(sigma.size());
  NewtonOutcome out;
  auto R = curvature_residual(sigma, A, k);
  double r = spectral::sup_norm(R);
  out.history.push_back(r);

  Eigen::MatrixXd M(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1);
  for (int it = 0; it < tol.max_newton && r > tol.residual; ++it) {
    Eigen::VectorXd inv_w2(n);
    for (int i = 0; i < n; ++i) inv_w2[i] = 1.0 / ((1.0 + sigma[i]) * (1.0 + sigma[i]));
    M.topLeftCorner(n, n) = 0.25 * (d2 * inv_w2.asDiagonal());
    M.topLeftCorner(n, n).diagonal().array() -= k.K0;
    M.col(n).head(n).setOnes();
    M.row(n).head(n).setConstant(1.0 / n);
    M(n, n) = 0.0;
    for (int i = 0; i < n; ++i) rhs[i] = -R[i];
    rhs[n] = 0.0;
    const Eigen::VectorXd step = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);

    bool accepted = false;
    bool only_convexity = true;
    std::vector<double> trial(n);
    for (double s = 1.0; s >= 0x1p-20; s *= 0.5) {
      for (int i = 0; i < n; ++i) trial[i] = sigma[i] + s * step[i];
      const double m = spectral::mean(trial);
      for (double& v : trial) v -= m;
      if (!(min_weight(trial) > 1e-6)) continue;
      only_convexity = false;
      auto R_trial = curvature_residual(trial, A, k);
      const double r_trial = spectral::sup_norm(R_trial);
      if (r_trial <= tol.residual || r_trial < (1.0 - 1e-4 * s) * r) {
        sigma.swap(trial);
        R = std::move(R_trial);
        r = r_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.convexity = only_convexity;
      out.iterations = it;
      return out;
    }
    out.iterations = it + 1;
    out.history.push_back(r);
  }
  out.converged = r <= tol.residual;
  out.sigma = std::move(sigma);
  return out;
}

}  // namespace

Coefficients coefficients(const ODEProblem& p) {
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) raise(ErrorKind::InvalidConfig, "alpha must be >= 0");
  if (p.datum.size() == 0) raise(ErrorKind::InvalidConfig, "problem has no datum");
  const double a = p.F0.a, b = p.F0.b, c = p.F0.c;
  const double alpha = p.alpha;
  switch (p.regime) {
    case Regime::DHYM: {
      if (std::abs(p.phase.cos * p.phase.cos + p.phase.sin * p.phase.sin - 1.0) > 1e-12) {
        raise(ErrorKind::InvalidConfig, "phase is not a unit complex number");
      }
      const double D = p.phase.cos - c * p.phase.sin;
      if (std::abs(D) <= 1e-12) raise(ErrorKind::DegenerateDenominator, "cos - c sin vanishes");
      return {alpha * b * b / D, -alpha * (1.0 + c * c) / D};
    }
    case Regime::LargeRadius: {
      const double tr = a + c;
      return {4.0 * alpha * b * b, -2.0 * alpha * (a * a + c * c) + 2.0 * alpha * tr * tr};
    }
    case Regime::SmallRadius: {
      const double det = p.F0.det();
      if (det == 0.0) raise(ErrorKind::InvalidConfig, "small radius regime needs det F0 != 0");
      const double q = b * b + c * c;
      return {alpha * b * b * det / q, -alpha * c * c * det / q};
    }
  }
  raise(ErrorKind::InvalidConfig, "unknown regime");
}

double compatibility_constant(const ODEProblem& p) {
  const auto k = coefficients(p);
  return k.C0 - k.K0;
}

ProjectedDatum project_datum(const PeriodicProfile& A, const ODEProblem& p) {
  const double target = compatibility_constant(p);
  const double shift = target - spectral::mean(A.samples());
  std::vector<double> out(A.values());
  for (double& v : out) v += shift;
  return {PeriodicProfile(std::move(out)), shift};
}

std::vector<double> curvature_residual(std::span<const double> sigma, std::span<const double> A,
                                       const Coefficients& k) {
  const std::size_t n = sigma.size();
  check_grid(A.size(), static_cast<int>(n));
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 + sigma[i];
    if (!(w > 0.0)) raise(ErrorKind::NotConvex, "1 + phi'' <= 0");
    g[i] = -sigma[i] / w;  // 1/w - 1
  }
  auto out = spectral::derivative(g, 2);
  for (std::size_t i = 0; i < n; ++i) out[i] = -0.25 * out[i] - k.K0 * (1.0 + sigma[i]) + k.C0 - A[i];
  return out;
}

PeriodicProfile residual(const PeriodicProfile& phi, const ODEProblem& p) {
  check_grid(phi.size(), p.grid());
  const auto k = coefficients(p);
  return PeriodicProfile(curvature_residual(phi.derivative(2), p.datum.samples(), k));
}

Linearization linearize(const PeriodicProfile& phi, const ODEProblem& p) {
  const int n = phi.size();
  check_grid(n, p.grid());
  const auto k = coefficients(p);
  const auto sigma = phi.derivative(2);
  Linearization out;
  out.weight.resize(n);
  Eigen::VectorXd inv_w2(n);
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 + sigma[i];
    if (!(w > 0.0)) raise(ErrorKind::NotConvex, "1 + phi'' <= 0");
    out.weight[i] = w * w;
    inv_w2[i] = 1.0 / (w * w);
  }
  const Eigen::MatrixXd d2 = spectral::derivative_matrix(n, 2);
  out.jacobian = 0.25 * d2 * inv_w2.asDiagonal() * d2 - k.K0 * d2;
  out.bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.bordered.topLeftCorner(n, n) = out.jacobian;
  out.bordered.col(n).head(n).setOnes();
  out.bordered.row(n).head(n).setConstant(1.0 / n);
  out.beta = 0.25 * d2;
  for (int i = 0; i < n; ++i) out.beta(i, i) -= k.K0 * out.weight[i];
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(out.bordered);
  if (!lu.isInvertible()) raise(ErrorKind::SingularLinearization, "bordered linearization is singular");
  return out;
}

SolutionBundle solve(const ODEProblem& p) {
  if (p.regime == Regime::SmallRadius && p.F0.b != 0.0 && p.F0.det() <= 0.0) {
    raise(ErrorKind::SmallRadiusObstruction,
          "small radius limit needs det F0 > 0 when b != 0 (alpha b^2 det F0 / (b^2 + c^2) > 0)");
  }
  const auto k = coefficients(p);
  const int n = p.grid();
  auto projected = project_datum(p.datum, p);
  const std::vector<double> A = projected.datum.values();
  const double cA = k.C0 - k.K0;

  SolutionBundle out;
  out.regime = p.regime;
  out.datum = projected.datum;
  out.datum_shift = projected.shift;

  std::vector<double> sigma(n, 0.0);
  const double r0 = spectral::sup_norm(curvature_residual(sigma, sampled_datum(A, cA, 0.0), k));
  out.trace.push_back({0.0, 0, r0});
  out.newton_history = {r0};

  const double r_full = spectral::sup_norm(curvature_residual(sigma, A, k));
  if (r_full > p.tol.residual) {
    const Eigen::MatrixXd d2 = spectral::derivative_matrix(n, 2);
    double t = 0.0;
    double step = 1.0;
    while (t < 1.0) {
      const double t_try = std::min(1.0, t + step);
      auto outcome = newton(sigma, sampled_datum(A, cA, t_try), k, d2, p.tol);
      if (outcome.converged) {
        sigma = std::move(outcome.sigma);
        t = t_try;
        out.trace.push_back({t, outcome.iterations, outcome.history.back()});
        out.newton_history = std::move(outcome.history);
        step = std::min(1.0, 2.0 * step);
        continue;
      }
      step *= 0.5;
      if (step < p.tol.step_floor) {
        if (outcome.convexity) {
          raise(ErrorKind::ConvexityLost, "damping could not keep 1 + phi'' > 0 at t = " + std::to_string(t_try));
        }
        raise(ErrorKind::ContinuationStalled, "continuation step fell below the floor at t = " + std::to_string(t));
      }
    }
  }

  out.phi_dd = sigma;
  out.phi = PeriodicProfile::centered(spectral::second_antiderivative(sigma));
  out.x_to_y = MonotoneMap(out.phi.derivative(1));
  auto dual = legendre::legendre_forward(out.phi);
  out.psi = std::move(dual.phi);
  out.y_to_x = std::move(dual.map);
  out.legendre_offset = dual.offset;
  const auto xs = out.y_to_x.node_values();
  out.psi_dd.resize(n);
  for (int j = 0; j < n; ++j) {
    const double s = spectral::interpolate(sigma, xs[j]);
    out.psi_dd[j] = -s / (1.0 + s);
  }
  auto bp = bundle_potential(out.psi_dd, p);
  out.phiF = std::move(bp.phiF);
  out.phiF_dd = std::move(bp.phiF_dd);
  out.residual = curvature_residual(sigma, A, k);
  out.residual_norm = spectral::sup_norm(out.residual);
  return out;
}

BundlePotential bundle_potential(std::span<const double> psi_dd, const ODEProblem& p) {
  const double a = p.F0.a, b = p.F0.b, c = p.F0.c;
  double factor = 0.0;
  BundlePotential out;
  switch (p.regime) {
    case Regime::DHYM: {
      const double cs = p.phase.cos, sn = p.phase.sin;
      const double D = cs - c * sn;
      if (std::abs(D) <= 1e-12) raise(ErrorKind::DegenerateDenominator, "cos - c sin vanishes");
      out.constant_part = -(sn * (1.0 - p.F0.det()) + cs * p.F0.tr()) / D;
      if (std::abs(out.constant_part) > 1e-12 * std::max(1.0, std::hypot(1.0 - p.F0.det(), p.F0.tr()) / std::abs(D))) {
        raise(ErrorKind::NonPeriodicCurvature, "constant part of phiF'' does not vanish for this phase");
      }
      factor = -(c * cs + sn) / D;
      break;
    }
    case Regime::LargeRadius:
      factor = a;
      break;
    case Regime::SmallRadius:
      factor = c * p.F0.det() / (b * b + c * c);
      break;
  }
  out.phiF_dd.resize(psi_dd.size());
  for (std::size_t i = 0; i < psi_dd.size(); ++i) out.phiF_dd[i] = factor * psi_dd[i];
  if (std::abs(spectral::mean(out.phiF_dd)) > 1e-10) {
    raise(ErrorKind::NonPeriodicCurvature, "phiF'' has nonzero mean; phiF would not be periodic");
  }
  out.phiF = PeriodicProfile::centered(spectral::second_antiderivative(out.phiF_dd));
  return out;
}

BundlePotential reconstruct_bundle_potential(const SolutionBundle& bundle, const ODEProblem& p) {
  return bundle_potential(bundle.psi_dd, p);
}

MaxPrincipleReport max_principle_verify(std::span<const double> sigma, std::span<const double> A,
                                        const ODEProblem& p, double tolerance) {
  check_grid(A.size(), static_cast<int>(sigma.size()));
  const auto k = coefficients(p);
  MaxPrincipleReport r;
  r.argmax = static_cast<int>(std::max_element(sigma.begin(), sigma.end()) - sigma.begin());
  r.x_bar = static_cast<double>(r.argmax) / static_cast<double>(sigma.size());
  r.lhs = k.K0 * (1.0 + sigma[r.argmax]) - k.C0;
  r.bound = spectral::sup_norm(A);
  r.margin = r.bound - r.lhs;
  r.holds = r.margin >= -tolerance * std::max(1.0, r.bound);
  return r;
}

MaxPrincipleReport max_principle_verify(const SolutionBundle& bundle, const ODEProblem& p, double tolerance) {
  return max_principle_verify(bundle.phi_dd, bundle.datum.samples(), p, tolerance);
}

LiftedFields lift_to_2d(const SolutionBundle& bundle, const ODEProblem& p) {
  const int n = bundle.phi.size();
  const auto xs = bundle.y_to_x.node_values();
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) f[j] = bundle.datum.at(xs[j]);

  LiftedFields out{MatrixField2D{n, {}}, MatrixField2D{n, {}}, TorusField2D::from_profile(f)};
  out.v.m.resize(static_cast<std::size_t>(n) * n);
  out.F.m.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    Eigen::Matrix2d v;
    v << 1.0 + bundle.psi_dd[i], 0.0, 0.0, 1.0;
    Eigen::Matrix2d F;
    F << p.F0.a + bundle.phiF_dd[i], p.F0.b, p.F0.b, p.F0.c;
    for (int j = 0; j < n; ++j) {
      out.v.m[static_cast<std::size_t>(i) * n + j] = v;
      out.F.m[static_cast<std::size_t>(i) * n + j] = F;
    }
  }
  return out;
}

LiftedResiduals lifted_residuals(const SolutionBundle& bundle, const ODEProblem& p) {
  const auto fields = lift_to_2d(bundle, p);
  const auto lap = kym::log_det_laplacian(fields.v);
  const std::size_t count = fields.v.count();
  LiftedResiduals r;
  switch (p.regime) {
    case Regime::DHYM: {
      const auto v = fields.v.to_sym();
      const auto F = fields.F.to_sym();
      const auto surf = geometry::dhym_residual_surface(v, F, p.phase);
      r.first = spectral::sup_norm(surf.im_part);
      for (std::size_t k = 0; k < count; ++k) {
        const double s = -0.25 * lap[k];
        const double e = s - p.alpha * surf.re_part[k] / fields.v[k].determinant() - fields.f[k];
        r.second = std::max(r.second, std::abs(e));
      }
      r.ma_defect = geometry::surface_ma_check(v, F, p.phase);
      break;
    }
    case Regime::LargeRadius: {
      const auto res = kym::residual_complex(fields.v, fields.F, KymData::from_curvature(p.F0.matrix(), p.alpha),
                                             fields.f);
      r.first = res.hym.sup_norm();
      r.second = res.scalar.sup_norm();
      break;
    }
    case Regime::SmallRadius: {
      const double kappa = p.F0.tr() / p.F0.det();
      for (std::size_t k = 0; k < count; ++k) {
        const Eigen::Matrix2d& F = fields.F[k];
        const Eigen::Matrix2d& v = fields.v[k];
        const double detF = F.determinant();
        const double j_eq = (F.inverse() * v).trace() - kappa;
        const double e = -0.25 * lap[k] - p.alpha * detF / v.determinant() - fields.f[k];
        r.first = std::max(r.first, std::abs(j_eq));
        r.second = std::max(r.second, std::abs(e));
      }
      break;
    }
  }
  return r;
}

}  // namespace dhym::ode
