#include "dhym/radius_limits.hpp"

#include "dhym/errors.hpp"
#include "dhym/spectral.hpp"

#include <cmath>
#include <limits>

namespace dhym {

CohomologyData CohomologyData::from(const SymMatrix& F0) {
  CohomologyData d;
  d.n = F0.dim();
  d.F0 = F0;
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(F0.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
  d.e.assign(d.n + 1, 0.0);
  d.e[0] = 1.0;
  for (int i = 0; i < d.n; ++i) {
    for (int k = i + 1; k >= 1; --k) d.e[k] += lam[i] * d.e[k - 1];
  }
  d.c_large = d.e[1 <= d.n ? 1 : 0];
  const double en = d.e[d.n];
  d.c_small = (d.n >= 1 && en != 0.0) ? d.e[d.n - 1] / en : std::numeric_limits<double>::quiet_NaN();
  return d;
}

}  // namespace dhym

namespace dhym::limits {
namespace {

std::complex<double> ipow(int k) {
  static const std::complex<double> cycle[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return cycle[((k % 4) + 4) % 4];
}

std::complex<double> unit_conj(std::complex<double> z) {
  const double m = std::abs(z);
  if (!(m > 0.0)) raise(ErrorKind::DegeneratePhase, "z(t) vanishes");
  return std::conj(z) / m;
}

void require_points(std::span<const double> ts) {
  if (ts.size() < 4) raise(ErrorKind::InvalidConfig, "need at least 4 values of t");
  for (double t : ts) {
    if (!(t > 0.0)) raise(ErrorKind::InvalidConfig, "t must be positive");
  }
}

bool decreasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1])) return false;
  }
  return true;
}

}  // namespace

std::complex<double> exact_z(double t, const CohomologyData& d) {
  std::complex<double> z = 0.0;
  for (int k = 0; k <= d.n; ++k) z += ipow(-k) * d.e[k] * std::pow(t, d.n - k);
  return z;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (x.size() != y.size() || x.size() < 4) return nan;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return nan;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

PhaseCheck large_radius_phase_check(const CohomologyData& d, std::span<const double> ts) {
  require_points(ts);
  PhaseCheck out;
  const double c = d.c_large;
  for (double t : ts) {
    const auto e = unit_conj(exact_z(t, d));
    const std::complex<double> trunc(1.0 - c * c / (2.0 * t * t), c / t);
    out.t.push_back(t);
    out.error.push_back(std::abs(e - trunc));
  }
  out.slope = loglog_slope(out.t, out.error);
  out.monotone = decreasing(out.error);
  return out;
}

PhaseCheck small_radius_phase_check(const CohomologyData& d, std::span<const double> ts) {
  require_points(ts);
  const double en = d.e[d.n];
  double scale = 1.0;
  for (double v : d.e) scale = std::max(scale, std::abs(v));
  if (std::abs(en) <= 1e-14 * scale) raise(ErrorKind::DegenerateTopPower, "e_n(F0) = 0: small radius expansion undefined");
  PhaseCheck out;
  const std::complex<double> lead = ipow(d.n) * (en > 0.0 ? 1.0 : -1.0);
  const double c = d.c_small;
  for (double t : ts) {
    const auto e = unit_conj(exact_z(t, d));
    const std::complex<double> trunc = lead * std::complex<double>(1.0, -c * t);
    out.t.push_back(t);
    out.error.push_back(std::abs(e - trunc));
  }
  out.slope = loglog_slope(out.t, out.error);
  out.monotone = decreasing(out.error);
  return out;
}

LimitStudy limit_convergence_study(const ODEProblem& base, std::span<const double> ts) {
  if (base.regime == Regime::DHYM) raise(ErrorKind::InvalidConfig, "limit study needs a limit-regime base problem");
  if (ts.empty()) raise(ErrorKind::InvalidConfig, "limit study needs values of t");
  const bool large = base.regime == Regime::LargeRadius;
  const auto limit = ode::solve(base);
  LimitStudy out;
  out.limit_K0 = ode::coefficients(base).K0;
  for (double t : ts) {
    if (!(t > 0.0)) raise(ErrorKind::InvalidConfig, "t must be positive");
    const ConstantCurvature2 Ft{base.F0.a / t, base.F0.b / t, base.F0.c / t};
    const double alpha = (large ? 4.0 : 1.0) * base.alpha * t * t;
    const auto scaled = ODEProblem::make(Regime::DHYM, alpha, Ft, base.datum, base.tol);
    const auto sol = ode::solve(scaled);
    double diff = 0.0;
    for (int i = 0; i < sol.phi.size(); ++i) diff = std::max(diff, std::abs(sol.phi[i] - limit.phi[i]));
    out.t.push_back(t);
    out.difference.push_back(diff);
    out.scaled_K0.push_back(ode::coefficients(scaled).K0);
  }
  double worst = 0.0;
  for (double d : out.difference) worst = std::max(worst, d);
  out.noise_floor = worst < 1e-13;
  out.order = out.noise_floor ? std::numeric_limits<double>::quiet_NaN() : loglog_slope(out.t, out.difference);
  return out;
}

}  // namespace dhym::limits
