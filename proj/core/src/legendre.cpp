#include "dhym/legendre.hpp"

#include "dhym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dhym {

PeriodicProfile::PeriodicProfile(std::vector<double> samples, bool mean_zero)
    : samples_(std::move(samples)), mean_zero_(mean_zero) {
  const int n = size();
  if (n < 16 || !spectral::is_power_of_two(n)) {
    raise(ErrorKind::DimensionMismatch, "profile grid must be a power of two >= 16");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) raise(ErrorKind::InvalidConfig, "profile has non-finite samples");
  }
  if (mean_zero_) {
    const double scale = std::max(1.0, spectral::sup_norm(samples_));
    if (std::abs(spectral::mean(samples_)) > 1e-13 * scale) {
      raise(ErrorKind::InvariantViolation, "profile flagged mean-zero has nonzero mean");
    }
  }
}

PeriodicProfile PeriodicProfile::centered(std::span<const double> samples) {
  return PeriodicProfile(spectral::centered(samples), true);
}

PeriodicProfile PeriodicProfile::from_series(int n, std::span<const spectral::Mode> modes, double constant) {
  auto s = spectral::sample_series(n, modes, constant);
  if (constant == 0.0) return centered(s);
  return PeriodicProfile(std::move(s));
}

MonotoneMap::MonotoneMap(std::vector<double> displacement) : displacement_(std::move(displacement)) {
  const int n = size();
  if (n < 2) raise(ErrorKind::DimensionMismatch, "map needs at least two nodes");
  for (int k = 0; k < n; ++k) {
    const double here = static_cast<double>(k) / n + displacement_[k];
    const double next = (k + 1 < n) ? static_cast<double>(k + 1) / n + displacement_[k + 1]
                                    : 1.0 + displacement_[0];
    if (!(next > here)) raise(ErrorKind::NotMonotone, "map is not strictly increasing");
  }
  displacement_slope_ = spectral::derivative(displacement_, 1);
}

double MonotoneMap::operator()(double s) const { return s + spectral::interpolate(displacement_, s); }

double MonotoneMap::slope(double s) const { return 1.0 + spectral::interpolate(displacement_slope_, s); }

double MonotoneMap::inverse(double z) const {
  const int n = size();
  const double base = displacement_[0];
  const double shift = std::floor(z - base);
  const double target = z - shift;  // in [map(0), map(0) + 1)

  // Bracket between consecutive nodes; node n is node 0 shifted by a period.
  auto node_value = [&](int k) {
    return k < n ? static_cast<double>(k) / n + displacement_[k] : 1.0 + displacement_[0];
  };
  int lo_k = 0;
  int hi_k = n;
  while (hi_k - lo_k > 1) {
    const int mid = (lo_k + hi_k) / 2;
    (node_value(mid) <= target ? lo_k : hi_k) = mid;
  }
  double lo = static_cast<double>(lo_k) / n;
  double hi = static_cast<double>(hi_k) / n;
  double s = lo + (hi - lo) * (target - node_value(lo_k)) / (node_value(hi_k) - node_value(lo_k));

  for (int it = 0; it < 100; ++it) {
    const double g = (*this)(s) - target;
    if (g == 0.0) break;
    (g > 0.0 ? hi : lo) = s;
    double next = s - g / slope(s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * std::max(1.0, std::abs(s))) {
      s = next;
      break;
    }
    s = next;
  }
  return s + shift;
}

std::vector<double> MonotoneMap::node_values() const {
  const int n = size();
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = static_cast<double>(k) / n + displacement_[k];
  return out;
}

}  // namespace dhym

namespace dhym::legendre {

Transform legendre_forward(const PeriodicProfile& psi) {
  const int n = psi.size();
  const auto d1 = psi.derivative(1);
  const auto d2 = psi.derivative(2);
  for (int k = 0; k < n; ++k) {
    if (!(1.0 + d2[k] > 0.0)) raise(ErrorKind::NotConvex, "1 + psi'' <= 0: potential left the convex cone");
  }
  // y -> x(y) = y + psi'(y)
  const MonotoneMap gradient(d1);

  std::vector<double> raw(n);
  std::vector<double> y_of_x(n);
  for (int k = 0; k < n; ++k) {
    const double x = psi.node(k);
    const double y = gradient.inverse(x);
    const double slope = spectral::interpolate(d1, y);
    // x y - y^2/2 - psi(y) - x^2/2 with x - y = psi'(y)
    raw[k] = -psi.at(y) - 0.5 * slope * slope;
    y_of_x[k] = y - x;
  }
  Transform out;
  out.offset = spectral::mean(raw);
  out.phi = PeriodicProfile::centered(raw);
  out.map = MonotoneMap(std::move(y_of_x));
  return out;
}

PeriodicProfile datum_pushforward(const PeriodicProfile& A, const MonotoneMap& map) {
  const int n = A.size();
  if (map.size() != n) raise(ErrorKind::DimensionMismatch, "datum and map grids differ");
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) f[j] = A.at(map.inverse(static_cast<double>(j) / n));
  return PeriodicProfile(std::move(f));
}

PeriodicProfile datum_pullback(const PeriodicProfile& f, const MonotoneMap& map) {
  const int n = f.size();
  if (map.size() != n) raise(ErrorKind::DimensionMismatch, "datum and map grids differ");
  std::vector<double> A(n);
  for (int k = 0; k < n; ++k) A[k] = f.at(map(static_cast<double>(k) / n));
  return PeriodicProfile(std::move(A));
}

std::vector<double> scalar_curvature_complex(const PeriodicProfile& psi) {
  const auto d2 = psi.derivative(2);
  std::vector<double> log_w(d2.size());
  for (std::size_t k = 0; k < d2.size(); ++k) {
    if (!(1.0 + d2[k] > 0.0)) raise(ErrorKind::NotConvex, "1 + psi'' <= 0");
    log_w[k] = std::log1p(d2[k]);
  }
  auto out = spectral::derivative(log_w, 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= -0.25 / (1.0 + d2[k]);
  return out;
}

std::vector<double> scalar_curvature_symplectic(const PeriodicProfile& phi) {
  const auto d2 = phi.derivative(2);
  std::vector<double> g(d2.size());
  for (std::size_t k = 0; k < d2.size(); ++k) {
    if (!(1.0 + d2[k] > 0.0)) raise(ErrorKind::NotConvex, "1 + phi'' <= 0");
    g[k] = -d2[k] / (1.0 + d2[k]);  // 1/(1 + phi'') - 1
  }
  auto out = spectral::derivative(g, 2);
  for (double& v : out) v *= -0.25;
  return out;
}

}  // namespace dhym::legendre
