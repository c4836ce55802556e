#pragma once

// Periodic Legendre duality in one variable.
//
// A convex potential v(y) = y^2/2 + psi(y) with periodic psi has gradient map
// x = y + psi'(y), a degree-one circle diffeomorphism, and Legendre transform
// u(x) = x^2/2 + phi(x) with u(x) + v(y) = x y. At corresponding points
// (1 + phi''(x)) (1 + psi''(y)) = 1.
//
// Both potentials are stored mean-zero; the additive constant dropped from phi
// is returned alongside so the defining identity can be checked exactly.

#include "dhym/spectral.hpp"

#include <span>
#include <vector>

namespace dhym {

/// Samples of a smooth periodic function on the grid k/N of [0, 1).
class PeriodicProfile {
 public:
  PeriodicProfile() = default;
  /// N must be a power of two and at least 16. With `mean_zero` the mean of
  /// the samples must vanish to round-off.
  explicit PeriodicProfile(std::vector<double> samples, bool mean_zero = false);

  static PeriodicProfile zero(int n) { return PeriodicProfile(std::vector<double>(n, 0.0), true); }
  /// Subtracts the mean and flags the result as mean-zero.
  static PeriodicProfile centered(std::span<const double> samples);
  static PeriodicProfile from_series(int n, std::span<const spectral::Mode> modes, double constant = 0.0);

  int size() const { return static_cast<int>(samples_.size()); }
  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& values() const { return samples_; }
  double operator[](int k) const { return samples_[k]; }
  bool mean_zero() const { return mean_zero_; }
  double node(int k) const { return static_cast<double>(k) / size(); }

  std::vector<double> derivative(int order) const { return spectral::derivative(samples_, order); }
  /// Trigonometric interpolant at an arbitrary point.
  double at(double x) const { return spectral::interpolate(samples_, x); }

 private:
  std::vector<double> samples_;
  bool mean_zero_ = false;
};

/// Circle map s -> s + d(s) with periodic displacement d sampled on k/N.
/// Strictly increasing at the nodes, and map(s + 1) = map(s) + 1.
class MonotoneMap {
 public:
  MonotoneMap() = default;
  explicit MonotoneMap(std::vector<double> displacement);

  static MonotoneMap identity(int n) { return MonotoneMap(std::vector<double>(n, 0.0)); }

  int size() const { return static_cast<int>(displacement_.size()); }
  double operator()(double s) const;
  double slope(double s) const;
  /// Solves map(s) = z by bracketed Newton iteration.
  double inverse(double z) const;
  /// map(k/N) for all nodes.
  std::vector<double> node_values() const;
  const std::vector<double>& displacement() const { return displacement_; }

 private:
  std::vector<double> displacement_;
  std::vector<double> displacement_slope_;
};

}  // namespace dhym

namespace dhym::legendre {

struct Transform {
  PeriodicProfile phi;  ///< mean-zero dual potential on the x-grid
  MonotoneMap map;      ///< x -> y(x) = x + phi'(x)
  double offset = 0.0;  ///< u(x) = x^2/2 + phi(x) + offset
};

/// Legendre transform of y^2/2 + psi(y). Throws NotConvex unless
/// 1 + psi'' > 0 at every sample.
Transform legendre_forward(const PeriodicProfile& psi);

/// f(y) = A(x(y)) on the uniform y-grid, where `map` sends x to y.
PeriodicProfile datum_pushforward(const PeriodicProfile& A, const MonotoneMap& map);

/// A(x) = f(y(x)) on the uniform x-grid: the inverse of datum_pushforward.
PeriodicProfile datum_pullback(const PeriodicProfile& f, const MonotoneMap& map);

/// -1/4 (log(1 + psi''))'' / (1 + psi''), the scalar curvature in complex
/// coordinates of a one-variable potential.
std::vector<double> scalar_curvature_complex(const PeriodicProfile& psi);

/// -1/4 (1 / (1 + phi''))'', the same curvature in symplectic coordinates.
std::vector<double> scalar_curvature_symplectic(const PeriodicProfile& phi);

}  // namespace dhym::legendre
