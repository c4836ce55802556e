#pragma once

// Fourier (pseudo-spectral) calculus on uniform periodic grids of the unit
// circle [0,1) and the unit torus [0,1)^2.
//
// 1D transforms run in long double: the fourth-order operators of the ODE
// solver amplify transform round-off by (2*pi*N/2)^4, and the extended
// mantissa keeps the residual floor well below 1e-10 at N = 256.
//
// Conventions: grid points x_k = k / N. A 2D field is stored row-major with
// index i * N + j, where i runs along x1 and j along x2. For even N the
// Nyquist mode is treated as the real cosine cos(pi N x): odd-order
// derivatives annihilate it, even-order ones scale it by (-(pi N)^2)^(m/2).

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace dhym::spectral {

double mean(std::span<const double> f);
double sup_norm(std::span<const double> f);

/// Returns f - mean(f).
std::vector<double> centered(std::span<const double> f);

/// d^order f / dx^order of a periodic sample vector.
std::vector<double> derivative(std::span<const double> f, int order);

/// The mean-zero periodic solution of h'' = g. The mean of g is ignored.
std::vector<double> second_antiderivative(std::span<const double> g);

/// Dense matrix of the order-`order` spectral derivative on n points.
Eigen::MatrixXd derivative_matrix(int n, int order);

/// Barycentric trigonometric interpolation of periodic samples at x.
double interpolate(std::span<const double> f, double x);

/// Evaluates the Fourier series sum_k c_k cos(2 pi k x) + s_k sin(2 pi k x)
/// at the n grid points. `modes` holds (k, c_k, s_k) triples.
struct Mode {
  int k = 0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};
std::vector<double> sample_series(int n, std::span<const Mode> modes, double constant = 0.0);

/// Mixed partial derivative d^{p+q} / dx1^p dx2^q of an n-by-n torus field.
std::vector<double> derivative2d(std::span<const double> f, int n, int p, int q);

/// Mean-zero solution of the flat Poisson problem (d11 + d22) h = g.
std::vector<double> inverse_laplacian2d(std::span<const double> g, int n);

bool is_power_of_two(int n);

}  // namespace dhym::spectral
