#pragma once

// Kaehler-Yang-Mills residuals on the flat 2-torus.
//
// Fields live on the uniform N x N grid of [0,1)^2, stored row-major with the
// first index along x1: sample (i, j) sits at (i/N, j/N).

#include "dhym/core_geometry.hpp"
#include "dhym/legendre.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace dhym {

class TorusField2D {
 public:
  TorusField2D() = default;
  TorusField2D(int n, std::vector<double> samples);

  static TorusField2D zero(int n) { return TorusField2D(n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)); }
  template <class Fn>
  static TorusField2D from_function(int n, Fn&& f) {
    std::vector<double> s(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(i) * n + j] = f(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
    return TorusField2D(n, std::move(s));
  }
  /// f(x1) repeated along x2.
  static TorusField2D from_profile(std::span<const double> f);

  int size() const { return n_; }
  std::size_t count() const { return samples_.size(); }
  double operator()(int i, int j) const { return samples_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator[](std::size_t k) const { return samples_[k]; }
  std::span<const double> samples() const { return samples_; }

  /// d^p/dx1^p d^q/dx2^q
  TorusField2D derivative(int p, int q) const;
  double mean() const { return spectral::mean(samples_); }
  double sup_norm() const { return spectral::sup_norm(samples_); }

 private:
  int n_ = 0;
  std::vector<double> samples_;
};

/// Symmetric 2x2 matrix per grid sample.
struct MatrixField2D {
  int n = 0;
  std::vector<Eigen::Matrix2d> m;

  std::size_t count() const { return m.size(); }
  const Eigen::Matrix2d& operator[](std::size_t k) const { return m[k]; }

  /// Hessian of a scalar field, optionally plus the identity.
  static MatrixField2D hessian(const TorusField2D& f, bool plus_identity);
  static MatrixField2D constant(int n, const Eigen::Matrix2d& value);
  std::vector<SymMatrix> to_sym() const;
};

struct KymData {
  double mu = 0.0;
  double alpha = 0.0;
  SymMatrix B;

  /// Takes B = F0 and mu = tr B.
  static KymData from_curvature(const SymMatrix& F0, double alpha);
};

}  // namespace dhym

namespace dhym::kym {

/// [u^{ij}]_{ij} for u = |x|^2/2 + phi.
TorusField2D abreu_operator(const TorusField2D& phi);

/// U^{ij} w_{ij} with U the cofactor matrix of Hess u and w = 1/det Hess u.
TorusField2D abreu_operator_divergence(const TorusField2D& phi);

/// v^{ij} [log det v]_{ij}
TorusField2D log_det_laplacian(const MatrixField2D& v);

struct ComplexResidual {
  TorusField2D hym;     ///< v^{ij} F_ij - mu
  TorusField2D scalar;  ///< v^{ij}[log det v]_ij + 4f - 8 alpha mu^2 + 8 alpha |F|^2
};

ComplexResidual residual_complex(const MatrixField2D& v, const MatrixField2D& F, const KymData& data,
                                 const TorusField2D& f);

struct SymplecticResidual {
  std::vector<double> hym;
  std::vector<double> scalar;
};

/// Symplectic-coordinate residuals for fields depending on x1 only:
/// u = diag(1 + phi'', 1), and F(grad u) = [[a + phiF''(y(x)), b], [b, c]]
/// obtained by composing the y-grid profile `phiF_dd` with `x_to_y`.
SymplecticResidual residual_symplectic_reduced(const PeriodicProfile& phi, std::span<const double> phiF_dd,
                                               const MonotoneMap& x_to_y, const KymData& data,
                                               const PeriodicProfile& A);

struct AprioriReport {
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  double max_sum_squares = 0.0;
  double sum_squares_bound = 0.0;  ///< n mu^2
  double max_imaginary = 0.0;      ///< always 0: the eigenproblem is symmetric
  bool curvature_semipositive = true;
  bool eigenvalues_in_range = true;
  bool pass = false;
};

/// Pencil eigenvalues of (F, v) at every sample against [0, mu] and the
/// bound sum lambda^2 < n mu^2.
AprioriReport apriori_verify(const MatrixField2D& v, const MatrixField2D& F, double mu, double tolerance = 1e-10);

struct DetBoundReport {
  double min_det = 0.0;
  double max_det = 0.0;
  bool pass = false;
};

DetBoundReport det_bound_verify(const MatrixField2D& v, double lower, double upper);

}  // namespace dhym::kym
