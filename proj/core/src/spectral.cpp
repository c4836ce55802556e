#include "dhym/spectral.hpp"

#include "dhym/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace dhym::spectral {
namespace {

// The FFTW planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan1D {
  explicit Plan1D(int n) : n(n) {
    std::lock_guard lock(planner_mutex());
    real = static_cast<long double*>(fftwl_malloc(sizeof(long double) * n));
    spec = static_cast<fftwl_complex*>(fftwl_malloc(sizeof(fftwl_complex) * (n / 2 + 1)));
    forward = fftwl_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    backward = fftwl_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~Plan1D() {
    std::lock_guard lock(planner_mutex());
    fftwl_destroy_plan(forward);
    fftwl_destroy_plan(backward);
    fftwl_free(real);
    fftwl_free(spec);
  }
  Plan1D(const Plan1D&) = delete;
  Plan1D& operator=(const Plan1D&) = delete;

  int n;
  long double* real;
  fftwl_complex* spec;
  fftwl_plan forward;
  fftwl_plan backward;
};

struct Plan2D {
  explicit Plan2D(int n) : n(n) {
    std::lock_guard lock(planner_mutex());
    buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * n));
    forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plan2D() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buf);
  }
  Plan2D(const Plan2D&) = delete;
  Plan2D& operator=(const Plan2D&) = delete;

  int n;
  fftw_complex* buf;
  fftw_plan forward;
  fftw_plan backward;
};

Plan1D& plan1d(int n) {
  thread_local std::map<int, std::unique_ptr<Plan1D>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan1D>(n);
  return *slot;
}

Plan2D& plan2d(int n) {
  thread_local std::map<int, std::unique_ptr<Plan2D>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan2D>(n);
  return *slot;
}

void require_size(std::size_t got, int n, const char* what) {
  if (n < 2 || got != static_cast<std::size_t>(n)) {
    raise(ErrorKind::DimensionMismatch, std::string(what) + ": bad sample count");
  }
}

// Multiplier of (2 pi i k)^order for a real transform of length n.
std::complex<long double> symbol1d(int k, int n, int order) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  if (n % 2 == 0 && 2 * k == n && order % 2 == 1) return 0.0L;
  std::complex<long double> ik(0.0L, two_pi * k);
  std::complex<long double> s(1.0L, 0.0L);
  for (int i = 0; i < order; ++i) s *= ik;
  return s;
}

int wavenumber(int m, int n) { return (2 * m <= n) ? m : m - n; }

std::complex<double> symbol_axis(int m, int n, int order) {
  if (order == 0) return 1.0;
  int k = wavenumber(m, n);
  if (n % 2 == 0 && 2 * m == n) {
    if (order % 2 == 1) return 0.0;
    k = n / 2;
  }
  const std::complex<double> ik(0.0, 2.0 * std::numbers::pi * k);
  std::complex<double> s(1.0, 0.0);
  for (int i = 0; i < order; ++i) s *= ik;
  return s;
}

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double mean(std::span<const double> f) {
  long double s = 0.0L;
  for (double v : f) s += v;
  return f.empty() ? 0.0 : static_cast<double>(s / static_cast<long double>(f.size()));
}

double sup_norm(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> centered(std::span<const double> f) {
  const double m = mean(f);
  std::vector<double> out(f.begin(), f.end());
  for (double& v : out) v -= m;
  return out;
}

std::vector<double> derivative(std::span<const double> f, int order) {
  const int n = static_cast<int>(f.size());
  require_size(f.size(), n, "derivative");
  if (order == 0) return {f.begin(), f.end()};
  Plan1D& p = plan1d(n);
  for (int i = 0; i < n; ++i) p.real[i] = f[i];
  fftwl_execute(p.forward);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<long double> c(p.spec[k][0], p.spec[k][1]);
    c *= symbol1d(k, n, order) / static_cast<long double>(n);
    p.spec[k][0] = c.real();
    p.spec[k][1] = c.imag();
  }
  fftwl_execute(p.backward);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(p.real[i]);
  return out;
}

std::vector<double> second_antiderivative(std::span<const double> g) {
  const int n = static_cast<int>(g.size());
  require_size(g.size(), n, "second_antiderivative");
  Plan1D& p = plan1d(n);
  for (int i = 0; i < n; ++i) p.real[i] = g[i];
  fftwl_execute(p.forward);
  p.spec[0][0] = 0.0L;
  p.spec[0][1] = 0.0L;
  for (int k = 1; k <= n / 2; ++k) {
    const long double s = std::real(symbol1d(k, n, 2)) * static_cast<long double>(n);
    p.spec[k][0] /= s;
    p.spec[k][1] /= s;
  }
  fftwl_execute(p.backward);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(p.real[i]);
  return out;
}

Eigen::MatrixXd derivative_matrix(int n, int order) {
  Eigen::MatrixXd d(n, n);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const auto col = derivative(e, order);
    for (int i = 0; i < n; ++i) d(i, j) = col[i];
    e[j] = 0.0;
  }
  return d;
}

double interpolate(std::span<const double> f, double x) {
  const int n = static_cast<int>(f.size());
  require_size(f.size(), n, "interpolate");
  const double pi = std::numbers::pi;
  x -= std::floor(x);
  long double num = 0.0L;
  long double den = 0.0L;
  for (int k = 0; k < n; ++k) {
    const double d = x - static_cast<double>(k) / n;
    const double s = std::sin(pi * d);
    if (std::abs(s) < 1e-15) return f[k];
    const long double w = (n % 2 == 0) ? std::cos(pi * d) / s : 1.0 / s;
    const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
    num += sign * w * f[k];
    den += sign * w;
  }
  return static_cast<double>(num / den);
}

std::vector<double> sample_series(int n, std::span<const Mode> modes, double constant) {
  std::vector<double> out(n, constant);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    for (const Mode& m : modes) {
      out[i] += m.cos_coeff * std::cos(two_pi * m.k * x) + m.sin_coeff * std::sin(two_pi * m.k * x);
    }
  }
  return out;
}

std::vector<double> derivative2d(std::span<const double> f, int n, int p, int q) {
  require_size(f.size(), n * n, "derivative2d");
  Plan2D& plan = plan2d(n);
  for (int i = 0; i < n * n; ++i) {
    plan.buf[i][0] = f[i];
    plan.buf[i][1] = 0.0;
  }
  fftw_execute(plan.forward);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int a = 0; a < n; ++a) {
    const std::complex<double> sa = symbol_axis(a, n, p);
    for (int b = 0; b < n; ++b) {
      const std::complex<double> s = sa * symbol_axis(b, n, q) * scale;
      std::complex<double> c(plan.buf[a * n + b][0], plan.buf[a * n + b][1]);
      c *= s;
      plan.buf[a * n + b][0] = c.real();
      plan.buf[a * n + b][1] = c.imag();
    }
  }
  fftw_execute(plan.backward);
  std::vector<double> out(n * n);
  for (int i = 0; i < n * n; ++i) out[i] = plan.buf[i][0];
  return out;
}

std::vector<double> inverse_laplacian2d(std::span<const double> g, int n) {
  require_size(g.size(), n * n, "inverse_laplacian2d");
  Plan2D& plan = plan2d(n);
  for (int i = 0; i < n * n; ++i) {
    plan.buf[i][0] = g[i];
    plan.buf[i][1] = 0.0;
  }
  fftw_execute(plan.forward);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double s = std::real(symbol_axis(a, n, 2)) + std::real(symbol_axis(b, n, 2));
      const double m = (a == 0 && b == 0) ? 0.0 : scale / s;
      plan.buf[a * n + b][0] *= m;
      plan.buf[a * n + b][1] *= m;
    }
  }
  fftw_execute(plan.backward);
  std::vector<double> out(n * n);
  for (int i = 0; i < n * n; ++i) out[i] = plan.buf[i][0];
  return out;
}

}  // namespace dhym::spectral
