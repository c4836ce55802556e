#include "dhym/core_geometry.hpp"
#include "dhym/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dhym;
using namespace dhym::geometry;

namespace {

SymMatrix diag2(double a, double b) {
  const double d[] = {a, b};
  return SymMatrix::diagonal(d);
}

std::vector<SymMatrix> repeat(const SymMatrix& m, int count) { return std::vector<SymMatrix>(count, m); }

}  // namespace

TEST(SymMatrix, RejectsAsymmetric) {
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  EXPECT_THROW(SymMatrix{m}, Error);
}

TEST(PencilEigenvalues, ZeroCurvature) {
  const auto l = pencil_eigenvalues(SymMatrix::identity(2), SymMatrix::zero(2));
  EXPECT_DOUBLE_EQ(l[0], 0.0);
  EXPECT_DOUBLE_EQ(l[1], 0.0);
}

TEST(PencilEigenvalues, Diagonal) {
  const auto l = pencil_eigenvalues(SymMatrix::identity(2), diag2(1, 2));
  EXPECT_NEAR(l[0], 1.0, 1e-14);
  EXPECT_NEAR(l[1], 2.0, 1e-14);
}

TEST(PencilEigenvalues, MatchesBisectionRoots) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const Eigen::MatrixXd v = oracle::random_spd(n, rng);
    const Eigen::MatrixXd F = oracle::random_sym(n, rng, 2.0);
    const auto got = pencil_eigenvalues(SymMatrix(v), SymMatrix(F));
    const auto want = oracle::pencil_roots(v, F);
    ASSERT_EQ(want.size(), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-10 * std::max(1.0, std::abs(want[i])));
  }
}

TEST(PencilEigenvalues, RejectsIndefiniteMetric) {
  try {
    pencil_eigenvalues(diag2(1, -1), SymMatrix::zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPositiveMetric);
  }
}

TEST(PhaseRadius, ClosedForms) {
  const double zero[] = {0.0, 0.0};
  const auto a = phase_radius(zero);
  EXPECT_DOUBLE_EQ(a.radius, 1.0);
  EXPECT_DOUBLE_EQ(a.theta, 0.0);
  const double ones[] = {1.0, 1.0};
  const auto b = phase_radius(ones);
  EXPECT_NEAR(b.radius, 2.0, 1e-14);
  EXPECT_NEAR(b.theta, std::numbers::pi / 2, 1e-14);
}

TEST(PhaseRadius, AgreesWithComplexDeterminant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix2d v = oracle::random_spd(2, rng);
    const Eigen::Matrix2d F = oracle::random_sym(2, rng, 2.0);
    const auto sd = phase_radius(pencil_eigenvalues(SymMatrix(v), SymMatrix(F)));
    const std::complex<double> want = oracle::det2(v, F);
    const std::complex<double> got = v.determinant() * sd.radius * std::polar(1.0, -sd.theta);
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-10 * std::max(1.0, std::abs(want)));
    EXPECT_NEAR(std::abs(complex_det(SymMatrix(v), SymMatrix(F)) - want), 0.0, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(TorusPhase, ClosedForms) {
  auto p = torus_constant_phase({0, 0, 0});
  EXPECT_DOUBLE_EQ(p.phase.cos, 1.0);
  EXPECT_DOUBLE_EQ(p.phase.sin, 0.0);
  p = torus_constant_phase({1, 0, 1});
  EXPECT_NEAR(p.phase.cos, 0.0, 1e-15);
  EXPECT_NEAR(p.phase.sin, -1.0, 1e-15);
  p = torus_constant_phase({0, 1, 0});
  EXPECT_DOUBLE_EQ(p.phase.cos, 1.0);
  EXPECT_DOUBLE_EQ(p.phase.sin, 0.0);
  EXPECT_DOUBLE_EQ(p.magnitude, 2.0);
}

TEST(TorusPhase, UnitModulus) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const ConstantCurvature2 F{u(rng), u(rng), u(rng)};
    const auto tp = torus_constant_phase(F);
    EXPECT_NEAR(tp.phase.cos * tp.phase.cos + tp.phase.sin * tp.phase.sin, 1.0, 1e-15);
    EXPECT_NEAR(tp.magnitude, std::hypot(1.0 - F.det(), F.tr()), 1e-13);
  }
}

TEST(PositivityConstant, Values) {
  const auto F = ConstantCurvature2{2.0, 0.0, -1.0};
  EXPECT_DOUBLE_EQ(phase_positivity_constant(F, torus_constant_phase(F).phase), 0.0);
  const auto G = ConstantCurvature2{0.0, 1.0, 0.0};
  EXPECT_NEAR(phase_positivity_constant(G, torus_constant_phase(G).phase), 1.0, 1e-14);
}

TEST(PositivityConstant, TwoExpressionsAgree) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const ConstantCurvature2 F{u(rng), u(rng), u(rng)};
    const auto tp = torus_constant_phase(F);
    const double lhs = F.b * F.b / (tp.phase.cos - F.c * tp.phase.sin);
    const double rhs = F.b * F.b * tp.magnitude / (1 + F.b * F.b + F.c * F.c);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
    EXPECT_NEAR(phase_positivity_constant(F, tp.phase), rhs, 1e-12 * std::max(1.0, rhs));
  }
}

TEST(PositivityConstant, WrongPhaseIsAnInvariantViolation) {
  const ConstantCurvature2 F{0.5, 1.0, 0.3};
  try {
    phase_positivity_constant(F, Phase::from_angle(0.3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvariantViolation);
  }
}

TEST(SurfaceResidual, FlatSolutionVanishes) {
  const ConstantCurvature2 F0{0.5, 1.0, 0.3};
  const auto phase = torus_constant_phase(F0).phase;
  const auto v = repeat(SymMatrix::identity(2), 8);
  const auto F = repeat(F0.matrix(), 8);
  const auto r = dhym_residual_surface(v, F, phase);
  for (double x : r.im_part) EXPECT_NEAR(x, 0.0, 1e-15);
  EXPECT_NEAR(surface_ma_check(v, F, phase), 0.0, 1e-14);
}

TEST(SurfaceResidual, WrongPhaseDetected) {
  const auto v = repeat(SymMatrix::identity(2), 4);
  const auto F = repeat(SymMatrix::zero(2), 4);
  const auto r = dhym_residual_surface(v, F, Phase{0.0, 1.0});
  for (double x : r.im_part) EXPECT_DOUBLE_EQ(x, -1.0);
}

TEST(SurfaceResidual, MongeAmpereDefectIsScaledImaginaryPart) {
  std::mt19937_64 rng(3);
  const auto phase = Phase::from_angle(-0.7);
  for (int i = 0; i < 20; ++i) {
    const SymMatrix v(oracle::random_spd(2, rng));
    const SymMatrix F(oracle::random_sym(2, rng));
    const std::vector<SymMatrix> vs{v}, Fs{F};
    const double im = dhym_residual_surface(vs, Fs, phase).im_part[0];
    const std::complex<double> z = std::conj(std::polar(1.0, -0.7)) * oracle::det2(v.matrix(), F.matrix());
    EXPECT_NEAR(im, z.imag(), 1e-13);
    EXPECT_NEAR(surface_ma_check(vs, Fs, phase), std::abs(phase.sin * im), 1e-13);
  }
}

TEST(SurfaceApriori, Bounds) {
  const auto phase = Phase::from_angle(-0.5);
  const auto v = repeat(SymMatrix::identity(2), 4);
  auto r = surface_apriori_check(v, repeat(SymMatrix::zero(2), 4), phase);
  EXPECT_TRUE(r.pass);
  const double s = std::sqrt(2.0);
  r = surface_apriori_check(v, repeat(diag2(s, s), 4), phase);
  EXPECT_NEAR(r.max_det_ratio, 2.0, 1e-14);
  EXPECT_FALSE(r.pass);
  EXPECT_THROW(surface_apriori_check(v, repeat(SymMatrix::zero(2), 4), Phase::from_angle(0.5)), Error);
}

TEST(AverageRadius, ProductOfModuli) {
  EXPECT_DOUBLE_EQ(average_radius(SymMatrix::zero(2)), 1.0);
  EXPECT_NEAR(average_radius(diag2(1, 1)), 2.0, 1e-14);
  const double d[] = {1, 2, 3};
  EXPECT_NEAR(average_radius(SymMatrix::diagonal(d)), 10.0, 1e-13);
}
