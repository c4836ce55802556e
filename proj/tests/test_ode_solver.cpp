#include "dhym/errors.hpp"
#include "dhym/ode_solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dhym;
using oracle::kTwoPi;

namespace {

PeriodicProfile constant(int n, double c) { return PeriodicProfile(std::vector<double>(n, c)); }

PeriodicProfile cosine(int n, double eps, double c = 0.0) {
  const spectral::Mode m[] = {{1, eps, 0.0}};
  return PeriodicProfile::from_series(n, m, c);
}

struct Case {
  Regime regime;
  ConstantCurvature2 F0;
};

const Case kCases[] = {
    {Regime::DHYM, {0.5, 1.0, 0.3}},
    {Regime::LargeRadius, {0.5, 1.0, 0.3}},
    {Regime::SmallRadius, {2.0, 1.0, 1.0}},
};

ODEProblem manufactured(const Case& c, int n, double eps) {
  auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(n, 0.0));
  const auto k = ode::coefficients(p);
  p.datum = PeriodicProfile(oracle::manufactured_datum(n, eps, k.K0, k.C0));
  return p;
}

}  // namespace

TEST(Regime, Parse) {
  EXPECT_EQ(parse_regime("dhym"), Regime::DHYM);
  EXPECT_EQ(parse_regime("large_radius"), Regime::LargeRadius);
  EXPECT_EQ(parse_regime("small_radius"), Regime::SmallRadius);
  EXPECT_THROW(parse_regime("medium"), Error);
  EXPECT_EQ(to_string(Regime::SmallRadius), "small_radius");
}

TEST(Coefficients, ClosedForms) {
  const ConstantCurvature2 F{0.5, 1.0, 0.3};
  const double alpha = 0.7;
  const double N = std::hypot(1 - F.det(), F.tr());
  const double cs = (1 - F.det()) / N, sn = -F.tr() / N;
  const double D = cs - F.c * sn;

  auto k = ode::coefficients(ODEProblem::make(Regime::DHYM, alpha, F, constant(16, 0)));
  EXPECT_NEAR(k.K0, alpha * F.b * F.b / D, 1e-14);
  EXPECT_NEAR(k.C0, -alpha * (1 + F.c * F.c) / D, 1e-14);

  k = ode::coefficients(ODEProblem::make(Regime::LargeRadius, alpha, F, constant(16, 0)));
  EXPECT_NEAR(k.K0, 4 * alpha * F.b * F.b, 1e-14);
  EXPECT_NEAR(k.C0, -2 * alpha * (F.a * F.a + F.c * F.c) + 2 * alpha * F.tr() * F.tr(), 1e-14);

  k = ode::coefficients(ODEProblem::make(Regime::SmallRadius, alpha, F, constant(16, 0)));
  const double q = F.b * F.b + F.c * F.c;
  EXPECT_NEAR(k.K0, alpha * F.b * F.b * F.det() / q, 1e-14);
  EXPECT_NEAR(k.C0, -alpha * F.c * F.c * F.det() / q, 1e-14);
}

TEST(Coefficients, Validation) {
  EXPECT_THROW(ode::coefficients(ODEProblem::make(Regime::LargeRadius, -1.0, {}, constant(16, 0))), Error);
  try {
    ode::coefficients(ODEProblem::make(Regime::SmallRadius, 1.0, {1, 1, 1}, constant(16, 0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
}

TEST(CompatibilityConstant, Values) {
  EXPECT_EQ(ode::compatibility_constant(ODEProblem::make(Regime::DHYM, 0.0, {0.5, 1, 0.3}, constant(16, 0))), 0.0);
  EXPECT_NEAR(ode::compatibility_constant(ODEProblem::make(Regime::DHYM, 2.0, {}, constant(16, 0))), -2.0, 1e-15);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 50; ++i) {
    const ConstantCurvature2 F{u(rng), u(rng), u(rng)};
    const auto p = ODEProblem::make(Regime::DHYM, 1.0, F, constant(64, 0));
    const double cA = ode::compatibility_constant(p);
    EXPECT_NEAR(cA, -std::hypot(1 - F.det(), F.tr()), 1e-12 * std::max(1.0, std::abs(cA)));
    auto q = p;
    q.datum = constant(64, cA);
    EXPECT_NEAR(spectral::mean(ode::residual(PeriodicProfile::zero(64), q).samples()), 0.0, 1e-12);
  }
}

TEST(ProjectDatum, Cases) {
  const auto p = ODEProblem::make(Regime::LargeRadius, 1.0, {0.5, 1.0, 0.3}, constant(32, 0));
  const double cA = ode::compatibility_constant(p);
  EXPECT_NEAR(ode::project_datum(constant(32, cA), p).shift, 0.0, 1e-14);
  const auto z = ode::project_datum(constant(32, 0.0), p);
  for (int i = 0; i < 32; ++i) EXPECT_DOUBLE_EQ(z.datum[i], cA);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> r(32);
  for (double& v : r) v = u(rng);
  EXPECT_NEAR(spectral::mean(ode::project_datum(PeriodicProfile(r), p).datum.samples()), cA, 1e-13);
}

TEST(Residual, FlatAndManufactured) {
  for (const auto& c : kCases) {
    auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(128, 0));
    p.datum = constant(128, ode::compatibility_constant(p));
    EXPECT_LT(spectral::sup_norm(ode::residual(PeriodicProfile::zero(128), p).samples()), 1e-12);

    const auto q = manufactured(c, 64, 0.01);
    EXPECT_LT(spectral::sup_norm(ode::residual(cosine(64, 0.01), q).samples()), 2e-9);

    const auto r = manufactured(c, 256, 0.01);
    std::vector<double> sigma(256);
    for (int j = 0; j < 256; ++j) sigma[j] = -0.01 * kTwoPi * kTwoPi * std::cos(kTwoPi * j / 256);
    EXPECT_LT(spectral::sup_norm(ode::curvature_residual(sigma, r.datum.samples(), ode::coefficients(r))), 1e-10);
  }
}

TEST(Residual, MeanMatchesCompatibility) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& c : kCases) {
    auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(64, 0));
    std::vector<spectral::Mode> modes;
    for (int k = 1; k <= 3; ++k) modes.push_back({k, 0.0005 * u(rng), 0.0005 * u(rng)});
    const auto phi = PeriodicProfile::from_series(64, modes);
    std::vector<double> A(64);
    for (double& v : A) v = u(rng);
    p.datum = ode::project_datum(PeriodicProfile(A), p).datum;
    EXPECT_LT(std::abs(spectral::mean(ode::residual(phi, p).samples())), 1e-12);
  }
}

TEST(Linearize, FlatFourierSymbol) {
  const int n = 32;
  for (const auto& c : kCases) {
    const auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(n, 0));
    const double K0 = ode::coefficients(p).K0;
    const auto lin = ode::linearize(PeriodicProfile::zero(n), p);
    for (int k = 1; k < n / 2; ++k) {
      Eigen::VectorXd mode(n);
      for (int j = 0; j < n; ++j) mode[j] = std::cos(kTwoPi * k * j / n);
      const Eigen::VectorXd image = lin.jacobian * mode;
      const double q = kTwoPi * k;
      const double symbol = 0.25 * q * q * q * q + K0 * q * q;
      EXPECT_LT((image - symbol * mode).lpNorm<Eigen::Infinity>(), 1e-9 * symbol);
    }
    const double top = 0.25 * std::pow(kTwoPi * n / 2, 4);
    EXPECT_LT((lin.jacobian * Eigen::VectorXd::Ones(n)).lpNorm<Eigen::Infinity>(), 1e-14 * top);
  }
}

TEST(Linearize, MatchesFiniteDifferences) {
  const int n = 64;
  const Case c = kCases[0];
  auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(n, 0));
  const spectral::Mode base[] = {{1, 0.01, 0.0}, {2, 0.0, 0.003}};
  const auto phi = PeriodicProfile::from_series(n, base);
  const spectral::Mode dir[] = {{3, 1.0, 0.0}, {1, 0.0, 0.5}};
  const auto d = PeriodicProfile::from_series(n, dir);
  const auto lin = ode::linearize(phi, p);
  const double h = 1e-6;
  std::vector<double> plus(n), minus(n);
  for (int i = 0; i < n; ++i) {
    plus[i] = phi[i] + h * d[i];
    minus[i] = phi[i] - h * d[i];
  }
  const auto rp = ode::residual(PeriodicProfile(plus), p);
  const auto rm = ode::residual(PeriodicProfile(minus), p);
  const Eigen::VectorXd jd = lin.jacobian * Eigen::Map<const Eigen::VectorXd>(d.values().data(), n);
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    err = std::max(err, std::abs((rp[i] - rm[i]) / (2 * h) - jd[i]));
    scale = std::max(scale, std::abs(jd[i]));
  }
  EXPECT_LT(err, 1e-5 * scale);
}

TEST(Linearize, BetaOperatorIsSymmetric) {
  const int n = 128;
  auto p = ODEProblem::make(Regime::DHYM, 1.0, {0.5, 1.0, 0.3}, constant(n, 0));
  const auto lin = ode::linearize(cosine(n, 0.01), p);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::VectorXd xi(n), gamma(n);
  for (int i = 0; i < n; ++i) {
    xi[i] = g(rng);
    gamma[i] = g(rng);
  }
  const double scale = lin.beta.norm() * xi.norm() * gamma.norm();
  EXPECT_LT(std::abs(xi.dot(lin.beta * gamma) - gamma.dot(lin.beta * xi)), 1e-9 * scale);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  EXPECT_LT((0.25 * spectral::derivative_matrix(n, 2) * ones).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Solve, FlatDatumReturnsImmediately) {
  for (const auto& c : kCases) {
    auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(256, 0));
    p.datum = constant(256, ode::compatibility_constant(p));
    const auto b = ode::solve(p);
    ASSERT_EQ(b.trace.size(), 1u);
    EXPECT_EQ(b.trace[0].t, 0.0);
    EXPECT_LE(spectral::sup_norm(b.phi.samples()), 1e-10);
  }
}

TEST(Solve, RecoversManufacturedSolution) {
  const int n = 256;
  for (const auto& c : kCases) {
    const auto p = manufactured(c, n, 0.01);
    const auto b = ode::solve(p);
    double err = 0.0;
    for (int j = 0; j < n; ++j) err = std::max(err, std::abs(b.phi[j] - 0.01 * std::cos(kTwoPi * j / n)));
    EXPECT_LE(err, 1e-8) << to_string(c.regime);
    EXPECT_LE(b.residual_norm, 1e-10);
  }
}

TEST(Solve, RegressionBaseline) {
  const int n = 256;
  auto p = ODEProblem::make(Regime::DHYM, 1.0, {0.0, 1.0, 0.0}, cosine(n, 0.1));
  const auto b = ode::solve(p);
  EXPECT_LE(b.residual_norm, 1e-10);
  EXPECT_NEAR(b.phi[0], 0.00023277233600692989, 1e-10);
  EXPECT_NEAR(spectral::sup_norm(b.phi.samples()), 0.00023329506172982699, 1e-10);
}

TEST(Solve, SmallRadiusObstruction) {
  auto p = ODEProblem::make(Regime::SmallRadius, 1.0, {0.5, 1.0, 0.3}, cosine(64, 0.1));
  try {
    ode::solve(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SmallRadiusObstruction);
  }
}

TEST(Solve, DualityOfSolvedBundle) {
  const auto b = ode::solve(manufactured(kCases[0], 256, 0.01));
  const auto xs = b.y_to_x.node_values();
  for (int j = 0; j < 256; ++j) {
    EXPECT_NEAR((1.0 + b.psi_dd[j]) * (1.0 + spectral::interpolate(b.phi_dd, xs[j])), 1.0, 1e-12);
  }
  const auto psi_dd = b.psi.derivative(2);
  EXPECT_LT(oracle::max_diff(psi_dd, b.psi_dd), 1e-8);
}

TEST(BundlePotential, FlatAndLargeRadiusRatio) {
  const int n = 128;
  auto p = ODEProblem::make(Regime::DHYM, 1.0, {0.5, 1.0, 0.3}, constant(n, 0));
  const auto flat = ode::bundle_potential(std::vector<double>(n, 0.0), p);
  EXPECT_EQ(spectral::sup_norm(flat.phiF.samples()), 0.0);

  const Case large{Regime::LargeRadius, {0.7, 1.0, 0.3}};
  const auto q = manufactured(large, n, 0.01);
  const auto b = ode::solve(q);
  int checked = 0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(b.psi_dd[j]) > 1e-8) {
      EXPECT_NEAR(b.phiF_dd[j] / b.psi_dd[j], 0.7, 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, n / 2);
}

TEST(BundlePotential, DhymLiftIsFlat) {
  const auto b = ode::solve(ODEProblem::make(Regime::DHYM, 1.0, {0.0, 1.0, 0.0}, cosine(256, 0.1)));
  const auto p = ODEProblem::make(Regime::DHYM, 1.0, {0.0, 1.0, 0.0}, cosine(256, 0.1));
  const auto r = ode::lifted_residuals(b, p);
  EXPECT_LE(r.first, 1e-8);
  EXPECT_LE(r.ma_defect, 1e-8);
  EXPECT_LE(r.second, 1e-8);
}

TEST(MaxPrinciple, FlatManufacturedAndViolation) {
  for (const auto& c : kCases) {
    auto p = ODEProblem::make(c.regime, 1.0, c.F0, constant(64, 0));
    const double cA = ode::compatibility_constant(p);
    p.datum = constant(64, cA);
    const auto flat = ode::max_principle_verify(ode::solve(p), p);
    EXPECT_TRUE(flat.holds);
    EXPECT_NEAR(flat.margin, std::abs(cA) + cA, 1e-12);

    const auto q = manufactured(c, 256, 0.01);
    EXPECT_TRUE(ode::max_principle_verify(ode::solve(q), q).holds);
  }
  auto p = ODEProblem::make(Regime::LargeRadius, 1.0, {0.5, 1.0, 0.3}, constant(64, 0));
  std::vector<double> sigma(64, 0.0), A(64, 0.0);
  sigma[10] = 50.0;
  EXPECT_FALSE(ode::max_principle_verify(sigma, A, p).holds);
}

TEST(Lift, FlatBundle) {
  auto p = ODEProblem::make(Regime::LargeRadius, 1.0, {0.5, 1.0, 0.3}, constant(32, 0));
  p.datum = constant(32, ode::compatibility_constant(p));
  const auto fields = ode::lift_to_2d(ode::solve(p), p);
  for (std::size_t k = 0; k < fields.v.count(); ++k) {
    EXPECT_EQ(fields.v[k], Eigen::Matrix2d::Identity());
    EXPECT_EQ(fields.F[k], p.F0.matrix().matrix());
  }
}

TEST(Lift, LargeRadiusResidual) {
  const auto q = manufactured(kCases[1], 256, 0.01);
  const auto r = ode::lifted_residuals(ode::solve(q), q);
  EXPECT_LE(r.first, 1e-7);
  EXPECT_LE(r.second, 1e-7);
}
