#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "masplit/errors.hpp"
#include "masplit/problems.hpp"

using namespace masplit;
using std::numbers::pi;

TEST(Manufactured, ZeroAmplitude) {
  const ManufacturedProblem p = make_manufactured(0.0, 16);
  EXPECT_EQ(p.u_exact.max_abs(), 0.0);
  for (std::size_t k = 0; k < p.f.size(); ++k) EXPECT_EQ(p.f[k], 1.0);
  EXPECT_EQ(p.report.kappa, 1.0);
  EXPECT_TRUE(p.warnings.empty());
}

TEST(Manufactured, KappaAtSmallAmplitude) {
  const ManufacturedProblem p = make_manufactured(0.002, 64);
  EXPECT_GE(p.report.kappa, 1.17);
  EXPECT_LE(p.report.kappa, 1.18);
  const double c = 4 * pi * pi * 0.002;
  EXPECT_NEAR(p.report.kappa, (1 + c) / (1 - c), 1e-9);
}

TEST(Manufactured, InvariantsAndSpectralHessian) {
  for (int n : {32, 64}) {
    const ManufacturedProblem p = make_manufactured(0.02, n);
    EXPECT_NEAR(p.u_exact.mean(), 0.0, 1e-14);
    EXPECT_GT(p.f.max_abs(), 0.0);
    for (std::size_t k = 0; k < p.f.size(); ++k) EXPECT_GT(p.f[k], 0.0);
    EXPECT_LE(det_field(p.hessian_exact, true).max_abs() - p.f.max_abs(), 1e-15);
    EXPECT_LE((det_field(p.hessian_exact, true) - p.f).max_abs(), 1e-15);
    const SymMatrixField spectral = hessian_of(p.u_exact);
    EXPECT_LE((spectral - p.hessian_exact).max_abs(), 1e-10);
    EXPECT_LE((det_field(spectral, true) - p.f).max_abs(), 1e-10);
    EXPECT_GE(p.f.mean(), 1 - 20 * 0.02 * 0.02 * std::pow(2 * pi, 4) / 4);
  }
}

TEST(Manufactured, WindowEndpointsWhenNodesHitExtrema) {
  for (double eps : {0.002, 0.01, 0.02}) {
    const ManufacturedProblem p = make_manufactured(eps, 32);
    EXPECT_NEAR(p.report.nu1, 1 - 4 * pi * pi * eps, 1e-6);
    EXPECT_NEAR(p.report.nu2, 1 + 4 * pi * pi * eps, 1e-6);
  }
}

TEST(Manufactured, WarnsBeyondThreshold) {
  EXPECT_NEAR(ellipticity_threshold(), 1 / (4 * pi * pi), 1e-16);
  const ManufacturedProblem p = make_manufactured(0.03, 32);
  EXPECT_FALSE(p.report.elliptic);
  EXPECT_FALSE(p.warnings.empty());
  EXPECT_THROW(make_manufactured(0.002, 8), InvalidArgument);
  EXPECT_THROW(make_manufactured(0.002, 18 + 1), InvalidArgument);
}

TEST(ErrorVsExact, Examples) {
  const ManufacturedProblem p = make_manufactured(0.002, 32);
  EXPECT_EQ(error_vs_exact(p.hessian_exact, p), 0.0);
  EXPECT_EQ(error_vs_exact(p.u_exact, p), 0.0);

  SymMatrixField shifted = p.hessian_exact;
  for (std::size_t k = 0; k < shifted.size(); ++k) shifted.p11[k] += 0.25;
  EXPECT_NEAR(error_vs_exact(shifted, p), 0.25, 1e-14);

  const double a = 0.3;
  ScalarField u = p.u_exact + ScalarField::sample(32, [&](double x, double) {
                    return a * std::sin(2 * pi * x);
                  });
  EXPECT_NEAR(error_vs_exact(u, p), a / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(error_vs_exact(u, p, SobolevIndex(1.0)),
              a / std::sqrt(2.0) * std::sqrt(1 + 4 * pi * pi), 1e-12);
  EXPECT_THROW(error_vs_exact(ScalarField(16), p), InvalidArgument);
}
