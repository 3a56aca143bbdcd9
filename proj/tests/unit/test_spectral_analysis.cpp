#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "masplit/det_projection.hpp"
#include "masplit/errors.hpp"
#include "masplit/problems.hpp"
#include "masplit/rng.hpp"
#include "masplit/spectral.hpp"
#include "masplit/spectral_analysis.hpp"

using namespace masplit;

namespace {

const SobolevIndex kL2(0.0);

// Dense matrix of X -> Pi_ker Pi_V X in L^2-orthonormal coordinates
// (p11, sqrt2 p12, p22) / n, so its spectral norm is the operator norm.
Eigen::MatrixXd dense_linearized_T(const SymMatrixField& p) {
  const int n = p.n(), N = n * n;
  const double r2 = std::sqrt(2.0);
  Eigen::MatrixXd a(3 * N, 3 * N);
  for (int col = 0; col < 3 * N; ++col) {
    SymMatrixField e(n);
    const int c = col / N, k = col % N;
    if (c == 0) e.p11[k] = 1.0;
    if (c == 1) e.p12[k] = 1.0 / r2;
    if (c == 2) e.p22[k] = 1.0;
    const SymMatrixField y = apply_linearized_T(p, e);
    for (int j = 0; j < N; ++j) {
      a(j, col) = y.p11[j];
      a(N + j, col) = r2 * y.p12[j];
      a(2 * N + j, col) = y.p22[j];
    }
  }
  return a;
}

}  // namespace

TEST(RateBound, Values) {
  EXPECT_NEAR(rate_bound(1.0), 1 / std::sqrt(2.0), 1e-16);
  EXPECT_NEAR(rate_bound(1e3), 0.9999995, 1e-7);
  EXPECT_LT(rate_bound(10.0), rate_bound(11.0));
  EXPECT_THROW(rate_bound(0.99), InvalidArgument);
  const EllipticityReport r = make_manufactured(0.02, 64).report;
  EXPECT_NEAR(r.nu1, 0.21044, 1e-5);
  EXPECT_NEAR(r.nu2, 1.78956, 1e-5);
  EXPECT_NEAR(r.kappa, 8.5039, 5e-4);
  EXPECT_NEAR(rate_bound(r.kappa), 0.99313, 5e-5);
}

TEST(LinearizedT, ExamplesAndOrthogonality) {
  const int n = 16;
  // Constant fields are annihilated by Pi_V.
  const SymMatrixField c = SymMatrixField::constant(n, Sym2{1.0, 2.0, 3.0});
  EXPECT_LE(apply_linearized_T(SymMatrixField(n), c).max_abs(), 1e-14);

  // P = 0: output is the trace-free part of the Hessian mode, nodewise.
  const ScalarField u = ScalarField::sample(n, [](double x, double y) {
    return std::cos(2 * std::numbers::pi * (2 * x + y));
  });
  const SymMatrixField h = hessian_of(u);
  const SymMatrixField out = apply_linearized_T(SymMatrixField(n), h);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const Sym2 hk = h.at(k);
    const Sym2 expected = hk - (0.5 * hk.trace()) * Sym2::identity();
    EXPECT_LE(norm(out.at(k) - expected), 1e-10);
  }

  Rng rng(1);
  const SymMatrixField p = make_manufactured(0.01, n).hessian_exact;
  const SymMatrixField o = apply_linearized_T(p, random_matrix_field(n, rng));
  for (std::size_t k = 0; k < o.size(); ++k) {
    const Sym2 cf = cof(Sym2::identity() + p.at(k));
    EXPECT_LE(std::abs(frobenius(o.at(k), cf)) / norm(cf), 1e-12);
  }
}

TEST(LinearizedT, MatchesGateauxAtSolution) {
  const int n = 16;
  const ManufacturedProblem mp = make_manufactured(0.01, n);
  Rng rng(2);
  const SymMatrixField x = random_matrix_field(n, rng);
  const SymMatrixField lhs = apply_linearized_T(mp.hessian_exact, x);
  const SymMatrixField rhs =
      gateaux_dM_field(mp.hessian_exact, mp.f, project_onto_V(x).hessian);
  EXPECT_LE(sobolev_norm(lhs - rhs, kL2), 1e-10 * sobolev_norm(x, kL2));
}

TEST(LinearizedT, SymmetrizedOperatorIsSelfAdjoint) {
  const int n = 16;
  const SymMatrixField p = make_manufactured(0.02, n).hessian_exact;
  Rng rng(3);
  auto a_op = [&](const SymMatrixField& x) {
    return project_onto_V(apply_linearized_T(p, x)).hessian;
  };
  for (int t = 0; t < 5; ++t) {
    const SymMatrixField x = random_matrix_field(n, rng);
    const SymMatrixField y = random_matrix_field(n, rng);
    EXPECT_LE(std::abs(inner_product(a_op(x), y, kL2) - inner_product(x, a_op(y), kL2)),
              1e-10 * sobolev_norm(x, kL2) * sobolev_norm(y, kL2));
  }
}

TEST(Rho0, UnitTargetMatchesAnalyticValueAndDenseSvd) {
  const int n = 16;
  const SymMatrixField zero(n);
  const OperatorNormEstimate est = estimate_rho0(zero, 5);
  EXPECT_NEAR(est.rho0, 1 / std::sqrt(2.0), 1e-3);
  EXPECT_NEAR(sobolev_norm(est.witness, kL2), 1.0, 1e-12);
  const Eigen::MatrixXd dense = dense_linearized_T(zero);
  const double sigma = Eigen::BDCSVD<Eigen::MatrixXd>(dense).singularValues()(0);
  EXPECT_NEAR(sigma, 1 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(est.rho0, sigma, 1e-6);
}

TEST(Rho0, MatchesDenseSvdAtLargerAmplitude) {
  const int n = 16;
  const SymMatrixField p = make_manufactured(0.02, n).hessian_exact;
  const OperatorNormEstimate est = estimate_rho0(p, 6, {1e-12, 20000});
  const double sigma =
      Eigen::BDCSVD<Eigen::MatrixXd>(dense_linearized_T(p)).singularValues()(0);
  EXPECT_NEAR(est.rho0, sigma, 2e-4);
  EXPECT_LE(est.rho0, sigma + 1e-10);
}

TEST(Rho0, BoundsProbesAndMonotone) {
  const int n = 32;
  double last = 0.0;
  Rng rng(7);
  for (double eps : {0.002, 0.01, 0.02}) {
    const ManufacturedProblem mp = make_manufactured(eps, n);
    const OperatorNormEstimate est = estimate_rho0(mp.hessian_exact, 11);
    EXPECT_GE(est.rho0, 0.0);
    EXPECT_LT(est.rho0, 1.0);
    EXPECT_LE(est.rho0, rate_bound(mp.report.kappa) + 1e-3) << eps;
    EXPECT_GE(est.rho0, last - 1e-9);
    last = est.rho0;
    for (int t = 0; t < 50; ++t) {
      SymMatrixField x = random_matrix_field(n, rng);
      x *= 1.0 / sobolev_norm(x, kL2);
      EXPECT_LE(sobolev_norm(apply_linearized_T(mp.hessian_exact, x), kL2), est.rho0 + 1e-6);
    }
  }
}

TEST(Rho0, RejectsNonEllipticFields) {
  EXPECT_THROW(estimate_rho0(make_manufactured(0.03, 16).hessian_exact, 1), InvalidArgument);
}

TEST(Rho0, BudgetExhaustionIsFlagged) {
  const OperatorNormEstimate est =
      estimate_rho0(make_manufactured(0.02, 16).hessian_exact, 1, {1e-14, 3});
  EXPECT_EQ(est.iterations, 3);
  EXPECT_TRUE(est.slow_convergence);
  EXPECT_GT(est.residual, 0.0);
}
