#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tbie/modal_ops.hpp"
#include "tbie/oracle.hpp"

using namespace tbie;
using oracle::Kernel;

TEST(QuadratureRule, TrapezoidWeightsSumToCircumference) {
  const auto q = oracle::make_rule(oracle::RuleKind::Trapezoid, 16);
  double s = 0.0;
  for (double w : q.weights) s += w;
  EXPECT_NEAR(s, 2.0 * std::numbers::pi, 1e-14);
  EXPECT_EQ(q.nodes.size(), 32u);
  EXPECT_THROW(oracle::make_rule(oracle::RuleKind::LogSplit, 4), std::invalid_argument);
}

TEST(QuadratureRule, LogMomentsExact) {
  // int_0^{2pi} ln(4 sin^2(t/2)) e^{imt} dt = -2 pi / |m| (m != 0), 0 for m = 0.
  // The reference is confirmed by a high-order trapezoid rule on the
  // regularised integrand away from the singularity.
  const int N = 32;
  const auto q = oracle::make_rule(oracle::RuleKind::LogSplit, N);
  for (int m = 0; m < N; ++m) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < q.nodes.size(); ++j) s += q.weights[j] * std::polar(1.0, m * q.nodes[j]);
    const double exact = m == 0 ? 0.0 : -2.0 * std::numbers::pi / m;
    EXPECT_NEAR(s.real(), exact, 1e-12) << m;
    EXPECT_NEAR(s.imag(), 0.0, 1e-12) << m;
  }
  // Midpoint rule with many nodes, error O(ln n / n); a loose confirmation of the m = 1 value.
  const int n = 400000;
  double mid = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * (j + 0.5) / n;
    mid += std::log(4.0 * std::sin(t / 2) * std::sin(t / 2)) * std::cos(t);
  }
  mid *= 2.0 * std::numbers::pi / n;
  EXPECT_NEAR(mid, -2.0 * std::numbers::pi, 1e-3);
}

TEST(QuadratureEigenvalue, SingleLayerSelfConvergence) {
  const cplx a = oracle::detail::apply_and_project(Kernel::V, 0, 1.0, 32);
  const cplx b = oracle::detail::apply_and_project(Kernel::V, 0, 1.0, 64);
  EXPECT_LT(std::abs(a - b), 1e-10);
}

TEST(QuadratureEigenvalue, SpectralConvergence) {
  const cplx ref = oracle::quadrature_eigenvalue(Kernel::V, 2, 3.0);
  const double e8 = std::abs(oracle::detail::apply_and_project(Kernel::V, 2, 3.0, 8) - ref);
  const double e16 = std::abs(oracle::detail::apply_and_project(Kernel::V, 2, 3.0, 16) - ref);
  EXPECT_GT(e8, 4.0 * e16);
}

TEST(QuadratureEigenvalue, LaplaceLimitOfDoubleLayer) {
  // kappa small but J_m still above the oracle's zero guard
  EXPECT_LT(std::abs(oracle::quadrature_eigenvalue(Kernel::K, 1, 1e-3)), 1e-5);
  EXPECT_LT(std::abs(oracle::quadrature_eigenvalue(Kernel::K, 2, 1e-2)), 1e-4);
}

TEST(QuadratureEigenvalue, MatchesModalValues) {
  const auto b = layer_eigenvalues(Geometry::Circle2D, 2, 3.0);
  EXPECT_LT(std::abs(oracle::quadrature_eigenvalue(Kernel::Kp, 2, 3.0) - b.kp), 1e-8);
  for (double kappa : {1.0, 2.0, 3.0, 5.0, 8.0, 10.0}) {
    for (int m = 0; m <= 10; ++m) {
      if (std::abs(std::cyl_bessel_j(m, kappa)) < oracle::kMinAbsJ) continue;
      const auto e = layer_eigenvalues(Geometry::Circle2D, m, kappa);
      const cplx v = oracle::quadrature_eigenvalue(Kernel::V, m, kappa);
      const cplx kk = oracle::quadrature_eigenvalue(Kernel::K, m, kappa);
      EXPECT_LT(std::abs(v - e.v), 1e-8) << m << " " << kappa;
      EXPECT_LT(std::abs(kk - e.kk), 1e-8) << m << " " << kappa;
      EXPECT_LT(std::abs(oracle::hypersingular_from_calderon(v, kk) - e.w), 1e-9) << m << " " << kappa;
    }
  }
}

TEST(QuadratureEigenvalue, Preconditions) {
  EXPECT_THROW(oracle::quadrature_eigenvalue(Kernel::V, 0, 1.0, 16), std::invalid_argument);
  EXPECT_THROW(oracle::quadrature_eigenvalue(Kernel::V, -1, 1.0), std::invalid_argument);
  EXPECT_THROW(oracle::quadrature_eigenvalue(Kernel::V, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(oracle::quadrature_eigenvalue(Kernel::V, 0, 2.404825557695773), std::invalid_argument);
}

TEST(HypersingularFromCalderon, Algebra) {
  EXPECT_EQ(oracle::hypersingular_from_calderon(cplx(0.3, 2.0), 0.5), cplx(0.0));
  EXPECT_THROW(oracle::hypersingular_from_calderon(0.0, 0.1), std::domain_error);
  const auto b = layer_eigenvalues(Geometry::Circle2D, 0, 1.0);
  EXPECT_LT(std::abs(oracle::hypersingular_from_calderon(b.v, b.kk) - b.w), 1e-9);
}
