#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tbie/calculus.hpp"
#include "tbie/transmission.hpp"

using namespace tbie;

TEST(SolutionOperator, FixesInteriorAndAnnihilatesExterior) {
  for (Geometry g : {Geometry::Circle2D, Geometry::Sphere3D}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      for (int m : {0, 2, 9, 40}) {
        const auto op = solution_operator_mode(g, m, {3.0, 1.0, 3.0, alpha});
        const Vec2 ci = op.interiorColumn;
        EXPECT_LT(frobenius(op.S * ci - ci), 1e-12 * frobenius(ci));
        EXPECT_LT(frobenius(op.S * op.annihilated_column()), 1e-12 * frobenius(op.S) * frobenius(op.annihilated_column()));
        EXPECT_LT(std::abs(det(op.S)), 1e-12 * std::norm(frobenius(op.S)));  // rank one
        EXPECT_FALSE(op.near_singular());
      }
    }
  }
}

TEST(SolutionOperator, EqualMediaDegeneracy) {
  for (int m : {0, 1, 5}) {
    const MediumParams p{2.2, 1.7, 1.7, 1.0};
    const auto b = compute_mode_blocks(Geometry::Circle2D, m, p);
    const Mat2 lhs = b.S_io.S + b.S_oi.S - Mat2::identity();
    EXPECT_LT(max_abs(lhs - (-2.0) * b.cal.M_i), 1e-12);
  }
}

TEST(SolutionOperator, TraceProjectionResiduals) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MediumParams p{3.0, 1.0, 3.0, 1.0};
  const auto b = compute_mode_blocks(Geometry::Circle2D, 2, p);
  for (int trial = 0; trial < 20; ++trial) {
    Vec2 f = vec2({u(gen), u(gen)}, {u(gen), u(gen)});
    f = (1.0 / frobenius(f)) * f;
    const auto [r1, r2] = verify_trace_projection_mode(b.S_io, b.cal.Pminus_i, b.cal.Pminus_o, f);
    EXPECT_LT(r1, 1e-9);
    EXPECT_LT(r2, 1e-9);
  }
  const auto [z1, z2] = verify_trace_projection_mode(b.S_io, b.cal.Pminus_i, b.cal.Pminus_o, Vec2::zero());
  EXPECT_EQ(z1, 0.0);
  EXPECT_EQ(z2, 0.0);

  const Vec2 ci = b.S_io.interiorColumn;
  const auto [i1, i2] = verify_trace_projection_mode(b.S_io, b.cal.Pminus_i, b.cal.Pminus_o, ci);
  EXPECT_LT(std::abs(i1 - frobenius(b.cal.Pminus_i * ci - ci)), 1e-12 * frobenius(ci));
  (void)i2;
}

TEST(SolutionOperator, SwapDualityMatchesReversedRadials) {
  const auto ri = modal_radial(Geometry::Sphere3D, 3, 4.0 * std::sqrt(2.0));
  const auto ro = modal_radial(Geometry::Sphere3D, 3, 4.0);
  const auto direct = solution_operator_mode(Geometry::Sphere3D, 3, {4.0, 1.0, 2.0, 0.5});
  const auto fromRadials = solution_operator_mode(ro, ri, 0.5);
  EXPECT_LT(max_abs(direct.S - fromRadials.S), 1e-14 * max_abs(direct.S));
}

TEST(SolutionOperator, ParameterErrors) {
  EXPECT_THROW(solution_operator_mode(Geometry::Circle2D, 0, {0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(solution_operator_mode(Geometry::Circle2D, 0, {1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(solution_operator_mode(Geometry::Circle2D, 0, {1.0, 1.0, 1.0, 0.0}), std::invalid_argument);
  const auto a = modal_radial(Geometry::Circle2D, 1, 1.0);
  const auto b = modal_radial(Geometry::Circle2D, 2, 1.0);
  EXPECT_THROW(solution_operator_mode(a, b), std::invalid_argument);
  EXPECT_THROW((MediumParams{1.0, 1.0, 0.0, 1.0}.validate()), std::invalid_argument);
}
