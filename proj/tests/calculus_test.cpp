#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "tbie/calculus.hpp"

using namespace tbie;

namespace {

ModeBlocks blocks(Geometry g, int m, double k, double ni, double no, double alpha = 1.0) {
  return compute_mode_blocks(g, m, MediumParams{k, ni, no, alpha});
}

std::shared_ptr<const ModeTable> table(Geometry g, double k, double ni, double no, int maxOrder = 100) {
  return std::make_shared<const ModeTable>(g, MediumParams{k, ni, no, 1.0}, maxOrder);
}

double norm_of(FamilyName f, const std::shared_ptr<const ModeTable>& t, NormChoice n = NormChoice::TraceNorm) {
  const SobolevWeight wt{n, t->geometry(), t->params().k};
  const auto fam = make_family(f, t);
  return (is_augmented(f) ? pinv_norm(fam, wt) : operator_norm(fam, wt)).norm;
}

}  // namespace

TEST(Assembly, FirstKindEntrywise) {
  const auto b = blocks(Geometry::Circle2D, 1, 2.0, 3.0, 1.0);
  const auto &i = b.bio_i, &o = b.bio_o;
  const Mat2 expected{-(i.kk + o.kk), i.v + o.v, i.w + o.w, i.kp + o.kp};
  EXPECT_LT(max_abs(b.A_I - expected), 1e-12);
  // P_o^- - P_i^+ and P_i^- - P_o^+ coincide.
  EXPECT_LT(max_abs(b.A_I - assemble_AI_mode(b.cal.Pminus_i, b.cal.Pplus_o)), 1e-12);
}

TEST(Assembly, FirstKindEqualMedia) {
  const auto b = blocks(Geometry::Sphere3D, 3, 1.5, 2.0, 2.0);
  EXPECT_LT(max_abs(b.A_I + 2.0 * b.cal.M_i), 1e-12);
}

TEST(Assembly, SecondKind) {
  const auto e = blocks(Geometry::Circle2D, 2, 4.0, 2.0, 2.0);
  EXPECT_EQ(max_abs(e.A_II - Mat2::identity()), 0.0);

  const auto b = blocks(Geometry::Circle2D, 5, 3.1, 3.0, 1.0);
  const auto &i = b.bio_i, &o = b.bio_o;
  const Mat2 form2 = Mat2::identity() + Mat2{i.kk - o.kk, -(i.v - o.v), -(i.w - o.w), -(i.kp - o.kp)};
  EXPECT_LT(max_abs(b.A_II - form2), 1e-12);
  EXPECT_LT(max_abs(b.A_II - (2.0 * Mat2::identity() - b.cal.Pplus_o - b.cal.Pminus_i)), 1e-12);
  EXPECT_LT(max_abs(b.A_I + b.A_II - 2.0 * b.cal.Pminus_o), 1e-12);
}

TEST(Assembly, GeneralisedFirstKind) {
  const auto b = blocks(Geometry::Circle2D, 3, 2.5, 1.0, 3.0);
  EXPECT_LT(max_abs(assemble_AIgen_mode(b.cal.Pminus_o, b.cal.Pplus_i, 1.0) - b.A_I), 1e-12);
  const auto &i = b.bio_i, &o = b.bio_o;
  for (double a : {0.5, 2.0, 7.0}) {
    const Mat2 G = assemble_AIgen_mode(b.cal.Pminus_o, b.cal.Pplus_i, a);
    const Mat2 expected{-(i.kk + o.kk), i.v + o.v / a, i.w / a + o.w, (i.kp + o.kp) / a};
    EXPECT_LT(max_abs(G - expected), 1e-12) << a;
  }
  EXPECT_THROW(assemble_AIgen_mode(b.cal.Pminus_o, b.cal.Pplus_i, 0.0), std::invalid_argument);
}

TEST(Assembly, GeneralisedInverseFormula) {
  const auto ri = modal_radial(Geometry::Circle2D, 0, 1.0);
  const auto ro = modal_radial(Geometry::Circle2D, 0, 1.0 * std::sqrt(3.0));
  const auto b = compute_mode_blocks(ri, ro, 2.0);
  const Mat2 D = Mat2::diagonal(1.0, 2.0);
  const Mat2 lhs = inverse(b.A_I_gen);
  const Mat2 rhs = b.S_io.S * D + D * b.St_oi.S - D;
  EXPECT_LT(max_abs(lhs - rhs), 1e-8);
}

TEST(Assembly, AugmentedStack) {
  const auto s = svd_small(assemble_augmented_mode(Mat2::identity(), Mat2::zero()));
  EXPECT_DOUBLE_EQ(s[1], 1.0);

  const auto b = blocks(Geometry::Circle2D, 4, 3.0, 1.0, 3.0);
  const Vec2 f = vec2(cplx(0.3, -0.2), cplx(1.0, 0.5));
  const Vec2 phi = b.S_io.S * f;
  const Vec4 out = assemble_augmented_mode(b.A_I, b.cal.Pplus_i) * phi;
  const Vec2 top = b.A_I * phi;
  EXPECT_LT(std::abs(out(0, 0) - top(0, 0)) + std::abs(out(1, 0) - top(1, 0)), 1e-14);
  EXPECT_LT(std::abs(out(2, 0)) + std::abs(out(3, 0)), 1e-10);
}

TEST(Weights, DiagonalForms) {
  const SobolevWeight t{NormChoice::TraceNorm, Geometry::Circle2D, 3.0};
  const auto [a, b] = t.diag(0);
  EXPECT_DOUBLE_EQ(a, std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(b, 1.0 / std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(t.omega(4), 5.0);
  const SobolevWeight s{NormChoice::EnergyNorm, Geometry::Sphere3D, 2.0};
  EXPECT_DOUBLE_EQ(s.omega(2), std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(s.diag(2).second, 1.0);
  for (int m = 0; m <= 150; ++m) {
    EXPECT_GT(t.diag(m).first, 0.0);
    EXPECT_GT(t.diag(m).second, 0.0);
    EXPECT_EQ(max_abs(weighted_block(Mat2::identity(), t, m) - Mat2::identity()), 0.0);
  }
  EXPECT_THROW(parse_norm("sup"), std::invalid_argument);
}

TEST(Norms, TrivialFamilies) {
  const auto t = table(Geometry::Circle2D, 4.0, 2.0, 2.0, 30);
  EXPECT_DOUBLE_EQ(norm_of(FamilyName::Identity, t), 1.0);
  EXPECT_NEAR(norm_of(FamilyName::A_II_inv, t), 1.0, 1e-12);
  EXPECT_NEAR(norm_of(FamilyName::A_II, t), 1.0, 1e-12);

  OperatorFamily stacked;
  stacked.name = FamilyName::Aug_I;
  stacked.maxOrder = 10;
  stacked.block = [](int) -> ModalBlock { return assemble_augmented_mode(Mat2::identity(), Mat2::zero()); };
  const SobolevWeight wt{NormChoice::TraceNorm, Geometry::Circle2D, 1.0};
  const auto r = pinv_norm(stacked, wt);
  EXPECT_DOUBLE_EQ(r.norm, 1.0);
  EXPECT_EQ(r.mode, 0);  // ties go to the smallest mode

  OperatorFamily zero = stacked;
  zero.block = [](int m) -> ModalBlock {
    return assemble_augmented_mode(m == 3 ? Mat2::zero() : Mat2::identity(), Mat2::zero());
  };
  const auto z = pinv_norm(zero, wt);
  EXPECT_TRUE(std::isinf(z.norm));
  EXPECT_EQ(z.mode, 3);
}

TEST(Norms, FrozenRegressionCircle) {
  // Values from the validated build, circle n_i = 1, n_o = 3, k = 5.
  const auto t = table(Geometry::Circle2D, 5.0, 1.0, 3.0);
  const double sio = norm_of(FamilyName::S_io, t);
  const double soi = norm_of(FamilyName::S_oi, t);
  const double ai = norm_of(FamilyName::A_I_inv, t);
  EXPECT_NEAR(sio, 1.8601968096230945, 1e-10);
  EXPECT_NEAR(soi, 3.5928250946170404, 1e-10);
  EXPECT_NEAR(ai, 3.2635216333898978, 1e-10);
  EXPECT_NEAR(norm_of(FamilyName::A_II_inv, t), 5.9998630874372978, 1e-10);
  EXPECT_NEAR(norm_of(FamilyName::Aug_I, t), 1.8012194131164689, 1e-10);
  EXPECT_NEAR(norm_of(FamilyName::Aug_II, t), 1.7962382873850438, 1e-10);
  EXPECT_GE(ai, sio - 1e-12);
}

TEST(Norms, TriangleInequalitiesAndTruncationMonotone) {
  for (Geometry g : {Geometry::Circle2D, Geometry::Sphere3D}) {
    for (double k : {1.0, 3.7, 8.2}) {
      for (auto [ni, no] : {std::pair{3.0, 1.0}, std::pair{1.0, 3.0}}) {
        const auto t = table(g, k, ni, no);
        const double ai = norm_of(FamilyName::A_I_inv, t);
        const double sio = norm_of(FamilyName::S_io, t), soi = norm_of(FamilyName::S_oi, t);
        EXPECT_LE(ai, (sio + soi + 1.0) * (1 + 1e-12));
        EXPECT_GE(ai * (1 + 1e-12), std::abs(soi - sio - 1.0));
        double prev = 0.0;
        for (int order : {1, 5, 20, 60, 100}) {
          const double v = norm_of(FamilyName::A_I_inv, table(g, k, ni, no, order));
          EXPECT_GE(v, prev * (1.0 - 1e-13));
          prev = v;
        }
      }
    }
  }
}

TEST(Norms, AugmentationKeepsSmallestSingularValueAwayFromZero) {
  // Near a spike of ||A_I^-1|| for n_i = 1, n_o = 3.
  const auto t = table(Geometry::Circle2D, 9.42, 1.0, 3.0);
  const SobolevWeight wt{NormChoice::TraceNorm, Geometry::Circle2D, 9.42};
  const double aug = 1.0 / pinv_norm(make_family(FamilyName::Aug_I, t), wt).norm;
  double plain = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= t->max_order(); ++m) plain = std::min(plain, svd_small(weighted_block((*t)[m].A_I, wt, m))[1]);
  EXPECT_LT(plain, 0.01);
  EXPECT_GT(aug, 0.3);
}

TEST(Identities, ExampleMode) {
  const auto r = verify_identities({2.7, 3.0, 1.0, 1.0}, Geometry::Circle2D, 4, 1e-8);
  EXPECT_TRUE(r.ok());
  for (const auto& c : r.checks) EXPECT_LT(c.residual, 1e-8 * c.scale) << c.id << ": " << c.description;
}

TEST(Identities, EqualMediaFirstKindInverse) {
  for (int m = 0; m <= 20; ++m) {
    const auto b = blocks(Geometry::Sphere3D, m, 2.0, 1.5, 1.5);
    EXPECT_LT(max_abs(inverse(b.A_I) - (-2.0) * b.cal.M_i), 1e-12);
    EXPECT_LT(max_abs((-2.0 * b.cal.M_i) * (-2.0 * b.cal.M_i) - Mat2::identity()), 1e-12);
  }
}

TEST(Identities, GeneralisedAtUnitAlphaMatchesFirstKind) {
  const auto b = blocks(Geometry::Circle2D, 6, 3.3, 3.0, 1.0);
  const Mat2 D = Mat2::identity();
  const Mat2 gen = b.S_io.S * D + D * b.St_oi.S - D;
  const Mat2 first = b.S_io.S + b.S_oi.S - Mat2::identity();
  EXPECT_EQ(max_abs(gen - first), 0.0);
  EXPECT_EQ(max_abs(b.A_I_gen - b.A_I), 0.0);
}

TEST(Identities, PropertyGrid) {
  for (Geometry g : {Geometry::Circle2D, Geometry::Sphere3D}) {
    for (double k : {0.5, 1.75, 6.0, 13.25, 20.0}) {
      for (auto [ni, no] : {std::pair{3.0, 1.0}, std::pair{1.0, 3.0}}) {
        const auto r = verify_identities_upto({k, ni, no, 1.0}, g, 100, 1e-8);
        const auto* f = r.first_failure();
        EXPECT_EQ(f, nullptr) << to_string(g) << " k=" << k << " " << (f ? f->id + " " + f->description : "");
      }
    }
  }
}

TEST(Identities, NegatedHypersingularIsCaught) {
  const EigenvalueHook hook = [](ModalBIO& b) { b.w = -b.w; };
  const auto r = verify_identities_upto({2.0, 3.0, 1.0, 1.0}, Geometry::Circle2D, 10, 1e-8, hook);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.first_failure()->id, "a");
}

TEST(Identities, Errors) {
  EXPECT_THROW(verify_identities({1.0, 1.0, 1.0, 1.0}, Geometry::Circle2D, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(verify_identities({-1.0, 1.0, 1.0, 1.0}, Geometry::Circle2D, 0), std::invalid_argument);
  EXPECT_THROW(parse_family("A_III"), std::invalid_argument);
  EXPECT_EQ(parse_family("Aug_II"), FamilyName::Aug_II);
}
