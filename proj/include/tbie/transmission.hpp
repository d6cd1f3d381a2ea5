#pragma once

// Per-mode solution operators of the transmission problem
//
//   (Delta + k^2 c_i) u^- = 0 inside,  (Delta + k^2 c_o) u^+ = 0 outside (radiating),
//   gamma_C^- u^- = D gamma_C^+ u^+ + f,   D = diag(1, alpha).
//
// In one mode the interior solution is a R^int(k sqrt(c_i) r) and the exterior
// one b R^ext(k sqrt(c_o) r), so the matching condition is the 2x2 system
// a c_int - b D c_ext = f and S f = a c_int. S is rank one with range
// span(c_int); it fixes c_int and annihilates D c_ext.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "tbie/modal_ops.hpp"
#include "tbie/small_matrix.hpp"

namespace tbie {

struct MediumParams {
  double k = 1.0;
  double n_i = 1.0;
  double n_o = 1.0;
  double alpha = 1.0;

  void validate() const {
    if (!(k > 0.0) || !(n_i > 0.0) || !(n_o > 0.0) || !(alpha > 0.0)) {
      throw std::invalid_argument("MediumParams: k, n_i, n_o and alpha must all be > 0");
    }
  }
  double kappa_i() const { return k * std::sqrt(n_i); }
  double kappa_o() const { return k * std::sqrt(n_o); }
};

/// Parameters of one solution operator S(c_i, c_o) at frequency k.
struct SolutionParams {
  double k = 1.0;
  double c_i = 1.0;
  double c_o = 1.0;
  double alpha = 1.0;
};

/// Matching systems whose column-equilibrated condition number exceeds this
/// are flagged as near-resonant. The value is returned regardless.
inline constexpr double kNearSingularCondition = 1e14;

class SingularMatchingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ModalSolutionOp {
  Geometry geometry = Geometry::Circle2D;
  int mode = 0;
  Mat2 S;
  Vec2 interiorColumn;  // Cauchy trace of the regular interior radial solution
  Vec2 exteriorColumn;  // Cauchy trace of the radiating exterior radial solution
  double alpha = 1.0;
  cplx matchingDet;     // det [c_int | -D c_ext]
  double condition = 1.0;  // condition number after normalising both columns

  bool near_singular() const { return condition > kNearSingularCondition; }
  /// D * exteriorColumn, which S maps to zero.
  Vec2 annihilated_column() const { return vec2(exteriorColumn(0, 0), alpha * exteriorColumn(1, 0)); }
};

/// S from precomputed radial factors: `interior` at kappa = k sqrt(c_i) and
/// `exterior` at kappa = k sqrt(c_o), both for the same mode.
inline ModalSolutionOp solution_operator_mode(const ModalRadial& interior, const ModalRadial& exterior,
                                              double alpha = 1.0) {
  if (interior.geometry != exterior.geometry || interior.mode != exterior.mode) {
    throw std::invalid_argument("solution_operator_mode: radial factors of different modes");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("solution_operator_mode: alpha must be > 0");

  ModalSolutionOp op;
  op.geometry = interior.geometry;
  op.mode = interior.mode;
  op.alpha = alpha;
  op.interiorColumn = interior.interior_trace();
  op.exteriorColumn = exterior.exterior_trace();

  const Vec2& c = op.interiorColumn;
  const Vec2 e = op.annihilated_column();
  // G = [[c0, -e0], [c1, -e1]]
  const cplx d = -c(0, 0) * e(1, 0) + e(0, 0) * c(1, 0);
  op.matchingDet = d;
  if (d == cplx(0.0) || !std::isfinite(std::abs(d))) {
    throw SingularMatchingError("solution_operator_mode: singular matching system");
  }
  // First row of G^{-1} gives a = (-e1 f0 + e0 f1) / d.
  const Vec2 row = vec2(-e(1, 0) / d, e(0, 0) / d);
  op.S = outer(c, row);

  const double nc = frobenius(c);
  const double ne = frobenius(e);
  Mat2 G{c(0, 0) / nc, -e(0, 0) / ne, c(1, 0) / nc, -e(1, 0) / ne};
  const auto sv = svd_small(G);
  op.condition = sv[1] > 0.0 ? sv[0] / sv[1] : std::numeric_limits<double>::infinity();
  return op;
}

/// S(c_i, c_o) for one mode. The alpha-swapped operator of the generalised
/// problem is this call with alpha replaced by 1 / alpha.
inline ModalSolutionOp solution_operator_mode(Geometry geom, int mode, const SolutionParams& p) {
  if (!(p.k > 0.0) || !(p.c_i > 0.0) || !(p.c_o > 0.0)) {
    throw std::invalid_argument("solution_operator_mode: k, c_i, c_o must be > 0");
  }
  const auto ri = modal_radial(geom, mode, p.k * std::sqrt(p.c_i));
  const auto ro = modal_radial(geom, mode, p.k * std::sqrt(p.c_o));
  return solution_operator_mode(ri, ro, p.alpha);
}

/// Residuals of the characterisation phi = S_io f  <=>  P_i^- phi = phi and
/// P_o^-(phi - f) = 0, evaluated at phi = S f.
inline std::pair<double, double> verify_trace_projection_mode(const ModalSolutionOp& S, const Mat2& P_i_minus,
                                                    const Mat2& P_o_minus, const Vec2& f) {
  const Vec2 phi = S.S * f;
  const double r1 = frobenius(P_i_minus * phi - phi);
  const double r2 = frobenius(P_o_minus * (phi - f));
  return {r1, r2};
}

}  // namespace tbie
