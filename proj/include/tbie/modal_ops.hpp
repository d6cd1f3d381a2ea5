#pragma once

// Layer operators V, K, K', W on the unit circle and unit sphere are diagonal
// in the Fourier / spherical-harmonic basis. This header provides their
// per-mode eigenvalues and the per-mode Calderon blocks
//
//   M = [[K, -V], [-W, -K']],   P^{+/-} = I/2 +/- M.
//
// With the addition theorem for the fundamental solution (radiating, e^{i kappa r})
// and the jump relations gamma^{+/-} K-potential = +/- I/2 + K, the eigenvalues on
// the unit circle are
//
//   v  = (i pi / 2) J_m H_m
//   kk = kp = (i pi kappa / 4) (J_m H_m' + J_m' H_m)
//   w  = -(i pi kappa^2 / 2) J_m' H_m'
//
// and on the unit sphere
//
//   v  = i kappa j_l h_l
//   kk = kp = (i kappa^2 / 2) (j_l h_l' + j_l' h_l)
//   w  = -i kappa^3 j_l' h_l'
//
// where W carries the sign convention W = -d/dn (double-layer potential).
// Circle modes m and -m share the same values; only m >= 0 is computed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tbie/small_matrix.hpp"
#include "tbie/specfun.hpp"

namespace tbie {

enum class Geometry { Circle2D, Sphere3D };

inline std::string_view to_string(Geometry g) { return g == Geometry::Circle2D ? "circle" : "sphere"; }

inline Geometry parse_geometry(std::string_view s) {
  if (s == "circle") return Geometry::Circle2D;
  if (s == "sphere") return Geometry::Sphere3D;
  throw std::invalid_argument("unknown geometry '" + std::string(s) + "' (expected circle|sphere)");
}

/// Radial factors of one mode at the boundary r = 1: the regular solution
/// (J_m or j_l) and the radiating one (H_m or h_l), with their derivatives
/// with respect to the argument kappa * r.
struct ModalRadial {
  Geometry geometry = Geometry::Circle2D;
  int mode = 0;
  double wavenumber = 0.0;  // kappa
  double Rint = 0.0;
  double dRint = 0.0;
  cplx Rext;
  cplx dRext;

  /// Cauchy trace (Dirichlet, Neumann) of R^int(kappa r) at r = 1.
  Vec2 interior_trace() const { return vec2(Rint, wavenumber * dRint); }
  /// Cauchy trace of R^ext(kappa r) at r = 1.
  Vec2 exterior_trace() const { return vec2(Rext, wavenumber * dRext); }
};

struct ModalBIO {
  Geometry geometry = Geometry::Circle2D;
  int mode = 0;
  double wavenumber = 0.0;
  cplx v;   // single layer
  cplx kk;  // double layer K
  cplx kp;  // adjoint double layer K'
  cplx w;   // hypersingular
};

/// Radial factors for modes 0..max_mode at kappa. Truncated (shorter than
/// max_mode + 1) when the irregular factor overflows at high order.
inline std::vector<ModalRadial> modal_radial_sequence(Geometry geom, int max_mode, double kappa) {
  std::vector<ModalRadial> out;
  if (geom == Geometry::Circle2D) {
    for (const auto& t : specfun::cyl_sequence(max_mode, kappa)) {
      out.push_back({geom, t.order, kappa, t.J, t.Jp, t.H, t.Hp});
    }
  } else {
    for (const auto& t : specfun::sph_sequence(max_mode, kappa)) {
      out.push_back({geom, t.order, kappa, t.j, t.jp, t.h, t.hp});
    }
  }
  return out;
}

inline ModalRadial modal_radial(Geometry geom, int mode, double kappa,
                                int max_order = specfun::kDefaultMaxOrder) {
  if (geom == Geometry::Circle2D) {
    auto t = specfun::cyl_pair(mode, kappa, max_order);
    return {geom, mode, kappa, t.J, t.Jp, t.H, t.Hp};
  }
  auto t = specfun::sph_pair(mode, kappa, max_order);
  return {geom, mode, kappa, t.j, t.jp, t.h, t.hp};
}

inline ModalBIO layer_eigenvalues(const ModalRadial& r) {
  constexpr double pi = std::numbers::pi;
  const cplx I(0.0, 1.0);
  const double kap = r.wavenumber;
  ModalBIO b{r.geometry, r.mode, kap, {}, {}, {}, {}};
  const cplx mixed = r.Rint * r.dRext + r.dRint * r.Rext;
  if (r.geometry == Geometry::Circle2D) {
    b.v = I * (pi / 2.0) * r.Rint * r.Rext;
    b.kk = I * (pi * kap / 4.0) * mixed;
    b.w = -I * (pi * kap * kap / 2.0) * r.dRint * r.dRext;
  } else {
    b.v = I * kap * r.Rint * r.Rext;
    b.kk = I * (kap * kap / 2.0) * mixed;
    b.w = -I * (kap * kap * kap) * r.dRint * r.dRext;
  }
  b.kp = b.kk;
  return b;
}

/// Eigenvalues of V, K, K', W for one mode at wavenumber kappa.
inline ModalBIO layer_eigenvalues(Geometry geom, int mode, double kappa,
                                  int max_order = specfun::kDefaultMaxOrder) {
  if (!(kappa > 0.0)) throw std::domain_error("layer_eigenvalues: wavenumber must be > 0");
  return layer_eigenvalues(modal_radial(geom, mode, kappa, max_order));
}

inline Mat2 calderon_M(const ModalBIO& b) { return Mat2{b.kk, -b.v, -b.w, -b.kp}; }

struct CalderonBlocks {
  Mat2 M_i, M_o;
  Mat2 Pplus_i, Pminus_i;
  Mat2 Pplus_o, Pminus_o;
};

namespace detail {

// Rounds x onto the grid of multiples of G * 2^-53, G a power of two with
// G >= 2 max(1, |x|). On that grid 1 - x is exact, so x + (1 - x) == 1.
inline double snap_for_complement(double x) {
  const double G = std::exp2(std::ceil(std::log2(std::max(1.0, std::abs(x)))) + 1.0);
  volatile double t = x + G;  // keep the rounding step from being folded away
  return t - G;
}

inline Mat2 complement_projector(Mat2& Pplus) {
  for (int i = 0; i < 2; ++i) {
    cplx& d = Pplus(i, i);
    d = {snap_for_complement(d.real()), d.imag()};
  }
  return Mat2::identity() - Pplus;
}

}  // namespace detail

inline CalderonBlocks calderon_matrices(const ModalBIO& bio_i, const ModalBIO& bio_o) {
  if (bio_i.geometry != bio_o.geometry) throw std::invalid_argument("calderon_matrices: geometry mismatch");
  if (bio_i.mode != bio_o.mode) throw std::invalid_argument("calderon_matrices: mode mismatch");
  const Mat2 half = 0.5 * Mat2::identity();
  CalderonBlocks c;
  c.M_i = calderon_M(bio_i);
  c.M_o = calderon_M(bio_o);
  c.Pplus_i = half + c.M_i;
  c.Pplus_o = half + c.M_o;
  // P^- is the exact complement of P^+: P^+ + P^- == I bit for bit. The
  // snapping moves diagonal entries of P^+ by at most one unit in the last place.
  c.Pminus_i = detail::complement_projector(c.Pplus_i);
  c.Pminus_o = detail::complement_projector(c.Pplus_o);
  return c;
}

}  // namespace tbie
