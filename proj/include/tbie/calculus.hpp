#pragma once

// Per-mode operator families built from the Calderon blocks and solution
// operators, their k-weighted norms, and the identity checks relating them.
//
//   A_I     = P_o^- - P_i^+
//   A_II    = P_o^- + P_i^+
//   A_I^gen = P_o^- D^{-1} - D^{-1} P_i^+,  D = diag(1, alpha)
//   Aug_*   = [A_*; P_i^+]   (4x2 per mode)
//
// Norms are realised diagonally in the modal basis: with omega the per-mode
// scalar weight, the trace norm H^{1/2}_k x H^{-1/2}_k uses diag(omega^{1/2},
// omega^{-1/2}) and the energy norm H^1_k x L^2 uses diag(omega, 1). The norm of
// a block-diagonal operator is the supremum over modes of the weighted block's
// largest singular value.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tbie/modal_ops.hpp"
#include "tbie/small_matrix.hpp"
#include "tbie/transmission.hpp"

namespace tbie {

inline constexpr int kDefaultModalOrder = 100;

enum class NormChoice { TraceNorm, EnergyNorm };

inline std::string_view to_string(NormChoice n) { return n == NormChoice::TraceNorm ? "trace" : "energy"; }

inline NormChoice parse_norm(std::string_view s) {
  if (s == "trace") return NormChoice::TraceNorm;
  if (s == "energy") return NormChoice::EnergyNorm;
  throw std::invalid_argument("unknown norm '" + std::string(s) + "' (expected trace|energy)");
}

struct SobolevWeight {
  NormChoice normChoice = NormChoice::TraceNorm;
  Geometry geometry = Geometry::Circle2D;
  double k = 1.0;

  /// (m^2 + k^2)^{1/2} on the circle, (l(l+1) + k^2)^{1/2} on the sphere.
  double omega(int mode) const {
    const double m = mode;
    const double lap = geometry == Geometry::Circle2D ? m * m : m * (m + 1.0);
    return std::sqrt(lap + k * k);
  }
  /// Diagonal (Dirichlet, Neumann) weight of one mode.
  std::pair<double, double> diag(int mode) const {
    const double w = omega(mode);
    if (normChoice == NormChoice::TraceNorm) return {std::sqrt(w), 1.0 / std::sqrt(w)};
    return {w, 1.0};
  }
};

inline Mat2 assemble_AI_mode(const Mat2& P_o_minus, const Mat2& P_i_plus) { return P_o_minus - P_i_plus; }

inline Mat2 assemble_AII_mode(const Mat2& P_o_minus, const Mat2& P_i_plus) { return P_o_minus + P_i_plus; }

inline Mat2 assemble_AIgen_mode(const Mat2& P_o_minus, const Mat2& P_i_plus, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("assemble_AIgen_mode: alpha must be > 0");
  const Mat2 Dinv = Mat2::diagonal(1.0, 1.0 / alpha);
  return P_o_minus * Dinv - Dinv * P_i_plus;
}

inline Mat42 assemble_augmented_mode(const Mat2& A, const Mat2& P_i_plus) { return vstack(A, P_i_plus); }

/// W_out A W_in^{-1}: W_in is the mode weight, W_out the same weight repeated
/// once per 2-row block of A.
template <int R>
SmallMatrix<R, 2> weighted_block(const SmallMatrix<R, 2>& A, const SobolevWeight& wt, int mode) {
  static_assert(R % 2 == 0);
  const auto [d0, d1] = wt.diag(mode);
  const double d[2] = {d0, d1};
  SmallMatrix<R, 2> B;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < 2; ++j) B(i, j) = A(i, j) * (d[i % 2] / d[j]);
  return B;
}

template <int R>
double weighted_norm(const SmallMatrix<R, 1>& x, const SobolevWeight& wt, int mode) {
  const auto [d0, d1] = wt.diag(mode);
  double s = 0.0;
  for (int i = 0; i < R; ++i) s += std::norm(x(i, 0) * (i % 2 ? d1 : d0));
  return std::sqrt(s);
}

template <int R>
double weighted_spectral_norm(const SmallMatrix<R, 2>& A, const SobolevWeight& wt, int mode) {
  return svd_small(weighted_block(A, wt, mode))[0];
}

// ---------------------------------------------------------------------------
// Per-mode tables

enum class FamilyName { S_io, S_oi, A_I, A_II, A_I_inv, A_II_inv, A_I_gen, Aug_I, Aug_II, Identity };

inline constexpr FamilyName kAllFamilies[] = {
    FamilyName::S_io,     FamilyName::S_oi,    FamilyName::A_I,   FamilyName::A_II,   FamilyName::A_I_inv,
    FamilyName::A_II_inv, FamilyName::A_I_gen, FamilyName::Aug_I, FamilyName::Aug_II, FamilyName::Identity};

inline std::string_view to_string(FamilyName f) {
  switch (f) {
    case FamilyName::S_io: return "S_io";
    case FamilyName::S_oi: return "S_oi";
    case FamilyName::A_I: return "A_I";
    case FamilyName::A_II: return "A_II";
    case FamilyName::A_I_inv: return "A_I_inv";
    case FamilyName::A_II_inv: return "A_II_inv";
    case FamilyName::A_I_gen: return "A_I_gen";
    case FamilyName::Aug_I: return "Aug_I";
    case FamilyName::Aug_II: return "Aug_II";
    case FamilyName::Identity: return "Identity";
  }
  return "?";
}

inline FamilyName parse_family(std::string_view s) {
  for (auto f : kAllFamilies)
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown operator family '" + std::string(s) + "'");
}

/// True for the stacked 4x2 families, whose sweep value is the pseudo-inverse norm.
inline bool is_augmented(FamilyName f) { return f == FamilyName::Aug_I || f == FamilyName::Aug_II; }

/// Test hook: lets a caller tamper with eigenvalues before anything is assembled.
using EigenvalueHook = std::function<void(ModalBIO&)>;

struct ModeBlocks {
  int mode = 0;
  ModalBIO bio_i, bio_o;
  CalderonBlocks cal;
  ModalSolutionOp S_io;   // S(n_i, n_o) with D = diag(1, alpha)
  ModalSolutionOp S_oi;   // S(n_o, n_i) with D = diag(1, alpha)
  ModalSolutionOp St_oi;  // S(n_o, n_i) with D = diag(1, 1/alpha)
  Mat2 A_I, A_II, A_I_gen;
};

/// Radial factors of one mode at both interior and exterior wavenumbers.
inline ModeBlocks compute_mode_blocks(const ModalRadial& radial_i, const ModalRadial& radial_o, double alpha,
                                      const EigenvalueHook& hook = {}) {
  ModeBlocks b;
  b.mode = radial_i.mode;
  b.bio_i = layer_eigenvalues(radial_i);
  b.bio_o = layer_eigenvalues(radial_o);
  if (hook) {
    hook(b.bio_i);
    hook(b.bio_o);
  }
  b.cal = calderon_matrices(b.bio_i, b.bio_o);
  b.S_io = solution_operator_mode(radial_i, radial_o, alpha);
  b.S_oi = solution_operator_mode(radial_o, radial_i, alpha);
  b.St_oi = solution_operator_mode(radial_o, radial_i, 1.0 / alpha);
  b.A_I = assemble_AI_mode(b.cal.Pminus_o, b.cal.Pplus_i);
  b.A_II = assemble_AII_mode(b.cal.Pminus_o, b.cal.Pplus_i);
  b.A_I_gen = assemble_AIgen_mode(b.cal.Pminus_o, b.cal.Pplus_i, alpha);
  return b;
}

inline ModeBlocks compute_mode_blocks(Geometry geom, int mode, const MediumParams& p,
                                      const EigenvalueHook& hook = {}) {
  p.validate();
  return compute_mode_blocks(modal_radial(geom, mode, p.kappa_i()), modal_radial(geom, mode, p.kappa_o()),
                             p.alpha, hook);
}

/// Every per-mode block for modes 0..maxOrder at one frequency. When the
/// irregular radial factor overflows at high order the table stops early and
/// `truncated()` is set.
class ModeTable {
 public:
  ModeTable(Geometry geom, const MediumParams& p, int maxOrder = kDefaultModalOrder,
            const EigenvalueHook& hook = {})
      : geometry_(geom), params_(p), requested_(maxOrder) {
    p.validate();
    if (maxOrder < 0) throw std::invalid_argument("ModeTable: maxOrder must be >= 0");
    const auto ri = modal_radial_sequence(geom, maxOrder, p.kappa_i());
    const auto ro = modal_radial_sequence(geom, maxOrder, p.kappa_o());
    const std::size_t n = std::min(ri.size(), ro.size());
    modes_.reserve(n);
    for (std::size_t m = 0; m < n; ++m) {
      modes_.push_back(compute_mode_blocks(ri[m], ro[m], p.alpha, hook));
      if (!modes_.back().S_io.S.all_finite() || !modes_.back().S_oi.S.all_finite()) {
        modes_.pop_back();
        break;
      }
    }
    if (modes_.empty()) throw specfun::OverflowError(0, p.k);
  }

  Geometry geometry() const { return geometry_; }
  const MediumParams& params() const { return params_; }
  int requested_max_order() const { return requested_; }
  int max_order() const { return static_cast<int>(modes_.size()) - 1; }
  bool truncated() const { return max_order() < requested_; }
  const ModeBlocks& operator[](int mode) const { return modes_.at(static_cast<std::size_t>(mode)); }
  const std::vector<ModeBlocks>& modes() const { return modes_; }

 private:
  Geometry geometry_;
  MediumParams params_;
  int requested_;
  std::vector<ModeBlocks> modes_;
};

// ---------------------------------------------------------------------------
// Operator families and their norms

using ModalBlock = std::variant<Mat2, Mat42>;

struct OperatorFamily {
  FamilyName name = FamilyName::Identity;
  std::function<ModalBlock(int mode)> block;
  int maxOrder = kDefaultModalOrder;
};

namespace detail {

inline Mat2 inverse_or_inf(const Mat2& A) {
  if (det(A) == cplx(0.0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return Mat2{inf, inf, inf, inf};
  }
  return inverse(A);
}

}  // namespace detail

/// Family `name` backed by a shared mode table.
inline OperatorFamily make_family(FamilyName name, std::shared_ptr<const ModeTable> table) {
  OperatorFamily fam;
  fam.name = name;
  fam.maxOrder = table->max_order();
  fam.block = [name, table](int mode) -> ModalBlock {
    const ModeBlocks& b = (*table)[mode];
    switch (name) {
      case FamilyName::S_io: return b.S_io.S;
      case FamilyName::S_oi: return b.S_oi.S;
      case FamilyName::A_I: return b.A_I;
      case FamilyName::A_II: return b.A_II;
      case FamilyName::A_I_inv: return detail::inverse_or_inf(b.A_I);
      case FamilyName::A_II_inv: return detail::inverse_or_inf(b.A_II);
      case FamilyName::A_I_gen: return b.A_I_gen;
      case FamilyName::Aug_I: return assemble_augmented_mode(b.A_I, b.cal.Pplus_i);
      case FamilyName::Aug_II: return assemble_augmented_mode(b.A_II, b.cal.Pplus_i);
      case FamilyName::Identity: return Mat2::identity();
    }
    return Mat2::identity();
  };
  return fam;
}

struct NormResult {
  double norm = 0.0;
  int mode = 0;                    // attaining mode (smallest index on ties)
  bool truncationWarning = false;  // attained at the last mode computed
};

inline std::array<double, 2> weighted_singular_values(const ModalBlock& block, const SobolevWeight& wt,
                                                      int mode) {
  return std::visit(
      [&](const auto& A) -> std::array<double, 2> {
        if (!A.all_finite()) {
          const double inf = std::numeric_limits<double>::infinity();
          return {inf, inf};
        }
        return svd_small(weighted_block(A, wt, mode));
      },
      block);
}

/// sup over modes 0..maxOrder of the largest weighted singular value.
inline NormResult operator_norm(const OperatorFamily& fam, const SobolevWeight& wt) {
  if (fam.maxOrder < 0) throw std::invalid_argument("operator_norm: empty family");
  NormResult r{-1.0, 0, false};
  for (int m = 0; m <= fam.maxOrder; ++m) {
    const double s = weighted_singular_values(fam.block(m), wt, m)[0];
    if (s > r.norm) {
      r.norm = s;
      r.mode = m;
    }
  }
  r.truncationWarning = fam.maxOrder > 0 && r.mode == fam.maxOrder;
  return r;
}

/// 1 / (min over modes of the smallest weighted singular value); +inf if it vanishes.
inline NormResult pinv_norm(const OperatorFamily& fam, const SobolevWeight& wt) {
  if (fam.maxOrder < 0) throw std::invalid_argument("pinv_norm: empty family");
  double smin = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int m = 0; m <= fam.maxOrder; ++m) {
    const double s = weighted_singular_values(fam.block(m), wt, m)[1];
    if (s < smin) {
      smin = s;
      arg = m;
    }
  }
  NormResult r;
  r.mode = arg;
  r.norm = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  r.truncationWarning = fam.maxOrder > 0 && arg == fam.maxOrder;
  return r;
}

// ---------------------------------------------------------------------------
// Identity checks

struct IdentityCheck {
  std::string id;           // "a".."f" or a short tag (proj, trace)
  std::string description;
  int mode = 0;
  double residual = 0.0;
  double scale = 1.0;       // residual must stay below tol * scale
  bool passed = true;
};

struct IdentityReport {
  Geometry geometry = Geometry::Circle2D;
  MediumParams params;
  double tol = 1e-8;
  std::vector<IdentityCheck> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const IdentityCheck* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
  /// Largest residual / scale over all checks with the given id.
  double worst(std::string_view id) const {
    double w = 0.0;
    for (const auto& c : checks)
      if (c.id == id) w = std::max(w, c.residual / c.scale);
    return w;
  }
};

namespace detail {

// Deterministic pseudo-random unit data per mode.
inline Vec2 probe_vector(int mode, int which) {
  std::mt19937_64 gen(0x5eed0000ULL + static_cast<unsigned long long>(mode) * 131ULL +
                      static_cast<unsigned long long>(which));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec2 f = vec2({u(gen), u(gen)}, {u(gen), u(gen)});
  return (1.0 / frobenius(f)) * f;
}

class CheckSink {
 public:
  CheckSink(IdentityReport& r, const SobolevWeight& wt, int mode) : r_(r), wt_(wt), mode_(mode) {}

  double n(const Mat2& A) const { return weighted_spectral_norm(A, wt_, mode_); }
  double n(const Mat42& A) const { return weighted_spectral_norm(A, wt_, mode_); }
  double n(const Vec2& x) const { return weighted_norm(x, wt_, mode_); }
  double n(const Vec4& x) const { return weighted_norm(x, wt_, mode_); }

  template <class Residual>
  void add(std::string id, std::string description, const Residual& res, double scale) {
    IdentityCheck c;
    c.id = std::move(id);
    c.description = std::move(description);
    c.mode = mode_;
    c.residual = n(res);
    c.scale = scale;
    c.passed = std::isfinite(c.residual) && c.residual <= r_.tol * scale;
    r_.checks.push_back(std::move(c));
  }

 private:
  IdentityReport& r_;
  SobolevWeight wt_;
  int mode_;
};

}  // namespace detail

inline constexpr double kGenAlphas[] = {0.5, 1.0, 2.0};

/// Per-mode residuals, measured in the weighted trace norm, of
///   (a) A_I^{-1} = S_io + S_oi - I
///   (b) A_II^{-1} = I - S_io - S_oi + 2 S_io S_oi
///   (c) A_I^{-1} P_o^- = A_II^{-1} P_o^- = S_io P_o^-
///   (proj) S_io P_o^+ = 0, S_io P_i^- = P_i^-, S_oi P_i^+ = 0, S_oi P_o^- = P_o^-
///   (trace) P_i^- S_io f = S_io f and P_o^-(S_io f - f) = 0
///   (d) A_I S_io f = A_II S_io f = P_o^- f
///   (e) (A_I^gen)^{-1} = S_io D + D S~_oi - D for alpha in {1/2, 1, 2}
///   (f) g = P_o^- f satisfies g = S_oi g and Aug_* (S_io g) = (g, 0)
/// Each residual is compared against tol * (1 + norms of the factors involved).
/// The alpha of `params` is ignored; (a)-(d), (f) use alpha = 1.
inline void append_identity_checks(IdentityReport& report, Geometry geom, int mode, const MediumParams& params,
                                   const EigenvalueHook& hook = {}) {
  params.validate();
  MediumParams p = params;
  p.alpha = 1.0;
  const auto ri = modal_radial(geom, mode, p.kappa_i());
  const auto ro = modal_radial(geom, mode, p.kappa_o());
  const ModeBlocks b = compute_mode_blocks(ri, ro, 1.0, hook);
  const SobolevWeight wt{NormChoice::TraceNorm, geom, p.k};
  detail::CheckSink sink(report, wt, mode);
  const Mat2 I = Mat2::identity();
  const auto& c = b.cal;

  const Mat2 AIinv = detail::inverse_or_inf(b.A_I);
  const Mat2 AIIinv = detail::inverse_or_inf(b.A_II);
  const double nAIinv = sink.n(AIinv), nAIIinv = sink.n(AIIinv);
  const double nSio = sink.n(b.S_io.S), nSoi = sink.n(b.S_oi.S);
  const double nPom = sink.n(c.Pminus_o), nPop = sink.n(c.Pplus_o);
  const double nPim = sink.n(c.Pminus_i), nPip = sink.n(c.Pplus_i);

  sink.add("a", "A_I^-1 = S_io + S_oi - I", AIinv - (b.S_io.S + b.S_oi.S - I), 1.0 + nAIinv + nSio + nSoi);
  sink.add("b", "A_II^-1 = I - S_io - S_oi + 2 S_io S_oi",
           AIIinv - (I - b.S_io.S - b.S_oi.S + 2.0 * (b.S_io.S * b.S_oi.S)),
           1.0 + nAIIinv + nSio + nSoi + 2.0 * nSio * nSoi);
  sink.add("c", "A_I^-1 P_o^- = S_io P_o^-", AIinv * c.Pminus_o - b.S_io.S * c.Pminus_o,
           1.0 + (nAIinv + nSio) * nPom);
  sink.add("c", "A_II^-1 P_o^- = S_io P_o^-", AIIinv * c.Pminus_o - b.S_io.S * c.Pminus_o,
           1.0 + (nAIIinv + nSio) * nPom);
  sink.add("proj", "S_io P_o^+ = 0", b.S_io.S * c.Pplus_o, 1.0 + nSio * nPop);
  sink.add("proj", "S_io P_i^- = P_i^-", b.S_io.S * c.Pminus_i - c.Pminus_i, 1.0 + nSio * nPim + nPim);
  sink.add("proj", "S_oi P_i^+ = 0", b.S_oi.S * c.Pplus_i, 1.0 + nSoi * nPip);
  sink.add("proj", "S_oi P_o^- = P_o^-", b.S_oi.S * c.Pminus_o - c.Pminus_o, 1.0 + nSoi * nPom + nPom);

  const double nAI = sink.n(b.A_I), nAII = sink.n(b.A_II);
  for (int which = 0; which < 2; ++which) {
    const Vec2 f = detail::probe_vector(mode, which);
    const double nf = sink.n(f);
    const Vec2 phi = b.S_io.S * f;
    sink.add("trace", "P_i^- S_io f = S_io f", c.Pminus_i * phi - phi, nf * (1.0 + nPim) * (1.0 + nSio));
    sink.add("trace", "P_o^- (S_io f - f) = 0", c.Pminus_o * (phi - f), nf * nPom * (2.0 + nSio));
    sink.add("d", "A_I S_io f = P_o^- f", b.A_I * phi - c.Pminus_o * f, nf * (1.0 + nAI * nSio + nPom));
    sink.add("d", "A_II S_io f = P_o^- f", b.A_II * phi - c.Pminus_o * f, nf * (1.0 + nAII * nSio + nPom));

    const Vec2 g = c.Pminus_o * f;
    const double ng = sink.n(g);
    const Vec2 psi = b.S_io.S * g;
    Vec4 target;
    target(0, 0) = g(0, 0);
    target(1, 0) = g(1, 0);
    sink.add("f", "g = S_oi g for g = P_o^- f", b.S_oi.S * g - g, ng * (1.0 + nSoi));
    sink.add("f", "Aug_I S_io g = (g, 0)", assemble_augmented_mode(b.A_I, c.Pplus_i) * psi - target,
             ng * (1.0 + (nAI + nPip) * nSio));
    sink.add("f", "Aug_II S_io g = (g, 0)", assemble_augmented_mode(b.A_II, c.Pplus_i) * psi - target,
             ng * (1.0 + (nAII + nPip) * nSio));
  }

  for (double a : kGenAlphas) {
    const Mat2 D = Mat2::diagonal(1.0, a);
    const Mat2 Agen = assemble_AIgen_mode(c.Pminus_o, c.Pplus_i, a);
    const ModalSolutionOp Sio = solution_operator_mode(ri, ro, a);
    const ModalSolutionOp Stoi = solution_operator_mode(ro, ri, 1.0 / a);
    const Mat2 inv = detail::inverse_or_inf(Agen);
    const double nD = std::max(1.0, a);
    sink.add("e", "(A_I^gen)^-1 = S_io D + D S~_oi - D (alpha = " + std::to_string(a) + ")",
             inv - (Sio.S * D + D * Stoi.S - D),
             1.0 + sink.n(inv) + nD * (sink.n(Sio.S) + sink.n(Stoi.S) + 1.0));
  }
}

inline IdentityReport verify_identities(const MediumParams& params, Geometry geom, int mode, double tol = 1e-8,
                                        const EigenvalueHook& hook = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("verify_identities: tol must be > 0");
  IdentityReport r;
  r.geometry = geom;
  r.params = params;
  r.tol = tol;
  append_identity_checks(r, geom, mode, params, hook);
  return r;
}

/// All modes 0..maxOrder at one parameter set.
inline IdentityReport verify_identities_upto(const MediumParams& params, Geometry geom, int maxOrder,
                                             double tol = 1e-8, const EigenvalueHook& hook = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("verify_identities: tol must be > 0");
  IdentityReport r;
  r.geometry = geom;
  r.params = params;
  r.tol = tol;
  for (int m = 0; m <= maxOrder; ++m) append_identity_checks(r, geom, m, params, hook);
  return r;
}

}  // namespace tbie
