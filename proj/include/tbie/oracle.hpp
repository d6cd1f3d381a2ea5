#pragma once

// Nystrom-quadrature cross-check of the circle eigenvalues. Each layer
// operator is applied to the Fourier mode e^{i m theta} on 2N equispaced nodes
// and the result projected back onto the mode.
//
// Kernels are split as k(t) = k1(t) ln(4 sin^2(t/2)) + k2(t) with k1, k2
// analytic; the log part uses Kress' weighted trapezoidal rule, the rest the
// plain trapezoidal rule, giving exponential convergence in N.
//
// The kernels are evaluated with the standard library's cylindrical Bessel
// functions (std::cyl_bessel_j / std::cyl_neumann), so nothing here shares
// code with tbie::specfun.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbie/small_matrix.hpp"

namespace tbie::oracle {

enum class Kernel { V, K, Kp };

enum class RuleKind { Trapezoid, LogSplit };

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMinNodesHalf = 8;
inline constexpr int kMaxNodesHalf = 4096;

/// 2N equispaced nodes on [0, 2 pi) with weights for integration against a
/// smooth function (Trapezoid) or against ln(4 sin^2((t - 0)/2)) times a
/// smooth function (LogSplit, singularity at t = 0).
struct QuadratureRule {
  RuleKind kind = RuleKind::Trapezoid;
  int N = kMinNodesHalf;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadratureRule make_rule(RuleKind kind, int N) {
  if (N < kMinNodesHalf) throw std::invalid_argument("quadrature rule needs N >= 8");
  constexpr double pi = std::numbers::pi;
  QuadratureRule q;
  q.kind = kind;
  q.N = N;
  q.nodes.resize(2 * static_cast<std::size_t>(N));
  q.weights.resize(q.nodes.size());
  for (int j = 0; j < 2 * N; ++j) {
    const double t = pi * j / N;
    q.nodes[j] = t;
    if (kind == RuleKind::Trapezoid) {
      q.weights[j] = pi / N;
    } else {
      double s = 0.0;
      for (int m = 1; m < N; ++m) s += std::cos(m * t) / m;
      q.weights[j] = -2.0 * pi / N * s - pi / (static_cast<double>(N) * N) * std::cos(N * t);
    }
  }
  return q;
}

namespace detail {

struct SplitKernel {
  cplx log_part;     // k1
  cplx smooth_part;  // k2
};

// Kernel pieces at offset t = theta_y - theta_x on the unit circle, with x at
// angle 0 and y = (cos t, sin t). The normals are n(x) = x, n(y) = y.
inline SplitKernel split_kernel(Kernel kernel, double kappa, double t) {
  constexpr double pi = std::numbers::pi;
  constexpr double euler = std::numbers::egamma;
  const cplx I(0.0, 1.0);
  const double yx = std::cos(t) - 1.0, yy = std::sin(t);  // y - x
  const double r = std::hypot(yx, yy);
  const double logfac = std::log(4.0 * std::sin(t / 2) * std::sin(t / 2));
  const bool at_origin = r < 1e-14;

  if (kernel == Kernel::V) {
    // Phi = (i/4) H_0(kappa r);  Y_0 = (2/pi) ln(kappa r / 2) J_0 + ...
    if (at_origin) {
      return {-1.0 / (4.0 * pi), I / 4.0 - (std::log(kappa / 2.0) + euler) / (2.0 * pi)};
    }
    const double kr = kappa * r;
    const cplx phi = I / 4.0 * cplx(std::cyl_bessel_j(0.0, kr), std::cyl_neumann(0.0, kr));
    const cplx k1 = -std::cyl_bessel_j(0.0, kr) / (4.0 * pi);
    return {k1, phi - k1 * logfac};
  }

  // d Phi / dn = -(i kappa / 4) H_1(kappa r) (d r / dn); Y_1 carries (2/pi) ln(kappa r / 2) J_1.
  // K differentiates in y along n(y), K' in x along n(x).
  const double dr_dn = kernel == Kernel::K ? (yx * std::cos(t) + yy * std::sin(t)) / r  // (y-x).n(y)/r
                                           : (-yx * 1.0 - yy * 0.0) / r;                  // (x-y).n(x)/r
  if (at_origin) {
    // Laplace limit with unit curvature.
    return {0.0, -1.0 / (4.0 * pi)};
  }
  const double kr = kappa * r;
  const double J1 = std::cyl_bessel_j(1.0, kr);
  const cplx H1(J1, std::cyl_neumann(1.0, kr));
  const cplx kern = -I * kappa / 4.0 * H1 * dr_dn;
  const cplx k1 = kappa / (4.0 * pi) * J1 * dr_dn;
  return {k1, kern - k1 * logfac};
}

inline cplx apply_and_project(Kernel kernel, int m, double kappa, int N) {
  const QuadratureRule log_rule = make_rule(RuleKind::LogSplit, N);
  const QuadratureRule trap = make_rule(RuleKind::Trapezoid, N);
  const int n = 2 * N;
  // Kernel row: the operator is circulant, weights depend on |i - j| mod 2N.
  std::vector<cplx> row(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto s = split_kernel(kernel, kappa, log_rule.nodes[j]);
    row[j] = log_rule.weights[j] * s.log_part + trap.weights[j] * s.smooth_part;
  }
  // (A e_m)(theta_i) = sum_j row[j - i] e_m(theta_j) = e_m(theta_i) sum_j row[j] e_m(theta_j),
  // so every node gives the same ratio.
  cplx proj = 0.0;
  for (int j = 0; j < n; ++j) proj += row[j] * std::polar(1.0, m * log_rule.nodes[j]);
  return proj;
}

}  // namespace detail

/// Smallest |J_m(kappa)| tolerated; keeps v away from zero for the W identity.
inline constexpr double kMinAbsJ = 1e-6;

/// Eigenvalue of V, K or K' on mode m at wavenumber kappa. N starts at
/// `n_start` and doubles until two successive values agree to 1e-10.
inline cplx quadrature_eigenvalue(Kernel kernel, int m, double kappa, int n_start = 32) {
  if (m < 0) throw std::invalid_argument("quadrature_eigenvalue: mode must be >= 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("quadrature_eigenvalue: kappa must be > 0");
  if (n_start < 32) throw std::invalid_argument("quadrature_eigenvalue: N must be >= 32");
  if (std::abs(std::cyl_bessel_j(static_cast<double>(m), kappa)) < kMinAbsJ) {
    throw std::invalid_argument("quadrature_eigenvalue: kappa too close to a zero of J_m");
  }
  constexpr double tol = 1e-10;
  cplx prev = detail::apply_and_project(kernel, m, kappa, n_start);
  for (int N = 2 * n_start; N <= kMaxNodesHalf; N *= 2) {
    const cplx next = detail::apply_and_project(kernel, m, kappa, N);
    if (std::abs(next - prev) <= tol * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw OracleError("quadrature_eigenvalue: no convergence by N = " + std::to_string(kMaxNodesHalf));
}

/// W eigenvalue from K^2 + V W = 1/4.
inline cplx hypersingular_from_calderon(cplx v, cplx kk) {
  if (std::abs(v) <= 1e-10) throw std::domain_error("hypersingular_from_calderon: |v| too small");
  return (0.25 - kk * kk) / v;
}

}  // namespace tbie::oracle
