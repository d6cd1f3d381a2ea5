#pragma once

// Fixed-size dense complex matrices for the per-mode blocks (2x2, 4x2, 2x1).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace tbie {

using cplx = std::complex<double>;

template <int Rows, int Cols>
struct SmallMatrix {
  static_assert(Rows > 0 && Cols > 0);
  static constexpr int rows = Rows;
  static constexpr int cols = Cols;

  std::array<cplx, static_cast<std::size_t>(Rows * Cols)> a{};  // row-major

  SmallMatrix() = default;
  SmallMatrix(std::initializer_list<cplx> values) {
    if (values.size() != a.size()) throw std::invalid_argument("SmallMatrix: wrong number of entries");
    std::copy(values.begin(), values.end(), a.begin());
  }

  cplx& operator()(int r, int c) { return a[static_cast<std::size_t>(r * Cols + c)]; }
  const cplx& operator()(int r, int c) const { return a[static_cast<std::size_t>(r * Cols + c)]; }

  static SmallMatrix zero() { return SmallMatrix{}; }
  static SmallMatrix identity() {
    static_assert(Rows == Cols);
    SmallMatrix m;
    for (int i = 0; i < Rows; ++i) m(i, i) = 1.0;
    return m;
  }
  static SmallMatrix diagonal(cplx d0, cplx d1) {
    static_assert(Rows == 2 && Cols == 2);
    return SmallMatrix{d0, 0.0, 0.0, d1};
  }

  SmallMatrix& operator+=(const SmallMatrix& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  SmallMatrix& operator-=(const SmallMatrix& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
    return *this;
  }
  SmallMatrix& operator*=(cplx s) {
    for (auto& x : a) x *= s;
    return *this;
  }

  bool all_finite() const {
    return std::all_of(a.begin(), a.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }
};

using Mat2 = SmallMatrix<2, 2>;
using Mat42 = SmallMatrix<4, 2>;
using Vec2 = SmallMatrix<2, 1>;
using Vec4 = SmallMatrix<4, 1>;

template <int R, int C>
SmallMatrix<R, C> operator+(SmallMatrix<R, C> x, const SmallMatrix<R, C>& y) {
  return x += y;
}
template <int R, int C>
SmallMatrix<R, C> operator-(SmallMatrix<R, C> x, const SmallMatrix<R, C>& y) {
  return x -= y;
}
template <int R, int C>
SmallMatrix<R, C> operator-(SmallMatrix<R, C> x) {
  return x *= -1.0;
}
template <int R, int C>
SmallMatrix<R, C> operator*(cplx s, SmallMatrix<R, C> x) {
  return x *= s;
}
template <int R, int K, int C>
SmallMatrix<R, C> operator*(const SmallMatrix<R, K>& x, const SmallMatrix<K, C>& y) {
  SmallMatrix<R, C> z;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < K; ++k) s += x(i, k) * y(k, j);
      z(i, j) = s;
    }
  return z;
}

template <int R, int C>
SmallMatrix<C, R> adjoint(const SmallMatrix<R, C>& x) {
  SmallMatrix<C, R> y;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) y(j, i) = std::conj(x(i, j));
  return y;
}

/// Vertical stack [top; bottom].
template <int R1, int R2, int C>
SmallMatrix<R1 + R2, C> vstack(const SmallMatrix<R1, C>& top, const SmallMatrix<R2, C>& bottom) {
  SmallMatrix<R1 + R2, C> s;
  for (int j = 0; j < C; ++j) {
    for (int i = 0; i < R1; ++i) s(i, j) = top(i, j);
    for (int i = 0; i < R2; ++i) s(R1 + i, j) = bottom(i, j);
  }
  return s;
}

inline Vec2 vec2(cplx x0, cplx x1) { return Vec2{x0, x1}; }

/// Outer product u v^T (no conjugation).
inline Mat2 outer(const Vec2& u, const Vec2& v) {
  return Mat2{u(0, 0) * v(0, 0), u(0, 0) * v(1, 0), u(1, 0) * v(0, 0), u(1, 0) * v(1, 0)};
}

inline cplx det(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

/// Closed-form (Cramer) inverse. Throws only for an exactly zero or non-finite
/// determinant; near-singular blocks are returned as large finite values.
inline Mat2 inverse(const Mat2& m) {
  const cplx d = det(m);
  if (d == cplx(0.0) || !std::isfinite(std::abs(d))) {
    throw std::domain_error("inverse: singular 2x2 block");
  }
  return Mat2{m(1, 1) / d, -m(0, 1) / d, -m(1, 0) / d, m(0, 0) / d};
}

template <int R, int C>
double max_abs(const SmallMatrix<R, C>& m) {
  double s = 0.0;
  for (const auto& z : m.a) s = std::max(s, std::abs(z));
  return s;
}

template <int R, int C>
double frobenius(const SmallMatrix<R, C>& m) {
  double s = 0.0;
  for (const auto& z : m.a) s += std::norm(z);
  return std::sqrt(s);
}

/// Singular values of an R x 2 complex matrix (R >= 2), descending.
///
/// One-sided (Hestenes) Jacobi: a complex plane rotation orthogonalises the two
/// columns, after which the singular values are the column norms. Both
/// singular values come out with small relative error, including the small
/// one of a nearly rank-deficient block.
template <int R>
std::array<double, 2> svd_small(const SmallMatrix<R, 2>& A) {
  static_assert(R >= 2);
  std::array<cplx, R> x;
  std::array<cplx, R> y;
  for (int i = 0; i < R; ++i) {
    x[i] = A(i, 0);
    y[i] = A(i, 1);
  }
  for (int sweep = 0; sweep < 8; ++sweep) {
    double alpha = 0.0;
    double beta = 0.0;
    cplx gamma = 0.0;
    for (int i = 0; i < R; ++i) {
      alpha += std::norm(x[i]);
      beta += std::norm(y[i]);
      gamma += std::conj(x[i]) * y[i];
    }
    const double g = std::abs(gamma);
    if (g == 0.0 || g <= 1e-17 * std::sqrt(alpha) * std::sqrt(beta)) break;
    const cplx phase = gamma / g;
    const double zeta = (beta - alpha) / (2.0 * g);
    const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;
    for (int i = 0; i < R; ++i) {
      const cplx yp = y[i] * std::conj(phase);
      const cplx xn = c * x[i] - s * yp;
      const cplx yn = s * x[i] + c * yp;
      x[i] = xn;
      y[i] = yn;
    }
  }
  auto colnorm = [](const std::array<cplx, R>& v) {
    double scale = 0.0;
    for (const auto& z : v) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z / scale);
    return scale * std::sqrt(s);
  };
  double s0 = colnorm(x);
  double s1 = colnorm(y);
  if (s0 < s1) std::swap(s0, s1);
  return {s0, s1};
}

template <int R>
double spectral_norm(const SmallMatrix<R, 2>& A) {
  return svd_small(A)[0];
}

}  // namespace tbie
