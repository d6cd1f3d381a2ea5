#pragma once

// Cylindrical and spherical Bessel/Hankel functions of integer order and real
// positive argument, together with their first derivatives.
//
// J_m / j_l come from Miller's backward recurrence, normalised with the
// Neumann sum (cylindrical) or a closed-form low-order value (spherical).
// Y_0, Y_1 are taken from the Neumann series in the already-computed J_{2k},
// y_0, y_1 from their closed forms, and both continue by forward recurrence.
// Derivatives follow from f'_m = f_{m-1} - (m/x) f_m (cylindrical) and
// f'_l = f_{l-1} - ((l+1)/x) f_l (spherical).
//
// Everything is templated on the real type so the same code runs in double
// and in long double (the latter keeps Y_m finite far into the regime where
// it overflows a double).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbie::specfun {

inline constexpr int kDefaultMaxOrder = 150;

/// Thrown when Y_m(x) (or y_l(x)) leaves the representable range of the real type.
class OverflowError : public std::overflow_error {
 public:
  OverflowError(int order, double argument)
      : std::overflow_error("Bessel Y of order " + std::to_string(order) + " overflows at x = " +
                            std::to_string(argument)),
        order_(order),
        argument_(argument) {}
  int order() const noexcept { return order_; }
  double argument() const noexcept { return argument_; }

 private:
  int order_;
  double argument_;
};

template <class Real>
struct CylTriple {
  int order = 0;
  Real argument = 0;
  Real J = 0;
  Real Jp = 0;
  std::complex<Real> H;   // H^{(1)}_m = J_m + i Y_m
  std::complex<Real> Hp;

  Real Y() const { return H.imag(); }
  Real Yp() const { return Hp.imag(); }
};

template <class Real>
struct SphTriple {
  int order = 0;
  Real argument = 0;
  Real j = 0;
  Real jp = 0;
  std::complex<Real> h;   // h^{(1)}_l = j_l + i y_l
  std::complex<Real> hp;

  Real y() const { return h.imag(); }
  Real yp() const { return hp.imag(); }
};

namespace detail {

template <class Real>
void check_argument(Real x) {
  if (!(x > Real(0)) || !std::isfinite(x)) {
    throw std::domain_error("Bessel argument must be finite and > 0");
  }
}

inline void check_order(int order, int max_order) {
  if (order < 0) throw std::domain_error("Bessel order must be >= 0");
  if (order > max_order) {
    throw std::domain_error("Bessel order " + std::to_string(order) + " exceeds configured maximum " +
                            std::to_string(max_order));
  }
}

// Headroom kept below max() so that derivatives and the products the modal
// formulas form with Y stay finite.
template <class Real>
constexpr Real overflow_limit() {
  return std::numeric_limits<Real>::max() / Real(1e20);
}

// Start order for Miller's recurrence: far enough past both the largest
// requested order and the turning point x that the discarded tail is below
// the working precision.
template <class Real>
int miller_start(int nmax, Real x) {
  const double xd = static_cast<double>(x);
  const double top = std::max(static_cast<double>(nmax), xd);
  const double digits = static_cast<double>(std::numeric_limits<Real>::digits10);
  const double margin = 2.0 * digits + 16.0 * std::cbrt(std::max(xd, 1.0));
  int start = static_cast<int>(std::ceil(top + margin)) + 2;
  if (start % 2) ++start;
  return start;
}

// Unnormalised backward recurrence f_{n-1} = (c(n)/x) f_n - f_{n+1} with
// f_{start+1} = 0, f_start = 1. Entries are rescaled on the fly so nothing
// overflows; entries that fall below the range simply underflow to zero.
template <class Real, class Coef>
std::vector<Real> backward_recurrence(int start, Real x, Coef coef) {
  const Real big = std::sqrt(std::numeric_limits<Real>::max());
  std::vector<Real> f(static_cast<std::size_t>(start) + 2, Real(0));
  f[start] = Real(1);
  for (int n = start; n >= 1; --n) {
    f[n - 1] = coef(n) / x * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > big) {
      for (int i = n - 1; i <= start; ++i) f[i] /= big;
    }
  }
  return f;
}

}  // namespace detail

/// J_n(x) for n = 0..nmax (inclusive), by Miller's algorithm.
template <class Real>
std::vector<Real> bessel_j_sequence(int nmax, Real x) {
  detail::check_argument(x);
  const int start = detail::miller_start(nmax, x);
  auto f = detail::backward_recurrence(start, x, [](int n) { return Real(2 * n); });
  // J_0 + 2 sum_k J_{2k} = 1
  Real norm = f[0];
  for (int n = 2; n <= start; n += 2) norm += Real(2) * f[n];
  for (auto& v : f) v /= norm;
  f.resize(static_cast<std::size_t>(start) + 1);
  return f;  // holds orders 0..start; callers only rely on 0..nmax
}

/// Cylindrical triples for orders 0..nmax. The result is truncated before the
/// first order whose Y overflows, so its size tells the caller how far it got.
template <class Real>
std::vector<CylTriple<Real>> cyl_sequence(int nmax, Real x) {
  detail::check_argument(x);
  if (nmax < 0) throw std::domain_error("Bessel order must be >= 0");
  const std::vector<Real> J = bessel_j_sequence(std::max(nmax, 1) + 1, x);
  const int top = static_cast<int>(J.size()) - 1;

  constexpr Real pi = std::numbers::pi_v<Real>;
  constexpr Real euler = std::numbers::egamma_v<Real>;
  const Real lg = std::log(x / Real(2)) + euler;

  // Neumann series: Y_0 from J_{2k}; Y_1 = -Y_0' termwise.
  Real s0 = 0;
  Real s1 = 0;
  for (int k = 1; 2 * k <= top; ++k) {
    const Real sgn = (k % 2) ? Real(-1) : Real(1);
    s0 += sgn * J[2 * k] / Real(k);
    const Real next = (2 * k + 1 <= top) ? J[2 * k + 1] : Real(0);
    s1 += sgn * (J[2 * k - 1] - next) / Real(k);
  }
  const Real Y0 = Real(2) / pi * lg * J[0] - Real(4) / pi * s0;
  const Real Y1 = Real(2) / pi * lg * J[1] - Real(2) / pi * J[0] / x + Real(2) / pi * s1;

  // Forward recurrence for Y up to nmax + 1 (needed for Y'_0 only at n = 0).
  std::vector<Real> Y;
  Y.reserve(static_cast<std::size_t>(nmax) + 2);
  Y.push_back(Y0);
  Y.push_back(Y1);
  const Real limit = detail::overflow_limit<Real>();
  for (int n = 1; n < nmax && std::abs(Y.back()) <= limit; ++n) {
    Y.push_back(Real(2 * n) / x * Y[n] - Y[n - 1]);
  }

  std::vector<CylTriple<Real>> out;
  out.reserve(static_cast<std::size_t>(nmax) + 1);
  for (int m = 0; m <= nmax; ++m) {
    if (m >= static_cast<int>(Y.size()) || !(std::abs(Y[m]) <= limit)) break;
    CylTriple<Real> t;
    t.order = m;
    t.argument = x;
    t.J = J[m];
    Real Yp;
    if (m == 0) {
      t.Jp = -J[1];
      Yp = -Y[1];
    } else {
      t.Jp = J[m - 1] - Real(m) / x * J[m];
      Yp = Y[m - 1] - Real(m) / x * Y[m];
    }
    if (!(std::abs(Yp) <= limit)) break;
    t.H = {t.J, Y[m]};
    t.Hp = {t.Jp, Yp};
    out.push_back(t);
  }
  return out;
}

/// J_m, J'_m, H^{(1)}_m, H^{(1)'}_m at x > 0.
template <class Real = double>
CylTriple<Real> cyl_pair(int m, Real x, int max_order = kDefaultMaxOrder) {
  detail::check_order(m, max_order);
  detail::check_argument(x);
  auto seq = cyl_sequence(m, x);
  if (static_cast<int>(seq.size()) <= m) throw OverflowError(m, static_cast<double>(x));
  return seq[m];
}

/// j_l(x) for l = 0..lmax.
template <class Real>
std::vector<Real> spherical_j_sequence(int lmax, Real x) {
  detail::check_argument(x);
  const int start = detail::miller_start(lmax, x);
  auto f = detail::backward_recurrence(start, x, [](int n) { return Real(2 * n + 1); });
  const Real s = std::sin(x);
  const Real c = std::cos(x);
  const Real j0 = s / x;
  const Real j1 = s / (x * x) - c / x;
  // Normalise against whichever closed form is larger; they never vanish together.
  const Real scale = (std::abs(j0) >= std::abs(j1)) ? j0 / f[0] : j1 / f[1];
  for (auto& v : f) v *= scale;
  f.resize(static_cast<std::size_t>(start) + 1);
  return f;
}

/// Spherical triples for orders 0..lmax, truncated before the first overflow of y_l.
template <class Real>
std::vector<SphTriple<Real>> sph_sequence(int lmax, Real x) {
  detail::check_argument(x);
  if (lmax < 0) throw std::domain_error("Bessel order must be >= 0");
  const std::vector<Real> j = spherical_j_sequence(std::max(lmax, 1) + 1, x);

  const Real s = std::sin(x);
  const Real c = std::cos(x);
  std::vector<Real> y;
  y.reserve(static_cast<std::size_t>(lmax) + 2);
  y.push_back(-c / x);
  y.push_back(-c / (x * x) - s / x);
  const Real limit = detail::overflow_limit<Real>();
  for (int l = 1; l < lmax && std::abs(y.back()) <= limit; ++l) {
    y.push_back(Real(2 * l + 1) / x * y[l] - y[l - 1]);
  }

  std::vector<SphTriple<Real>> out;
  out.reserve(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) {
    if (l >= static_cast<int>(y.size()) || !(std::abs(y[l]) <= limit)) break;
    SphTriple<Real> t;
    t.order = l;
    t.argument = x;
    t.j = j[l];
    Real yp;
    if (l == 0) {
      t.jp = -j[1];
      yp = -y[1];
    } else {
      t.jp = j[l - 1] - Real(l + 1) / x * j[l];
      yp = y[l - 1] - Real(l + 1) / x * y[l];
    }
    if (!(std::abs(yp) <= limit)) break;
    t.h = {t.j, y[l]};
    t.hp = {t.jp, yp};
    out.push_back(t);
  }
  return out;
}

/// j_l, j'_l, h^{(1)}_l, h^{(1)'}_l at x > 0.
template <class Real = double>
SphTriple<Real> sph_pair(int l, Real x, int max_order = kDefaultMaxOrder) {
  detail::check_order(l, max_order);
  detail::check_argument(x);
  auto seq = sph_sequence(l, x);
  if (static_cast<int>(seq.size()) <= l) throw OverflowError(l, static_cast<double>(x));
  return seq[l];
}

}  // namespace tbie::specfun
