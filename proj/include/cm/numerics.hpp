#pragma once

// Small numeric helpers: integer powers, binomials, adaptive Gauss-Kronrod.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>

namespace cm {

using cplx = std::complex<double>;

template <typename Scalar>
Scalar ipow(Scalar x, int k) {
  Scalar r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <typename V>
auto magnitude(const V& v) -> decltype(v.norm()) {
  return v.norm();
}

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T, typename F>
std::pair<T, double> gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  T fc = f(c);
  T kron = kWgk[7] * fc;
  T gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    T f1 = f(c - r * kXgk[i]);
    T f2 = f(c + r * kXgk[i]);
    kron += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
  }
  T diff = kron - gauss;
  return {r * kron, std::abs(r) * magnitude(diff)};
}

template <typename T, typename F>
std::pair<T, double> gk_adapt(const F& f, double a, double b, double tol, double floor, int depth, T whole,
                              double err) {
  if (err <= tol || err <= floor || depth <= 0) return {whole, err};
  const double m = 0.5 * (a + b);
  auto left = gk15<T>(f, a, m);
  auto right = gk15<T>(f, m, b);
  auto l = gk_adapt<T>(f, a, m, 0.5 * tol, floor, depth - 1, left.first, left.second);
  auto rr = gk_adapt<T>(f, m, b, 0.5 * tol, floor, depth - 1, right.first, right.second);
  return {l.first + rr.first, l.second + rr.second};
}
}  // namespace detail

// Adaptive G7/K15 quadrature of f over [a, b] to absolute tolerance tol.
// Returns (value, error estimate).
template <typename T, typename F>
std::pair<T, double> integrate(const F& f, double a, double b, double tol, int max_depth = 40) {
  auto first = detail::gk15<T>(f, a, b);
  // local errors below roundoff of the whole integral cannot be resolved further
  const double floor = 1e-15 * detail::magnitude(first.first);
  return detail::gk_adapt<T>(f, a, b, tol, floor, max_depth, first.first, first.second);
}

}  // namespace cm
