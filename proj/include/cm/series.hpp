#pragma once

// Truncated Taylor series in a local variable h: sum_k c_k h^k, k = 0..order.
// Scalar-valued series are templated on the scalar; matrix-valued series are
// plain vectors of Eigen matrices with the helpers below.

#include <Eigen/Dense>

#include "cm/numerics.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace cm {

template <typename Scalar>
struct Series {
  std::vector<Scalar> c;

  Series() = default;
  explicit Series(int order, Scalar c0 = Scalar(0)) : c(order + 1, Scalar(0)) { c[0] = c0; }

  int order() const { return static_cast<int>(c.size()) - 1; }
  Scalar& operator[](int k) { return c[k]; }
  const Scalar& operator[](int k) const { return c[k]; }

  // x0 + h
  static Series variable(int order, Scalar x0) {
    Series s(order, x0);
    if (order >= 1) s.c[1] = Scalar(1);
    return s;
  }
};

template <typename S>
Series<S> operator+(Series<S> a, const Series<S>& b) {
  for (int k = 0; k <= a.order(); ++k) a[k] += b[k];
  return a;
}

template <typename S>
Series<S> operator-(Series<S> a, const Series<S>& b) {
  for (int k = 0; k <= a.order(); ++k) a[k] -= b[k];
  return a;
}

template <typename S>
Series<S> operator*(S s, Series<S> a) {
  for (auto& v : a.c) v *= s;
  return a;
}

template <typename S>
Series<S> operator*(const Series<S>& a, const Series<S>& b) {
  Series<S> r(a.order());
  for (int k = 0; k <= a.order(); ++k)
    for (int j = 0; j <= k; ++j) r[k] += a[j] * b[k - j];
  return r;
}

// exp(f) via k s_k = sum_{j=1}^k j f_j s_{k-j}.
template <typename S>
Series<S> exp(const Series<S>& f) {
  Series<S> s(f.order(), std::exp(f[0]));
  for (int k = 1; k <= f.order(); ++k) {
    S acc(0);
    for (int j = 1; j <= k; ++j) acc += S(j) * f[j] * s[k - j];
    s[k] = acc / S(k);
  }
  return s;
}

// 1/f, requires f[0] != 0.
template <typename S>
Series<S> reciprocal(const Series<S>& f) {
  Series<S> r(f.order(), S(1) / f[0]);
  for (int k = 1; k <= f.order(); ++k) {
    S acc(0);
    for (int j = 1; j <= k; ++j) acc += f[j] * r[k - j];
    r[k] = -acc / f[0];
  }
  return r;
}

// Series of the derivative, truncated to order - 1.
template <typename S>
Series<S> derivative(const Series<S>& f) {
  Series<S> d(f.order() > 0 ? f.order() - 1 : 0);
  for (int k = 0; k < f.order(); ++k) d[k] = S(k + 1) * f[k + 1];
  if (f.order() == 0) d[0] = S(0);
  return d;
}

// Same series with a different truncation order.
template <typename S>
Series<S> truncate(const Series<S>& f, int order) {
  Series<S> r(order);
  for (int k = 0; k <= order && k <= f.order(); ++k) r[k] = f[k];
  return r;
}

using MatSeries = std::vector<Eigen::MatrixXcd>;

inline MatSeries mat_series_zero(int order, int rows, int cols) {
  return MatSeries(order + 1, Eigen::MatrixXcd::Zero(rows, cols));
}

inline MatSeries mat_series_mul(const MatSeries& a, const MatSeries& b) {
  const int order = static_cast<int>(a.size()) - 1;
  MatSeries r = mat_series_zero(order, a[0].rows(), b[0].cols());
  for (int k = 0; k <= order; ++k)
    for (int j = 0; j <= k; ++j) r[k] += a[j] * b[k - j];
  return r;
}

inline MatSeries mat_series_scale(const Series<std::complex<double>>& s, const MatSeries& a) {
  const int order = static_cast<int>(a.size()) - 1;
  MatSeries r = mat_series_zero(order, a[0].rows(), a[0].cols());
  for (int k = 0; k <= order; ++k)
    for (int j = 0; j <= k; ++j) r[k] += s[j] * a[k - j];
  return r;
}

// Inverse series: a_0 x_k = -sum_{j>=1} a_j x_{k-j}.
inline MatSeries mat_series_inverse(const MatSeries& a) {
  const int order = static_cast<int>(a.size()) - 1;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a[0]);
  MatSeries x(order + 1);
  x[0] = lu.inverse();
  for (int k = 1; k <= order; ++k) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(a[0].rows(), a[0].cols());
    for (int j = 1; j <= k; ++j) acc += a[j] * x[k - j];
    x[k] = -lu.solve(acc);
  }
  return x;
}

// Re-expand a matrix polynomial sum_j P_j nu^j around nu0.
inline MatSeries mat_poly_series(const std::vector<Eigen::MatrixXcd>& poly, std::complex<double> nu0,
                                 int order, int rows, int cols) {
  MatSeries r = mat_series_zero(order, rows, cols);
  for (int j = 0; j < static_cast<int>(poly.size()); ++j) {
    // nu^j = sum_k C(j,k) nu0^{j-k} h^k
    double binom = 1.0;
    for (int k = 0; k <= j && k <= order; ++k) {
      r[k] += binom * ipow(nu0, j - k) * poly[j];
      binom = binom * (j - k) / (k + 1);
    }
  }
  return r;
}

}  // namespace cm
