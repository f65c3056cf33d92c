#pragma once

// Kernels shared by unit, property and acceptance tests.

#include <cmath>
#include <random>

#include "cm/kernel.hpp"
#include "cm/nonlin.hpp"
#include "cm/numerics.hpp"

namespace cm::fixtures {

// (a + b x) e^{-x^2}, a = -1/sqrt(pi): int K = -1, int x K = b sqrt(pi)/2.
inline constexpr double kSimpleB = 1.0;
inline KernelModel simple_root_kernel(double b = kSimpleB) {
  KernelModel K = gaussian_kernel(-1.0 / std::sqrt(M_PI), 1.0);
  return kernel_sum(K, gaussian_kernel(b, 1.0, 0.0, 1));
}

// Symmetric two-Gaussian kernel whose transform K^(i l) is stationary at l = 1:
// K(x) = c1 e^{-x^2/4} - e^{-0.8 x^2}.
inline constexpr double kModeA1 = 0.25, kModeA2 = 0.8;
inline double mode_c1() {
  const double s1 = 1.0 / (4.0 * kModeA1), s2 = 1.0 / (4.0 * kModeA2);
  return s2 * std::sqrt(M_PI / kModeA2) * std::exp(-s2) / (s1 * std::sqrt(M_PI / kModeA1) * std::exp(-s1));
}
inline KernelModel mode_kernel() {
  return kernel_sum(gaussian_kernel(mode_c1(), kModeA1), gaussian_kernel(-1.0, kModeA2));
}
// mu_c = 1 / K^(i)
inline double mode_mu_c() { return 1.0 / transform(mode_kernel(), cplx(0.0, 1.0)).real()(0, 0); }
// Linear kernel of u + K_eff*u + F = 0: K_eff = -mu_c K
inline KernelModel mode_linear_kernel() { return kernel_scaled(mode_kernel(), cplx(-mode_mu_c())); }

// F = -lambda K*u + (1/3) K*u^3, reflection and sign symmetric.
inline NonlinearitySpec mode_nonlinearity() {
  NonlinearitySpec F;
  F.params = {"lambda"};
  F.kernels["K"] = mode_kernel();
  F.terms.push_back({-1.0, {1}, "K", {{"", 0}}, 0});
  F.terms.push_back({1.0 / 3.0, {0}, "K", {{"", 0}, {"", 0}, {"", 0}}, 0});
  F.declared.reflection = true;
  F.declared.sign = true;
  F.declared.odd_params = {false};
  return F;
}

// F = -u^2
inline NonlinearitySpec quadratic_nonlinearity() {
  NonlinearitySpec F;
  F.terms.push_back({-1.0, {}, "", {{"", 0}, {"", 0}}, 0});
  return F;
}

// Traveling-wave instance: G_0 F_u(0) with K = e^{-x^2}, D = 1, F_u(0) = 1/sqrt(pi).
inline KernelModel wave_linear_kernel() { return gaussian_kernel(-1.0 / std::sqrt(M_PI), 1.0); }

// Adaptive quadrature over [a, b] in unit panels, so narrow features are not
// missed by the first Gauss-Kronrod estimate.
template <typename F>
cplx panel_integral(const F& f, double a, double b, double tol = 1e-14) {
  cplx sum = 0.0;
  for (double x = a; x < b; x += 1.0) sum += integrate<cplx>(f, x, std::min(x + 1.0, b), tol).first;
  return sum;
}

// Random scalar quasi-polynomial with `terms` frequencies and degree <= max_deg.
inline QuasiPolynomial random_qp(std::mt19937& rng, int terms = 3, int max_deg = 3, int n = 1) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> D(0, max_deg);
  std::vector<QpTerm> ts;
  for (int t = 0; t < terms; ++t) {
    QpTerm q{cplx(0.3 * U(rng), 2.0 * U(rng)), {}};
    for (int k = 0, d = D(rng); k <= d; ++k) q.poly.push_back(VecC::NullaryExpr(n, [&] { return cplx(U(rng), U(rng)); }));
    ts.push_back(q);
  }
  return QuasiPolynomial(n, ts);
}

}  // namespace cm::fixtures
