#pragma once

// Matrix convolution kernels described through their analytic transform
// K^(nu) = int K(x) e^{-nu x} dx. Every family returns exact Taylor
// coefficients of K^ around a point, so moments and convolution of
// quasi-polynomials never require x-space quadrature.

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cm/quasipoly.hpp"
#include "cm/series.hpp"

namespace cm {

struct KernelModel;

// c (x-b)^p e^{-a (x-b)^2}, a > 0
struct GaussianTerm {
  MatC c;
  double a = 1.0;
  double b = 0.0;
  int p = 0;
};

// c e^{-a |x-b|}, a > 0
struct ExponentialTerm {
  MatC c;
  double a = 1.0;
  double b = 0.0;
};

// A delta(x - xi)
struct DiracTerm {
  MatC A;
  double xi = 0.0;
};

struct GaussianMixture {
  std::vector<GaussianTerm> terms;
};
struct ExponentialMixture {
  std::vector<ExponentialTerm> terms;
};
struct DiracMixture {
  std::vector<DiracTerm> terms;
};

// K^(nu) = Den(nu)^{-1} Num(nu) Base^(nu); polynomials by ascending power.
// Covers preconditioned symbols M/(M - p(nu)) and (c nu - D)^{-1} K0^(nu).
struct RationalSymbol {
  std::vector<MatC> numerator;
  std::vector<MatC> denominator;
  std::shared_ptr<const KernelModel> base;  // null: identity
};

// Transform supplied as a closure, analytic for |Re nu| < width.
// Derivatives use a Cauchy-contour rule unless `derivative` is given.
struct ClosureSymbol {
  std::function<MatC(cplx)> symbol;
  std::function<MatC(cplx, int)> derivative;
  double width = 1.0;
};

using KernelPart = std::variant<GaussianMixture, ExponentialMixture, DiracMixture, RationalSymbol, ClosureSymbol>;

// Sum of parts.
struct KernelModel {
  int n = 1;
  double eta0 = 1.0;
  std::vector<KernelPart> parts;
};

KernelModel gaussian_kernel(cplx c, double a, double b = 0.0, int p = 0, double eta0 = 10.0);
KernelModel exponential_kernel(cplx c, double a, double b = 0.0);
KernelModel dirac_kernel(cplx A, double xi, double eta0 = 10.0);
KernelModel kernel_sum(const KernelModel& a, const KernelModel& b);
KernelModel kernel_scaled(const KernelModel& k, cplx s);
KernelModel kernel_scaled(const KernelModel& k, const MatC& s);  // left multiplication

// Taylor coefficients T_k = K^{(k)}(nu)/k!, k = 0..order.
MatSeries transform_series(const KernelModel& K, cplx nu, int order);
// d^order/dnu^order K^(nu)
MatC transform(const KernelModel& K, cplx nu, int order = 0);
// int x^m K(x) e^{-nu x} dx = (-1)^m transform(K, nu, m)
MatC moment(const KernelModel& K, int m, cplx nu);
// K * u for quasi-polynomial u
QuasiPolynomial convolve_qp(const KernelModel& K, const QuasiPolynomial& u);

struct H1Report {
  bool ok = true;
  double certified_width = 0.0;
  bool decays = true;
  std::vector<cplx> poles;
  std::vector<std::string> messages;
};
H1Report validate_h1(const KernelModel& K);

bool kernel_is_real(const KernelModel& K);
// +1 even, -1 odd, 0 neither (compares K^(nu) with K^(-nu)).
int kernel_parity(const KernelModel& K);
bool kernel_has_dirac(const KernelModel& K);

// x-space values on the grid j*h, |j*h| <= half_width. Closed forms are
// evaluated directly; symbols by trapezoidal inverse transform. Dirac parts
// are rejected.
std::vector<MatC> tabulate_kernel(const KernelModel& K, double h, double half_width);
// Half-width beyond which |K| < tol * (kernel mass), for quadrature truncation.
double kernel_support_halfwidth(const KernelModel& K, double tol = 1e-10);

}  // namespace cm
