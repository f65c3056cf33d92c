#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cm/errors.hpp"
#include "cm/kernel.hpp"
#include "fixtures.hpp"

using namespace cm;

namespace {

std::vector<KernelModel> closed_form_kernels() {
  return {fixtures::simple_root_kernel(), fixtures::mode_kernel(), exponential_kernel(0.7, 1.5, 0.2),
          kernel_sum(gaussian_kernel(cplx(0.5, 0.2), 2.0, -0.3, 2), exponential_kernel(-0.4, 2.5))};
}

// d/dnu of the (m-1)-th transform derivative: central difference with one
// Richardson step.
MatC fd_derivative(const KernelModel& K, cplx nu, int m) {
  auto cd = [&](double h) { return ((transform(K, nu + h, m - 1) - transform(K, nu - h, m - 1)) / (2.0 * h)).eval(); };
  const double h = 1e-3;
  return (4.0 * cd(h / 2) - cd(h)) / 3.0;
}

// int K(x - y) u(y) dy by adaptive quadrature on a wide interval.
cplx convolve_direct(const std::function<double(double)>& k, const QuasiPolynomial& u, double x) {
  auto f = [&](double y) { return cplx(k(x - y)) * qp_eval(u, y)(0); };
  return fixtures::panel_integral(f, x - 40.0, x + 40.0, 1e-13);
}

}  // namespace

TEST_CASE("gaussian transform closed form") {
  const auto K = gaussian_kernel(1.0, 0.5);
  for (double l : {0.0, 0.7, 2.0}) {
    const cplx expect = std::sqrt(M_PI / 0.5) * std::exp(-l * l / 2.0);
    CHECK(std::abs(transform(K, cplx(0.0, l))(0, 0) - expect) < 1e-13);
  }
  CHECK(std::abs(moment(fixtures::simple_root_kernel(), 0, 0.0)(0, 0) + 1.0) < 1e-14);
  CHECK(std::abs(moment(fixtures::simple_root_kernel(), 1, 0.0)(0, 0) - std::sqrt(M_PI) / 2.0) < 1e-14);
}

TEST_CASE("moments agree with finite differences of the transform") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-0.4, 0.4), V(-2.0, 2.0);
  for (const auto& K : closed_form_kernels())
    for (int t = 0; t < 4; ++t) {
      const cplx nu(U(rng), V(rng));
      for (int m = 1; m <= 5; ++m) {
        const MatC fd = (m % 2 ? -1.0 : 1.0) * fd_derivative(K, nu, m);
        const MatC exact = moment(K, m, nu);
        CHECK((fd - exact).norm() <= 1e-6 * std::max(1.0, exact.norm()));
      }
    }
}

TEST_CASE("symbol kernels differentiate consistently") {
  RationalSymbol s;
  s.numerator = {MatC::Constant(1, 1, 0.0), MatC::Constant(1, 1, -1.0)};
  s.denominator = {MatC::Identity(1, 1)};
  s.base = std::make_shared<KernelModel>(gaussian_kernel(1.0, 1.0));
  KernelModel G;
  G.eta0 = 10.0;
  G.parts.push_back(s);
  ClosureSymbol c;
  c.symbol = [](cplx nu) { return MatC::Constant(1, 1, -nu * std::sqrt(M_PI) * std::exp(nu * nu / 4.0)); };
  c.width = 5.0;
  KernelModel H;
  H.eta0 = 5.0;
  H.parts.push_back(c);
  for (int m = 0; m <= 5; ++m) {
    const cplx nu(0.1, 0.8);
    const MatC a = transform(G, nu, m), b = transform(H, nu, m);
    CHECK((a - b).norm() < 1e-9 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("quasi-polynomial convolution agrees with quadrature") {
  std::mt19937 rng(12);
  const std::vector<std::pair<KernelModel, std::function<double(double)>>> cases = {
      {fixtures::simple_root_kernel(), [](double x) { return (-1.0 / std::sqrt(M_PI) + x) * std::exp(-x * x); }},
      {exponential_kernel(0.7, 1.5), [](double x) { return 0.7 * std::exp(-1.5 * std::abs(x)); }},
      {fixtures::mode_kernel(),
       [](double x) { return fixtures::mode_c1() * std::exp(-0.25 * x * x) - std::exp(-0.8 * x * x); }}};
  for (const auto& [K, k] : cases)
    for (int t = 0; t < 3; ++t) {
      // frequencies inside the strip of the exponential kernel
      auto u = fixtures::random_qp(rng, 2, 3);
      const auto Ku = convolve_qp(K, u);
      for (double x = -5.0; x <= 5.0; x += 2.5) {
        const cplx direct = convolve_direct(k, u, x);
        CHECK(std::abs(qp_eval(Ku, x)(0) - direct) < 1e-7 * std::max(1.0, std::abs(direct)));
      }
    }
}

TEST_CASE("convolution is linear") {
  std::mt19937 rng(13);
  const auto K = fixtures::mode_kernel();
  for (int t = 0; t < 5; ++t) {
    const auto u = fixtures::random_qp(rng), v = fixtures::random_qp(rng);
    const cplx a(0.3, -1.2), b(-0.7, 0.1);
    const auto lhs = convolve_qp(K, qp_add(qp_scale(u, a), qp_scale(v, b)));
    const auto rhs = qp_add(qp_scale(convolve_qp(K, u), a), qp_scale(convolve_qp(K, v), b));
    CHECK(qp_distance(lhs, rhs) < 1e-10 * (1.0 + qp_norm(lhs)));
  }
}

TEST_CASE("symmetric kernel moment law") {
  const auto K = fixtures::mode_kernel();
  for (int m1 = 0; m1 <= 5; ++m1)
    for (int m2 : {1, 3}) {
      const cplx p = moment(K, m1, cplx(0.0, m2))(0, 0), q = moment(K, m1, cplx(0.0, -m2))(0, 0);
      const double s = 1e-12 * std::max(1.0, std::abs(p));
      if (m1 % 2 == 0) {
        CHECK(std::abs(p - q) < s);
        CHECK(std::abs(p.imag()) < s);
      } else {
        CHECK(std::abs(p + q) < s);
        CHECK(std::abs(p.real()) < s);
      }
    }
}

TEST_CASE("structural probes") {
  CHECK(kernel_parity(fixtures::mode_kernel()) == 1);
  CHECK(kernel_parity(gaussian_kernel(1.0, 1.0, 0.0, 1)) == -1);
  CHECK(kernel_parity(fixtures::simple_root_kernel()) == 0);
  CHECK(kernel_is_real(fixtures::mode_kernel()));
  CHECK_FALSE(kernel_is_real(gaussian_kernel(cplx(0, 1), 1.0)));
  CHECK(kernel_has_dirac(dirac_kernel(1.0, 0.5)));
}

TEST_CASE("hypothesis checks") {
  const auto good = validate_h1(fixtures::mode_kernel());
  CHECK(good.ok);
  CHECK(good.certified_width > 0.0);
  const auto e = validate_h1(exponential_kernel(1.0, 2.0));
  CHECK(e.ok);
  CHECK(e.certified_width <= 2.0);
  CHECK_THROWS_AS(transform(exponential_kernel(1.0, 2.0), cplx(2.5, 0.0)), NumericalError);
  // Dirac kernels do not decay in the transform
  CHECK_FALSE(validate_h1(dirac_kernel(1.0, 0.5)).decays);
}

TEST_CASE("tabulation matches closed form and symbol inversion") {
  const auto K = fixtures::simple_root_kernel();
  const auto tab = tabulate_kernel(K, 0.05, 6.0);
  const int mid = static_cast<int>(tab.size()) / 2;
  for (int j : {-20, -3, 0, 7, 40}) {
    const double x = j * 0.05;
    CHECK(std::abs(tab[mid + j](0, 0) - (-1.0 / std::sqrt(M_PI) + x) * std::exp(-x * x)) < 1e-14);
  }
  RationalSymbol s;
  s.numerator = {MatC::Identity(1, 1)};
  s.denominator = {MatC::Identity(1, 1)};
  s.base = std::make_shared<KernelModel>(gaussian_kernel(1.0, 1.0));
  KernelModel G;
  G.eta0 = 10.0;
  G.parts.push_back(s);
  const auto tg = tabulate_kernel(G, 0.05, 6.0);
  for (int j : {-20, 0, 13}) {
    const double x = j * 0.05;
    CHECK(std::abs(tg[mid + j](0, 0) - std::exp(-x * x)) < 1e-10);
  }
  CHECK(kernel_support_halfwidth(gaussian_kernel(1.0, 1.0), 1e-12) < 7.0);
}
