#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cm/projection.hpp"
#include "cm/spectrum.hpp"
#include "fixtures.hpp"

using namespace cm;

namespace {

// 2x2 kernel with a decoupled simple root at 0 and a double pair at +-i.
KernelModel block_kernel() {
  const auto mode = fixtures::mode_linear_kernel();
  const auto simple = fixtures::simple_root_kernel();
  MatC e00 = MatC::Zero(2, 2), e11 = MatC::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  auto lift = [](const KernelModel& k, const MatC& e) {
    KernelModel out;
    out.n = 2;
    out.eta0 = k.eta0;
    for (const auto& part : k.parts) {
      const auto& g = std::get<GaussianMixture>(part);
      GaussianMixture h;
      for (auto t : g.terms) {
        t.c = t.c(0, 0) * e;
        h.terms.push_back(t);
      }
      out.parts.push_back(h);
    }
    return out;
  };
  return kernel_sum(lift(mode, e00), lift(simple, e11));
}

}  // namespace

TEST_CASE("simple root at the origin") {
  const auto sp = locate_roots(fixtures::simple_root_kernel());
  REQUIRE(sp.roots.size() == 1);
  CHECK(std::abs(sp.roots[0].nu) < 1e-12);
  CHECK(sp.roots[0].alg_mult == 1);
  CHECK(sp.M == 1);
  CHECK(sp.winding_total == sp.M);
}

TEST_CASE("double roots of the mode-interaction kernel") {
  const auto sp = locate_roots(fixtures::mode_linear_kernel());
  REQUIRE(sp.roots.size() == 2);
  for (const auto& r : sp.roots) {
    CHECK(std::abs(std::abs(r.nu.imag()) - 1.0) < 1e-10);
    CHECK(r.nu.real() == 0.0);
    CHECK(r.alg_mult == 2);
    CHECK(r.geom_mult == 1);
    REQUIRE(r.chains.size() == 1);
    CHECK(r.chains[0].size() == 2);
  }
  CHECK(sp.M == 4);
  CHECK(sp.winding_total == 4);
  CHECK(sp.strip_width > 0.0);
}

TEST_CASE("global count consistency on one large rectangle") {
  for (const auto& K : {fixtures::simple_root_kernel(), fixtures::mode_linear_kernel(), fixtures::wave_linear_kernel(),
                        block_kernel()}) {
    const auto sp = locate_roots(K);
    int total = 0;
    for (const auto& r : sp.roots) total += r.alg_mult;
    CHECK(total == sp.M);
    const double w = 0.5 * sp.strip_width, L = sp.search_half_length;
    CHECK(count_roots(K, {-w, w, -L, L}) == sp.M);
  }
}

TEST_CASE("matrix kernel: multiplicities add across blocks") {
  const auto sp = locate_roots(block_kernel());
  CHECK(sp.M == 5);
  REQUIRE(sp.roots.size() == 3);
  CHECK(sp.roots[1].alg_mult == 1);
}

TEST_CASE("kernel basis elements are annihilated by T") {
  for (const auto& K : {fixtures::simple_root_kernel(), fixtures::mode_linear_kernel(), fixtures::wave_linear_kernel(),
                        block_kernel()}) {
    const auto sp = locate_roots(K);
    const auto basis = build_basis(K, sp);
    CHECK(basis.size() == sp.M);
    for (const auto& phi : basis.elements) CHECK(qp_norm(qp_add(phi, convolve_qp(K, phi))) < 1e-7);
  }
}

TEST_CASE("Jordan chain relations") {
  const auto K = fixtures::mode_linear_kernel();
  const auto root = jordan_chains(K, cplx(0.0, 1.0), 2);
  REQUIRE(root.chains.size() == 1);
  const auto& c = root.chains[0];
  const auto T = char_series(K, cplx(0.0, 1.0), 2);
  // sum_{q<=p} T_q e^{p-q}/(p-q)! = 0 in derivative form
  CHECK((T[0] * c[0]).norm() < 1e-10);
  CHECK((T[0] * c[1] + T[1] * c[0]).norm() < 1e-10);
}

TEST_CASE("perturbation moves a simple root linearly") {
  // (1+s) K moves the root at 0 off the axis by O(s); follow it by Newton on d
  const auto K = fixtures::simple_root_kernel(0.5);
  auto root = [&](double s) {
    const auto Ks = kernel_scaled(K, cplx(1.0 + s));
    cplx nu = 0.0;
    for (int it = 0; it < 30; ++it) nu -= char_det(Ks, nu) / transform(Ks, nu, 1)(0, 0);
    return nu;
  };
  CHECK(std::abs(root(0.0)) < 1e-14);
  const cplx r1 = root(1e-3), r2 = root(2e-3);
  CHECK(std::abs(r1) > 1e-4);
  CHECK(std::abs(r2 / r1 - 2.0) < 0.01);
}

TEST_CASE("spectrum is deterministic") {
  const auto a = locate_roots(fixtures::mode_linear_kernel());
  const auto b = locate_roots(fixtures::mode_linear_kernel());
  REQUIRE(a.roots.size() == b.roots.size());
  for (size_t i = 0; i < a.roots.size(); ++i) CHECK(a.roots[i].nu == b.roots[i].nu);
  CHECK(a.strip_width == b.strip_width);
}
