#pragma once

// Kernel basis of ker T built from Jordan chains, the projection Q onto it
// (pointwise derivative functionals or weighted Gram pairings), and the
// coordinate map.

#include <string>
#include <vector>

#include "cm/spectrum.hpp"

namespace cm {

struct BasisLabel {
  cplx nu;
  int root = 0;   // index into Spectrum::roots
  int chain = 0;  // k
  int power = 0;  // p
};

// phi_{j,k,p}(x) = (sum_q C(p,q) x^q e^{p-q}_{j,k}) e^{nu_j x}
// Order: roots with Im nu >= 0 by ascending Im nu; for each (k, p) the element
// at nu followed by its conjugate partner (real kernels). Non-real kernels:
// all roots by ascending Im nu.
struct KernelBasis {
  int n = 1;
  std::vector<QuasiPolynomial> elements;
  std::vector<BasisLabel> labels;
  std::vector<int> conj_partner;  // index of the conjugate element, or self
  std::vector<VecC> adjoint;      // left null vectors of T^ at the roots
  bool real = false;
  int size() const { return static_cast<int>(elements.size()); }
};

KernelBasis build_basis(const KernelModel& K, const Spectrum& sp);

enum class Flavor { Pointwise, Gram };
enum class Weight { Gaussian, Sech };

// u -> d^T u^{(order)}(0), bilinear
struct PointFunctional {
  int order = 0;
  VecC direction;
};

struct Projection {
  Flavor flavor = Flavor::Pointwise;
  Weight weight = Weight::Gaussian;
  KernelBasis basis;
  std::vector<PointFunctional> point;
  MatC gram;          // gram(k, l) = f_k(phi_l)
  MatC gram_inverse;
  double condition = 1.0;
  bool extra_orders = false;  // a candidate functional was skipped as dependent
  int size() const { return basis.size(); }
};

Projection build_pointwise(const KernelBasis& basis);
Projection build_gram(const KernelBasis& basis, Weight weight);

// Raw functionals f(u).
VecC apply_functionals(const Projection& P, const QuasiPolynomial& u);
// int x^q e^{s x} w(x) dx for q = 0..order
std::vector<cplx> weight_moments(Weight w, cplx s, int order);

struct ProjectResult {
  VecC coords;
  QuasiPolynomial element;
};
VecC coordinates(const Projection& P, const QuasiPolynomial& u);
QuasiPolynomial combine(const KernelBasis& basis, const VecC& coords);
ProjectResult project(const Projection& P, const QuasiPolynomial& u);

}  // namespace cm
