#pragma once

// Order-by-order Taylor jet of the reduction map Psi and the reduced vector
// field obtained by differentiating the translation flow at x = 0.

#include <map>
#include <vector>

#include "cm/field.hpp"
#include "cm/nonlin.hpp"
#include "cm/tsolve.hpp"

namespace cm {

struct JetOptions {
  int order = 3;
  bool use_symmetry = true;  // skip entries forced to vanish by u -> -u
  double tol_solve = 1e-9;
  unsigned seed = 7;  // random probes of matrix symmetry actions
};

struct JetResult {
  int M = 0;
  int P = 0;
  int order = 0;
  std::map<JetIndex, QuasiPolynomial> psi;  // nonzero entries only
  PolyField field;
  std::vector<double> residual_by_order;    // max bordered-solve residual
  bool symmetry_skipped = false;
};

JetResult compute_jet(const KernelModel& K, const Spectrum& sp, const Projection& P, const NonlinearitySpec& F,
                      const JetOptions& opt = {});

// f_m = Q(Psi_m') plus the linear part Q(phi_i').
PolyField reduced_field(const JetResult& J, const Projection& P);

// u0 + Psi(u0) at coordinates c and parameters p (truncated jet).
QuasiPolynomial graph_point(const JetResult& J, const KernelBasis& basis, const VecC& c, const VecC& p);

}  // namespace cm
