#pragma once

// Roots of d(nu) = det(I + K^(nu)) on the imaginary axis, certified by
// argument-principle winding counts, and Jordan chains of root vectors.

#include <string>
#include <vector>

#include "cm/kernel.hpp"

namespace cm {

// Axis-aligned rectangle in the complex nu-plane.
struct Rect {
  double re0, re1, im0, im1;
};

struct CharacteristicRoot {
  cplx nu;
  int alg_mult = 0;
  int geom_mult = 0;
  // chains[k][p] = e^p of chain k (derivative form); chain lengths sum to alg_mult
  std::vector<std::vector<VecC>> chains;
  double snap_distance = 0.0;
};

struct Spectrum {
  std::vector<CharacteristicRoot> roots;  // sorted by Im nu ascending
  double strip_width = 0.0;               // certified: no off-axis roots for |Re nu| < strip_width
  double search_half_length = 0.0;        // L: roots searched on [-iL, iL]
  int M = 0;                              // total algebraic multiplicity
  int winding_total = 0;                  // count on the certification rectangle
  Rect certificate{0, 0, 0, 0};
  std::vector<std::string> messages;
};

struct SpectrumOptions {
  double tol_root = 1e-7;   // snap |Re nu| below this to the axis
  double strip_cap = 1.0;   // initial strip half-width cap
};

// T^(nu) = I + K^(nu) and its Taylor coefficients T_k = T^{(k)}/k!.
MatC char_matrix(const KernelModel& K, cplx nu);
MatSeries char_series(const KernelModel& K, cplx nu, int order);
cplx char_det(const KernelModel& K, cplx nu);

// Winding number of d around the rectangle boundary.
int count_roots(const KernelModel& K, const Rect& r);

Spectrum locate_roots(const KernelModel& K, const SpectrumOptions& opt = {});

// Canonical system of Jordan chains at a root of total multiplicity alg_mult.
CharacteristicRoot jordan_chains(const KernelModel& K, cplx nu, int alg_mult);

}  // namespace cm
