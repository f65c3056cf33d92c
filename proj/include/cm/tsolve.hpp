#pragma once

// Bordered solve within quasi-polynomials: find u with u + K*u + g = 0 and
// prescribed projection coordinates.

#include "cm/projection.hpp"

namespace cm {

struct SolveReport {
  QuasiPolynomial u;
  double residual = 0.0;  // canonical coefficient norm of u + K*u + g
};

// Root multiplicity at nu (0 if nu is not a characteristic root).
int root_multiplicity(const Spectrum& sp, cplx nu);

// Particular solution of u + K*u + g = 0 at the single frequency of g's term t.
QpTerm solve_frequency(const KernelModel& K, const QpTerm& t, int alpha);

// target empty means zero coordinates.
SolveReport solve_bordered(const KernelModel& K, const Spectrum& sp, const Projection& P, const QuasiPolynomial& g,
                           const VecC& target = VecC(), double tol_solve = 1e-9);

}  // namespace cm
