#include "cm/tsolve.hpp"

#include <Eigen/QR>

#include <cstdio>

#include "cm/errors.hpp"

namespace cm {

int root_multiplicity(const Spectrum& sp, cplx nu) {
  for (const auto& r : sp.roots)
    if (std::abs(r.nu - nu) < kFreqTol) return r.alg_mult;
  return 0;
}

QpTerm solve_frequency(const KernelModel& K, const QpTerm& t, int alpha) {
  const int n = K.n, q = t.degree(), D = q + alpha;
  MatSeries T = transform_series(K, t.nu, D);
  T[0] += MatC::Identity(n, n);
  // (T u)_s = sum_{j >= s} (j!/s!) T_{j-s} u_j
  auto g_at = [&](int s) -> VecC { return s <= q ? t.poly[s] : VecC::Zero(n); };
  QpTerm u{t.nu, std::vector<VecC>(D + 1, VecC::Zero(n))};
  if (alpha == 0) {
    Eigen::PartialPivLU<MatC> lu(T[0]);
    for (int s = D; s >= 0; --s) {
      VecC rhs = -g_at(s);
      for (int j = s + 1; j <= D; ++j) rhs -= (factorial(j) / factorial(s)) * (T[j - s] * u.poly[j]);
      u.poly[s] = lu.solve(rhs);
    }
    return u;
  }
  // Resonant: the block system is singular with kernel of dimension alpha
  // (ker T at this frequency); take the minimum-norm solution.
  const int N = (D + 1) * n;
  MatC A = MatC::Zero(N, N);
  VecC b(N);
  for (int s = 0; s <= D; ++s) {
    b.segment(s * n, n) = -g_at(s);
    for (int j = s; j <= D; ++j) A.block(s * n, j * n, n, n) = (factorial(j) / factorial(s)) * T[j - s];
  }
  Eigen::CompleteOrthogonalDecomposition<MatC> cod(A);
  cod.setThreshold(1e-10);
  VecC x = cod.solve(b);
  const double res = (A * x - b).norm();
  if (res > 1e-8 * (1.0 + b.norm()) * (1.0 + x.norm()))
    throw NumericalError("resonant block system is inconsistent (multiplicity data mismatch)");
  for (int s = 0; s <= D; ++s) u.poly[s] = x.segment(s * n, n);
  return u;
}

SolveReport solve_bordered(const KernelModel& K, const Spectrum& sp, const Projection& P, const QuasiPolynomial& g,
                           const VecC& target, double tol_solve) {
  if (g.n() != K.n) throw InputError("tsolve: dimension mismatch");
  std::vector<QpTerm> terms;
  for (const auto& t : g.terms()) terms.push_back(solve_frequency(K, t, root_multiplicity(sp, t.nu)));
  QuasiPolynomial u(K.n, std::move(terms));
  VecC want = target.size() ? target : VecC::Zero(P.size());
  if (want.size() != P.size()) throw InputError("tsolve: target coordinate count mismatch");
  u = qp_add(u, combine(P.basis, want - coordinates(P, u)));
  SolveReport rep;
  rep.u = u;
  rep.residual = qp_norm(qp_add(qp_add(u, convolve_qp(K, u)), g));
  if (!(rep.residual < tol_solve * (1.0 + qp_norm(g))))
    {
    char buf[96];
    std::snprintf(buf, sizeof buf, "bordered solve residual %.3g above tolerance", rep.residual);
    throw NumericalError(buf);
  }
  return rep;
}

}  // namespace cm
