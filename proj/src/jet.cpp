#include "cm/jet.hpp"

#include <functional>

#include "cm/errors.hpp"

namespace cm {

namespace {

// Coefficient expansion with memoized inner convolutions.
class Expander {
 public:
  Expander(const NonlinearitySpec& F, int M, int P) : F_(F), M_(M), P_(P) {}

  int add_piece(const JetIndex& m, const QuasiPolynomial& q) {
    pieces_.push_back(q);
    index_.push_back(m);
    return static_cast<int>(pieces_.size()) - 1;
  }

  // [F]_m: coefficient of c^m p^r in F(sum of pieces).
  QuasiPolynomial rhs(const JetIndex& m, double& scale) {
    QuasiPolynomial g(F_.n);
    scale = 0.0;
    for (const auto& t : F_.terms) {
      JetIndex rem = m;
      bool ok = true;
      for (int j = 0; j < P_; ++j) {
        rem.params[j] -= t.param_powers[j];
        if (rem.params[j] < 0) ok = false;
      }
      if (!ok || rem.order() < t.degree()) continue;
      std::vector<int> tuple;
      enumerate(t, rem, tuple, g, scale);
    }
    return g;
  }

 private:
  void enumerate(const TaylorTerm& t, const JetIndex& rem, std::vector<int>& tuple, QuasiPolynomial& g,
                 double& scale) {
    const int slot = static_cast<int>(tuple.size());
    const int left = t.degree() - slot;
    if (left == 0) {
      if (rem.order() != 0) return;
      QuasiPolynomial v = evaluate(t, tuple);
      scale = std::max(scale, qp_norm(v));
      g = qp_add(g, v);
      return;
    }
    for (int id = 0; id < static_cast<int>(pieces_.size()); ++id) {
      const JetIndex& pm = index_[id];
      if (pm.order() > rem.order() - (left - 1)) continue;
      JetIndex next = rem;
      bool fits = true;
      for (int k = 0; k < M_ && fits; ++k) fits = (next.powers[k] -= pm.powers[k]) >= 0;
      for (int j = 0; j < P_ && fits; ++j) fits = (next.params[j] -= pm.params[j]) >= 0;
      if (!fits) continue;
      tuple.push_back(id);
      enumerate(t, next, tuple, g, scale);
      tuple.pop_back();
    }
  }

  const QuasiPolynomial& convolved(const std::string& kernel, int id) {
    auto key = std::make_pair(kernel, id);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, convolve_qp(F_.kernels.at(kernel), pieces_[id])).first->second;
  }

  QuasiPolynomial evaluate(const TaylorTerm& t, const std::vector<int>& tuple) {
    QuasiPolynomial prod = QuasiPolynomial::scalar(0.0, 0, t.coeff);
    for (int i = 0; i < t.degree(); ++i) {
      const auto& f = t.factors[i];
      const QuasiPolynomial& v = f.kernel.empty() ? pieces_[tuple[i]] : convolved(f.kernel, tuple[i]);
      prod = qp_mul(prod, qp_component(v, f.component));
    }
    VecC e = VecC::Zero(F_.n);
    e(t.out_component) = 1.0;
    QuasiPolynomial out = qp_times_vector(prod, e);
    if (!t.outer.empty()) out = convolve_qp(F_.kernels.at(t.outer), out);
    return out;
  }

  const NonlinearitySpec& F_;
  int M_, P_;
  std::vector<QuasiPolynomial> pieces_;
  std::vector<JetIndex> index_;
  std::map<std::pair<std::string, int>, QuasiPolynomial> cache_;
};

VecC chop_vector(VecC v, double ref) {
  const double tol = 1e-12 * std::max(ref, v.cwiseAbs().maxCoeff());
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i).real()) <= tol) v(i).real(0.0);
    if (std::abs(v(i).imag()) <= tol) v(i).imag(0.0);
  }
  return v;
}

}  // namespace

JetResult compute_jet(const KernelModel& K, const Spectrum& sp, const Projection& P, const NonlinearitySpec& F,
                      const JetOptions& opt) {
  if (opt.order < 2) throw InputError("minimum order 2");
  if (F.n != K.n) throw InputError("nonlinearity dimension differs from the kernel");
  validate_nonlinearity(F);
  SymmetryReport sym = check_symmetries(F, opt.seed);
  if (!sym.ok) throw InputError("declared symmetry violated: " + sym.violations.front());
  if (F.declared.reflection && kernel_parity(K) != 1) throw InputError("reflection symmetry declared for a non-even kernel");

  JetResult J;
  J.M = P.size();
  J.P = static_cast<int>(F.params.size());
  J.order = opt.order;
  J.residual_by_order.assign(opt.order + 1, 0.0);
  Expander ex(F, J.M, J.P);
  for (int i = 0; i < J.M; ++i) ex.add_piece(unit_index(J.M, J.P, i), P.basis.elements[i]);
  const bool skip_even = opt.use_symmetry && F.declared.sign;

  for (int o = 2; o <= opt.order; ++o) {
    std::vector<std::pair<JetIndex, QuasiPolynomial>> found;
    for (const auto& m : indices_of_order(J.M, J.P, o)) {
      if (skip_even && m.coord_degree() % 2 == 0) {
        J.symmetry_skipped = true;
        continue;
      }
      double scale = 0.0;
      QuasiPolynomial g = ex.rhs(m, scale);
      g = qp_chop(g, 1e-14 * scale);
      if (g.is_zero()) continue;
      SolveReport s = solve_bordered(K, sp, P, g, VecC(), opt.tol_solve);
      J.residual_by_order[o] = std::max(J.residual_by_order[o], s.residual);
      QuasiPolynomial psi = qp_chop(s.u, 1e-14 * qp_norm(s.u));
      if (!psi.is_zero()) found.emplace_back(m, psi);
    }
    // pieces of this order become available only for higher orders
    for (auto& [m, q] : found) {
      ex.add_piece(m, q);
      J.psi.emplace(m, std::move(q));
    }
  }
  J.field = reduced_field(J, P);
  return J;
}

PolyField reduced_field(const JetResult& J, const Projection& P) {
  PolyField f;
  f.M = J.M;
  f.P = J.P;
  for (int i = 0; i < J.M; ++i) {
    const QuasiPolynomial d = qp_diff(P.basis.elements[i]);
    VecC v = chop_vector(coordinates(P, d), qp_norm(d));
    if (v.cwiseAbs().maxCoeff() > 0.0) f.coeffs.emplace(unit_index(J.M, J.P, i), v);
  }
  for (const auto& [m, psi] : J.psi) {
    const QuasiPolynomial d = qp_diff(psi);
    VecC v = chop_vector(coordinates(P, d), qp_norm(d));
    if (v.cwiseAbs().maxCoeff() > 0.0) f.coeffs.emplace(m, v);
  }
  return f;
}

QuasiPolynomial graph_point(const JetResult& J, const KernelBasis& basis, const VecC& c, const VecC& p) {
  QuasiPolynomial u = combine(basis, c);
  for (const auto& [m, psi] : J.psi) {
    cplx mono = 1.0;
    for (int k = 0; k < J.M; ++k) mono *= ipow(c(k), m.powers[k]);
    for (int j = 0; j < J.P; ++j) mono *= ipow(p(j), m.params[j]);
    if (mono != 0.0) u = qp_add(u, qp_scale(psi, mono));
  }
  return u;
}

}  // namespace cm
