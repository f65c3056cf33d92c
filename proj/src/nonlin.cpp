#include "cm/nonlin.hpp"

#include <random>

#include "cm/errors.hpp"

namespace cm {

namespace {

const KernelModel& lookup(const NonlinearitySpec& F, const std::string& name) {
  auto it = F.kernels.find(name);
  if (it == F.kernels.end()) throw InputError("unknown kernel reference '" + name + "'");
  return it->second;
}

VecC unit(int n, int i) {
  VecC e = VecC::Zero(n);
  e(i) = 1.0;
  return e;
}

cplx param_factor(const TaylorTerm& t, const VecC& p) {
  cplx f = 1.0;
  for (size_t j = 0; j < t.param_powers.size(); ++j) f *= ipow(p(j), t.param_powers[j]);
  return f;
}

}  // namespace

int NonlinearitySpec::max_order() const {
  int k = 0;
  for (const auto& t : terms) {
    int o = t.degree();
    for (int r : t.param_powers) o += r;
    k = std::max(k, o);
  }
  return k;
}

void validate_nonlinearity(const NonlinearitySpec& F) {
  const int P = static_cast<int>(F.params.size());
  for (const auto& [name, K] : F.kernels)
    if (K.n != F.n) throw InputError("kernel '" + name + "' has dimension " + std::to_string(K.n));
  for (const auto& t : F.terms) {
    if (t.degree() < 1) throw InputError("nonlinear term without u factors");
    if (static_cast<int>(t.param_powers.size()) != P) throw InputError("parameter power count mismatch");
    int r = 0;
    for (int x : t.param_powers) {
      if (x < 0) throw InputError("negative parameter power");
      r += x;
    }
    if (t.degree() == 1 && r == 0) throw InputError("parameter-free linear term belongs in the linear kernel");
    if (t.out_component < 0 || t.out_component >= F.n) throw InputError("output component out of range");
    if (!t.outer.empty()) lookup(F, t.outer);
    for (const auto& f : t.factors) {
      if (f.component < 0 || f.component >= F.n) throw InputError("factor component out of range");
      if (!f.kernel.empty()) lookup(F, f.kernel);
    }
  }
  if (!F.declared.odd_params.empty() && static_cast<int>(F.declared.odd_params.size()) != P)
    throw InputError("odd parameter flags do not match the parameter list");
  for (const auto& a : F.declared.actions)
    if (a.rows() != F.n || a.cols() != F.n) throw InputError("symmetry action has wrong dimension");
}

QuasiPolynomial apply_term(const NonlinearitySpec& F, const TaylorTerm& t, const std::vector<QuasiPolynomial>& args) {
  if (static_cast<int>(args.size()) != t.degree()) throw InputError("apply_term: argument count mismatch");
  QuasiPolynomial prod = QuasiPolynomial::scalar(0.0, 0, t.coeff);
  for (int i = 0; i < t.degree(); ++i) {
    if (args[i].n() != F.n) throw InputError("apply_term: dimension mismatch");
    const auto& f = t.factors[i];
    QuasiPolynomial v = f.kernel.empty() ? args[i] : convolve_qp(lookup(F, f.kernel), args[i]);
    prod = qp_mul(prod, qp_component(v, f.component));
  }
  QuasiPolynomial out = qp_times_vector(prod, unit(F.n, t.out_component));
  if (!t.outer.empty()) out = convolve_qp(lookup(F, t.outer), out);
  return out;
}

QuasiPolynomial eval_nonlinearity(const NonlinearitySpec& F, const QuasiPolynomial& u, const VecC& params) {
  QuasiPolynomial r(F.n);
  for (const auto& t : F.terms) {
    const cplx s = param_factor(t, params);
    if (s == 0.0) continue;
    r = qp_add(r, qp_scale(apply_term(F, t, std::vector<QuasiPolynomial>(t.degree(), u)), s));
  }
  return r;
}

SymmetryReport check_symmetries(const NonlinearitySpec& F, unsigned seed) {
  SymmetryReport rep;
  auto fail = [&](std::string s) {
    rep.ok = false;
    rep.violations.push_back(std::move(s));
  };
  for (size_t i = 0; i < F.terms.size(); ++i) {
    const auto& t = F.terms[i];
    if (F.declared.sign && t.degree() % 2 == 0) fail("term " + std::to_string(i) + ": even degree violates u -> -u");
    if (F.declared.reflection) {
      int par = t.outer.empty() ? 1 : kernel_parity(lookup(F, t.outer));
      for (const auto& f : t.factors) par *= f.kernel.empty() ? 1 : kernel_parity(lookup(F, f.kernel));
      for (size_t j = 0; j < t.param_powers.size(); ++j)
        if (j < F.declared.odd_params.size() && F.declared.odd_params[j] && t.param_powers[j] % 2) par = -par;
      if (par != 1) fail("term " + std::to_string(i) + ": not reflection equivariant");
    }
  }
  if (!F.declared.actions.empty()) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    auto rvec = [&] {
      VecC v(F.n);
      for (int i = 0; i < F.n; ++i) v(i) = cplx(nd(rng), nd(rng));
      return v;
    };
    QuasiPolynomial u = qp_add(QuasiPolynomial::monomial(cplx(0.0, 0.3), 0, rvec()),
                               QuasiPolynomial::monomial(cplx(0.0, -0.7), 1, rvec()));
    VecC p(F.params.size());
    for (int j = 0; j < p.size(); ++j) p(j) = nd(rng);
    for (size_t a = 0; a < F.declared.actions.size(); ++a) {
      const MatC& rho = F.declared.actions[a];
      QuasiPolynomial lhs = eval_nonlinearity(F, qp_apply_matrix(rho, u), p);
      QuasiPolynomial rhs = qp_apply_matrix(rho, eval_nonlinearity(F, u, p));
      if (qp_distance(lhs, rhs) > 1e-10 * (1.0 + qp_norm(rhs)))
        fail("matrix action " + std::to_string(a) + " does not commute with F");
    }
  }
  return rep;
}

}  // namespace cm
