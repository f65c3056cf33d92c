#include "cm/quasipoly.hpp"

#include <algorithm>

#include "cm/errors.hpp"

namespace cm {

namespace {

void canonicalize_poly(std::vector<VecC>& p) {
  double mx = 0.0;
  for (const auto& v : p) mx = std::max(mx, v.cwiseAbs().maxCoeff());
  if (mx == 0.0) {
    p.clear();
    return;
  }
  const double thr = kTrimRel * mx;
  for (auto& v : p)
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) < thr) v[i] = 0.0;
  while (!p.empty() && p.back().cwiseAbs().maxCoeff() == 0.0) p.pop_back();
}

bool freq_less(const cplx& a, const cplx& b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

}  // namespace

QuasiPolynomial::QuasiPolynomial(int n, std::vector<QpTerm> terms) : n_(n) {
  if (n < 1) throw InputError("quasi-polynomial dimension must be positive");
  std::vector<QpTerm> merged;
  for (auto& t : terms) {
    for (const auto& v : t.poly)
      if (v.size() != n) throw InputError("quasi-polynomial coefficient length does not match dimension");
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const QpTerm& m) { return std::abs(m.nu - t.nu) < kFreqTol; });
    if (it == merged.end()) {
      merged.push_back(std::move(t));
    } else {
      if (it->poly.size() < t.poly.size()) it->poly.resize(t.poly.size(), VecC::Zero(n));
      for (size_t q = 0; q < t.poly.size(); ++q) it->poly[q] += t.poly[q];
    }
  }
  for (auto& t : merged) {
    canonicalize_poly(t.poly);
    if (!t.poly.empty()) terms_.push_back(std::move(t));
  }
  std::sort(terms_.begin(), terms_.end(), [](const QpTerm& a, const QpTerm& b) { return freq_less(a.nu, b.nu); });
}

QuasiPolynomial QuasiPolynomial::monomial(cplx nu, int q, const VecC& v) {
  std::vector<VecC> p(q + 1, VecC::Zero(v.size()));
  p[q] = v;
  return QuasiPolynomial(static_cast<int>(v.size()), {QpTerm{nu, p}});
}

QuasiPolynomial QuasiPolynomial::scalar(cplx nu, int q, cplx c) {
  VecC v(1);
  v[0] = c;
  return monomial(nu, q, v);
}

QuasiPolynomial qp_add(const QuasiPolynomial& a, const QuasiPolynomial& b) {
  if (a.n() != b.n()) throw InputError("qp_add: dimension mismatch");
  std::vector<QpTerm> t = a.terms();
  t.insert(t.end(), b.terms().begin(), b.terms().end());
  return QuasiPolynomial(a.n(), std::move(t));
}

QuasiPolynomial qp_scale(const QuasiPolynomial& a, cplx s) {
  std::vector<QpTerm> t = a.terms();
  for (auto& term : t)
    for (auto& v : term.poly) v *= s;
  return QuasiPolynomial(a.n(), std::move(t));
}

QuasiPolynomial qp_neg(const QuasiPolynomial& a) { return qp_scale(a, -1.0); }

QuasiPolynomial qp_sub(const QuasiPolynomial& a, const QuasiPolynomial& b) { return qp_add(a, qp_neg(b)); }

QuasiPolynomial qp_mul(const QuasiPolynomial& a, const QuasiPolynomial& b) {
  if (a.n() != 1 && b.n() != 1) throw InputError("qp_mul: both operands are vector-valued");
  const int n = std::max(a.n(), b.n());
  std::vector<QpTerm> out;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      QpTerm t{ta.nu + tb.nu, std::vector<VecC>(ta.poly.size() + tb.poly.size() - 1, VecC::Zero(n))};
      for (size_t i = 0; i < ta.poly.size(); ++i)
        for (size_t j = 0; j < tb.poly.size(); ++j) {
          if (a.n() == 1)
            t.poly[i + j] += ta.poly[i][0] * tb.poly[j];
          else
            t.poly[i + j] += tb.poly[j][0] * ta.poly[i];
        }
      out.push_back(std::move(t));
    }
  }
  return QuasiPolynomial(n, std::move(out));
}

QuasiPolynomial qp_diff(const QuasiPolynomial& a) {
  std::vector<QpTerm> out;
  for (const auto& t : a.terms()) {
    QpTerm d{t.nu, std::vector<VecC>(t.poly.size(), VecC::Zero(a.n()))};
    for (size_t q = 0; q < t.poly.size(); ++q) {
      d.poly[q] += t.nu * t.poly[q];
      if (q > 0) d.poly[q - 1] += static_cast<double>(q) * t.poly[q];
    }
    out.push_back(std::move(d));
  }
  return QuasiPolynomial(a.n(), std::move(out));
}

QuasiPolynomial qp_shift(const QuasiPolynomial& a, double xi) {
  std::vector<QpTerm> out;
  for (const auto& t : a.terms()) {
    const cplx e = std::exp(t.nu * xi);
    QpTerm s{t.nu, std::vector<VecC>(t.poly.size(), VecC::Zero(a.n()))};
    for (int q = 0; q < static_cast<int>(t.poly.size()); ++q)
      for (int r = 0; r <= q; ++r) s.poly[r] += (e * binomial(q, r) * ipow(xi, q - r)) * t.poly[q];
    out.push_back(std::move(s));
  }
  return QuasiPolynomial(a.n(), std::move(out));
}

VecC qp_eval(const QuasiPolynomial& a, double x) { return qp_eval_deriv(a, 0, x); }

VecC qp_eval_deriv(const QuasiPolynomial& a, int m, double x) {
  VecC r = VecC::Zero(a.n());
  for (const auto& t : a.terms()) {
    // (p e^{nu x})^{(m)} = e^{nu x} sum_j C(m,j) nu^{m-j} p^{(j)}(x)
    const cplx e = std::exp(t.nu * x);
    for (int j = 0; j <= m; ++j) {
      VecC pj = VecC::Zero(a.n());
      for (int q = static_cast<int>(t.poly.size()) - 1; q >= j; --q) {
        // coefficient of x^{q-j} in p^{(j)} is q!/(q-j)! p_q; Horner in x
        pj = pj * x + (factorial(q) / factorial(q - j)) * t.poly[q];
      }
      r += (e * binomial(m, j) * ipow(t.nu, m - j)) * pj;
    }
  }
  return r;
}

QuasiPolynomial qp_conj(const QuasiPolynomial& a) {
  std::vector<QpTerm> out;
  for (const auto& t : a.terms()) {
    QpTerm c{std::conj(t.nu), t.poly};
    for (auto& v : c.poly) v = v.conjugate();
    out.push_back(std::move(c));
  }
  return QuasiPolynomial(a.n(), std::move(out));
}

QuasiPolynomial qp_component(const QuasiPolynomial& a, int i) {
  if (i < 0 || i >= a.n()) throw InputError("qp_component: component out of range");
  std::vector<QpTerm> out;
  for (const auto& t : a.terms()) {
    QpTerm c{t.nu, {}};
    for (const auto& v : t.poly) c.poly.push_back(VecC::Constant(1, v[i]));
    out.push_back(std::move(c));
  }
  return QuasiPolynomial(1, std::move(out));
}

QuasiPolynomial qp_times_vector(const QuasiPolynomial& a, const VecC& v) {
  if (a.n() != 1) throw InputError("qp_times_vector: operand must be scalar-valued");
  std::vector<QpTerm> out;
  for (const auto& t : a.terms()) {
    QpTerm c{t.nu, {}};
    for (const auto& p : t.poly) c.poly.push_back(p[0] * v);
    out.push_back(std::move(c));
  }
  return QuasiPolynomial(static_cast<int>(v.size()), std::move(out));
}

QuasiPolynomial qp_apply_matrix(const MatC& m, const QuasiPolynomial& a) {
  if (m.cols() != a.n()) throw InputError("qp_apply_matrix: dimension mismatch");
  std::vector<QpTerm> out;
  for (const auto& t : a.terms()) {
    QpTerm c{t.nu, {}};
    for (const auto& p : t.poly) c.poly.push_back(m * p);
    out.push_back(std::move(c));
  }
  return QuasiPolynomial(static_cast<int>(m.rows()), std::move(out));
}

QuasiPolynomial qp_dot(const QuasiPolynomial& a, const QuasiPolynomial& b) {
  if (a.n() != b.n()) throw InputError("qp_dot: dimension mismatch");
  QuasiPolynomial r(1);
  for (int i = 0; i < a.n(); ++i) r = qp_add(r, qp_mul(qp_component(a, i), qp_component(b, i)));
  return r;
}

QuasiPolynomial qp_chop(const QuasiPolynomial& a, double abs_tol) {
  std::vector<QpTerm> out = a.terms();
  for (auto& t : out)
    for (auto& v : t.poly)
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) <= abs_tol) v[i] = 0.0;
  return QuasiPolynomial(a.n(), std::move(out));
}

double qp_norm(const QuasiPolynomial& a) {
  double m = 0.0;
  for (const auto& t : a.terms())
    for (const auto& v : t.poly) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

double qp_distance(const QuasiPolynomial& a, const QuasiPolynomial& b) { return qp_norm(qp_sub(a, b)); }

std::vector<VecC> qp_poly_at(const QuasiPolynomial& a, cplx nu, double tol) {
  for (const auto& t : a.terms())
    if (std::abs(t.nu - nu) < tol) return t.poly;
  return {};
}

}  // namespace cm
