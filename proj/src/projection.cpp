#include "cm/projection.hpp"

#include <Eigen/SVD>

#include <algorithm>

#include "cm/errors.hpp"

namespace cm {

namespace {

QuasiPolynomial basis_element(cplx nu, const std::vector<VecC>& chain, int p) {
  const int n = static_cast<int>(chain[0].size());
  QpTerm t{nu, std::vector<VecC>(p + 1, VecC::Zero(n))};
  for (int q = 0; q <= p; ++q) t.poly[q] = binomial(p, q) * chain[p - q];
  return QuasiPolynomial(n, {t});
}

VecC left_null(const MatC& T) {
  Eigen::JacobiSVD<MatC> svd(T.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().col(T.cols() - 1);
}

int matrix_rank(const MatC& m) {
  if (m.rows() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-10 * std::max(1.0, s(0))) ++r;
  return r;
}

double condition_number(const MatC& m) {
  Eigen::JacobiSVD<MatC> svd(m);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

void finish(Projection& P) {
  Eigen::FullPivLU<MatC> lu(P.gram);
  if (!lu.isInvertible() || !std::isfinite(condition_number(P.gram)) || condition_number(P.gram) > 1e12)
    throw NumericalError("singular projection matrix");
  P.gram_inverse = lu.inverse();
  P.condition = condition_number(P.gram);
}

}  // namespace

KernelBasis build_basis(const KernelModel& K, const Spectrum& sp) {
  KernelBasis B;
  B.n = K.n;
  B.real = kernel_is_real(K);
  for (int j = 0; j < static_cast<int>(sp.roots.size()); ++j) {
    const auto& r = sp.roots[j];
    if (B.real && r.nu.imag() < 0.0) continue;
    int partner = -1;
    if (B.real && r.nu.imag() > 0.0)
      for (int i = 0; i < static_cast<int>(sp.roots.size()); ++i)
        if (sp.roots[i].nu == std::conj(r.nu)) partner = i;
    for (int k = 0; k < static_cast<int>(r.chains.size()); ++k)
      for (int p = 0; p < static_cast<int>(r.chains[k].size()); ++p) {
        const int self = B.size();
        B.elements.push_back(basis_element(r.nu, r.chains[k], p));
        B.labels.push_back({r.nu, j, k, p});
        if (partner >= 0) {
          const auto& pr = sp.roots[partner];
          B.elements.push_back(basis_element(pr.nu, pr.chains[k], p));
          B.labels.push_back({pr.nu, partner, k, p});
          B.conj_partner.push_back(self + 1);
          B.conj_partner.push_back(self);
        } else {
          B.conj_partner.push_back(self);
        }
      }
    // adjoint direction, normalized against the first head
    VecC a = left_null(char_matrix(K, r.nu));
    const VecC& e0 = r.chains.at(0).at(0);
    const cplx s = a.transpose() * e0;
    if (std::abs(s) > 1e-8) a /= s;
    else a.normalize();
    B.adjoint.push_back(a);
    if (partner >= 0) B.adjoint.push_back(a.conjugate());
  }
  if (B.size() != sp.M) throw NumericalError("kernel basis size differs from the root count");
  return B;
}

Projection build_pointwise(const KernelBasis& basis) {
  Projection P;
  P.flavor = Flavor::Pointwise;
  P.basis = basis;
  const int M = basis.size(), n = basis.n;
  if (M == 0) throw InputError("empty kernel basis");
  // candidate directions: adjoint vectors, then chain heads; drop dependent ones
  std::vector<VecC> cand;
  for (const auto& a : basis.adjoint) cand.push_back(a);
  for (const auto& e : basis.elements) cand.push_back(e.terms()[0].poly[0]);
  std::vector<VecC> dirs;
  MatC D(n, 0);
  for (const auto& c : cand) {
    MatC T(n, D.cols() + 1);
    T << D, c;
    if (matrix_rank(T) > D.cols()) {
      D = T;
      dirs.push_back(c);
    }
    if (static_cast<int>(dirs.size()) == n) break;
  }
  MatC rows(0, M);
  for (int m = 0; rows.rows() < M; ++m) {
    if (m > 4 * M + 4) throw NumericalError("pointwise functionals do not separate the kernel basis");
    for (const auto& d : dirs) {
      if (rows.rows() == M) break;
      Eigen::RowVectorXcd r(M);
      for (int l = 0; l < M; ++l) r(l) = d.transpose() * qp_eval_deriv(basis.elements[l], m, 0.0);
      MatC T(rows.rows() + 1, M);
      T << rows, r;
      if (matrix_rank(T) > rows.rows()) {
        rows = T;
        P.point.push_back({m, d});
      } else {
        P.extra_orders = true;
      }
    }
  }
  P.gram = rows;
  finish(P);
  return P;
}

std::vector<cplx> weight_moments(Weight w, cplx s, int order) {
  Series<cplx> ser(order);
  if (w == Weight::Gaussian) {
    // sqrt(pi) e^{s^2/4}
    Series<cplx> f(order);
    f[0] = s * s / 4.0;
    if (order >= 1) f[1] = s / 2.0;
    if (order >= 2) f[2] = 0.25;
    ser = cplx(std::sqrt(M_PI)) * exp(f);
  } else {
    // pi / cos(pi s / 2)
    if (std::abs(s.real()) >= 1.0) throw NumericalError("sech weight pairing outside |Re s| < 1");
    Series<cplx> c(order);
    const cplx a = M_PI * s / 2.0;
    const double b = M_PI / 2.0;
    for (int k = 0; k <= order; ++k) c[k] = std::cos(a + k * M_PI / 2.0) * ipow(b, k) / factorial(k);
    ser = cplx(M_PI) * reciprocal(c);
  }
  std::vector<cplx> out(order + 1);
  for (int k = 0; k <= order; ++k) out[k] = factorial(k) * ser[k];
  return out;
}

Projection build_gram(const KernelBasis& basis, Weight weight) {
  Projection P;
  P.flavor = Flavor::Gram;
  P.weight = weight;
  P.basis = basis;
  const int M = basis.size();
  if (M == 0) throw InputError("empty kernel basis");
  P.gram = MatC(M, M);
  for (int l = 0; l < M; ++l) P.gram.col(l) = apply_functionals(P, basis.elements[l]);
  finish(P);
  return P;
}

VecC apply_functionals(const Projection& P, const QuasiPolynomial& u) {
  const int M = P.size();
  if (u.n() != P.basis.n) throw InputError("projection: dimension mismatch");
  VecC f = VecC::Zero(M);
  if (P.flavor == Flavor::Pointwise) {
    for (int k = 0; k < M; ++k) {
      const auto& fn = P.point[k];
      f(k) = fn.direction.transpose() * qp_eval_deriv(u, fn.order, 0.0);
    }
    return f;
  }
  // int sum_i u_i conj(phi_k,i) w
  for (int k = 0; k < M; ++k) {
    const QuasiPolynomial pc = qp_conj(P.basis.elements[k]);
    for (const auto& a : u.terms())
      for (const auto& b : pc.terms()) {
        const int da = a.degree(), db = b.degree();
        auto W = weight_moments(P.weight, a.nu + b.nu, da + db);
        for (int i = 0; i <= da; ++i)
          for (int j = 0; j <= db; ++j) f(k) += (a.poly[i].transpose() * b.poly[j])(0, 0) * W[i + j];
      }
  }
  return f;
}

VecC coordinates(const Projection& P, const QuasiPolynomial& u) { return P.gram_inverse * apply_functionals(P, u); }

QuasiPolynomial combine(const KernelBasis& basis, const VecC& coords) {
  QuasiPolynomial r(basis.n);
  for (int k = 0; k < basis.size(); ++k)
    if (coords(k) != 0.0) r = qp_add(r, qp_scale(basis.elements[k], coords(k)));
  return r;
}

ProjectResult project(const Projection& P, const QuasiPolynomial& u) {
  VecC c = coordinates(P, u);
  return {c, combine(P.basis, c)};
}

}  // namespace cm
