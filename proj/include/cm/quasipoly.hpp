#pragma once

// Quasi-polynomials sum_j p_j(x) e^{nu_j x} with C^n-valued polynomial
// coefficients. Values are kept in canonical form: frequencies closer than
// kFreqTol are merged, negligible coefficients are zeroed and leading zero
// coefficients trimmed, terms are sorted by (Im nu, Re nu).

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "cm/numerics.hpp"

namespace cm {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

inline constexpr double kFreqTol = 1e-9;
inline constexpr double kTrimRel = 1e-13;

struct QpTerm {
  cplx nu;
  std::vector<VecC> poly;  // poly[q] multiplies x^q
  int degree() const { return static_cast<int>(poly.size()) - 1; }
};

class QuasiPolynomial {
 public:
  explicit QuasiPolynomial(int n = 1) : n_(n) {}
  QuasiPolynomial(int n, std::vector<QpTerm> terms);

  int n() const { return n_; }
  const std::vector<QpTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // v x^q e^{nu x}
  static QuasiPolynomial monomial(cplx nu, int q, const VecC& v);
  // c x^q e^{nu x}, scalar-valued
  static QuasiPolynomial scalar(cplx nu, int q, cplx c = 1.0);

 private:
  int n_;
  std::vector<QpTerm> terms_;
};

QuasiPolynomial qp_add(const QuasiPolynomial& a, const QuasiPolynomial& b);
QuasiPolynomial qp_sub(const QuasiPolynomial& a, const QuasiPolynomial& b);
QuasiPolynomial qp_neg(const QuasiPolynomial& a);
QuasiPolynomial qp_scale(const QuasiPolynomial& a, cplx s);
// Pointwise product; at least one operand must be scalar-valued (n = 1).
QuasiPolynomial qp_mul(const QuasiPolynomial& a, const QuasiPolynomial& b);
QuasiPolynomial qp_diff(const QuasiPolynomial& a);
// x -> a(x + xi)
QuasiPolynomial qp_shift(const QuasiPolynomial& a, double xi);
VecC qp_eval(const QuasiPolynomial& a, double x);
// m-th derivative at x
VecC qp_eval_deriv(const QuasiPolynomial& a, int m, double x);
QuasiPolynomial qp_conj(const QuasiPolynomial& a);

// Scalar quasi-polynomial of component i.
QuasiPolynomial qp_component(const QuasiPolynomial& a, int i);
// Scalar a times constant vector v.
QuasiPolynomial qp_times_vector(const QuasiPolynomial& a, const VecC& v);
// Matrix acting on the coefficient vectors.
QuasiPolynomial qp_apply_matrix(const MatC& m, const QuasiPolynomial& a);
// Bilinear pairing sum_i a_i b_i (no conjugation), scalar result.
QuasiPolynomial qp_dot(const QuasiPolynomial& a, const QuasiPolynomial& b);
// Drop coefficient entries with magnitude <= abs_tol.
QuasiPolynomial qp_chop(const QuasiPolynomial& a, double abs_tol);

// Largest coefficient magnitude (canonical coefficient norm).
double qp_norm(const QuasiPolynomial& a);
double qp_distance(const QuasiPolynomial& a, const QuasiPolynomial& b);
// Polynomial at frequency nu (empty if absent).
std::vector<VecC> qp_poly_at(const QuasiPolynomial& a, cplx nu, double tol = kFreqTol);

}  // namespace cm
