#pragma once

// Polynomial vector fields dc/dx = f(c, p) on kernel coordinates c with
// formal parameters p, and the coordinate transformations applied to reduced
// fields: corotation, scaling, real form and restriction.

#include <map>
#include <string>
#include <vector>

#include "cm/quasipoly.hpp"

namespace cm {

// Monomial c^powers p^params. Ordered graded-lexicographically: by total
// order, then lexicographically descending on (powers, params).
struct JetIndex {
  std::vector<int> powers;
  std::vector<int> params;
  int coord_degree() const;
  int order() const;
  bool operator<(const JetIndex& o) const;
  bool operator==(const JetIndex& o) const { return powers == o.powers && params == o.params; }
};

std::vector<JetIndex> indices_of_order(int M, int P, int order);
JetIndex unit_index(int M, int P, int i);
std::string index_key(const JetIndex& m);  // "2,1,0,0;1"

struct PolyField {
  int M = 0;
  int P = 0;
  std::map<JetIndex, VecC> coeffs;  // coefficient vectors of length M
  VecC eval(const VecC& c, const VecC& p = VecC()) const;
  // coefficient of monomial m in component i (0 if absent)
  cplx coeff(int i, const JetIndex& m) const;
  void add(int i, const JetIndex& m, cplx v);
};

struct DroppedTerm {
  int component;
  JetIndex index;
  cplx coeff;
  double exponent;  // epsilon order (corotation: mismatch frequency)
};

struct TransformedField {
  PolyField field;
  std::vector<DroppedTerm> dropped;
};

// c_i = e^{i w_i x} chat_i: removes i w_i c_i and keeps resonant monomials.
TransformedField corotate(const PolyField& f, const std::vector<double>& omega);

// x^ = eps^a x, c_i = eps^{b_i} chat_i, p_j = eps^{e_j} v_j. Keeps the
// eps^0 terms (parameters substituted); positive orders are dropped;
// a negative order with nonzero coefficient is an error.
TransformedField scale_field(const PolyField& f, double a, const std::vector<double>& b,
                             const std::vector<double>& e, const std::vector<cplx>& values, double zero_tol = 1e-12);

// Conjugate-pair coordinates (c_i, c_j = conj c_i) -> (X, Y) with c_i = X + iY;
// self-conjugate coordinates stay. Output coordinate order follows the first
// member of each pair. Coefficients of the result are real.
PolyField real_form(const PolyField& f, const std::vector<int>& partner);

// Keep only the listed coordinates (others set to zero).
PolyField restrict_field(const PolyField& f, const std::vector<int>& keep);

// Substitute parameter values.
PolyField substitute_params(const PolyField& f, const std::vector<cplx>& values);

// Jacobian at c (parameters already substituted).
MatC field_jacobian(const PolyField& f, const VecC& c);

}  // namespace cm
