#pragma once

// Nonlinearity F(u, p) as a finite sum of separable multilinear convolution
// terms: coeff * p^r * Outer * ( prod_i (K_i * u)_{c_i} ) placed in one output
// component.

#include <map>
#include <string>
#include <vector>

#include "cm/kernel.hpp"

namespace cm {

struct Factor {
  std::string kernel;  // empty: identity
  int component = 0;
};

struct TaylorTerm {
  cplx coeff = 1.0;
  std::vector<int> param_powers;  // one per parameter
  std::string outer;              // empty: identity
  std::vector<Factor> factors;    // u-degree = factors.size()
  int out_component = 0;
  int degree() const { return static_cast<int>(factors.size()); }
};

struct Symmetries {
  bool reflection = false;         // S1: u(x) -> u(-x)
  bool sign = false;               // S2: u -> -u
  std::vector<bool> odd_params;    // parameters flipping sign under S1
  std::vector<MatC> actions;       // orthogonal matrices rho: F(rho u) = rho F(u)
};

struct NonlinearitySpec {
  int n = 1;
  std::vector<std::string> params;
  std::map<std::string, KernelModel> kernels;
  std::vector<TaylorTerm> terms;
  Symmetries declared;
  int max_order() const;
};

// Structural checks: references resolve, dimensions agree, no constant term
// and no parameter-free linear term. Throws InputError.
void validate_nonlinearity(const NonlinearitySpec& F);

// Multilinear value of one term: coefficient included, parameter power not.
QuasiPolynomial apply_term(const NonlinearitySpec& F, const TaylorTerm& t, const std::vector<QuasiPolynomial>& args);

// F(u, p) on quasi-polynomials for given parameter values.
QuasiPolynomial eval_nonlinearity(const NonlinearitySpec& F, const QuasiPolynomial& u, const VecC& params);

struct SymmetryReport {
  bool ok = true;
  std::vector<std::string> violations;
};
// Declared symmetries: S2 by degree parity, S1 by kernel parities and odd
// parameters, matrix actions by evaluation on seeded random arguments.
SymmetryReport check_symmetries(const NonlinearitySpec& F, unsigned seed = 7);

}  // namespace cm
