#pragma once

// Problem definitions (JSON schema 1) and the spectrum -> projection -> jet ->
// verification pipeline shared by the command-line tool and the tests.

#include <optional>
#include <string>
#include <vector>

#include "cm/json_io.hpp"
#include "cm/verify.hpp"

namespace cm {

struct ReductionPlan {
  std::vector<double> corotate;  // empty: none
  bool scaled = false;
  double x_exponent = 0.0;
  std::vector<double> coord_exponents;
  std::vector<double> param_exponents;
  std::vector<cplx> param_values;
  std::vector<int> real_coords;  // kept real-form slots; empty: all
};

struct VerifyPlan {
  std::string type;  // "homoclinic" | "front"
  std::vector<double> sweep;  // homoclinic: epsilon values
  double grid_h = 0.05;
  double delta = 1e-6;
  double step = 1e-3;
  double tol = 1e-4;
  // front
  std::string speed_param;
  std::vector<double> speeds;
  std::vector<double> saddle;
  std::vector<double> target;
  double epsilon = 0.01;
};

struct Problem {
  std::string name;
  KernelModel kernel;
  NonlinearitySpec nonlinearity;
  Flavor flavor = Flavor::Pointwise;
  Weight weight = Weight::Gaussian;
  int order = 3;
  std::vector<std::string> coord_names;
  std::optional<ReductionPlan> reduction;
  std::optional<VerifyPlan> verify;
};

KernelModel kernel_from_json(const json& j);
Problem problem_from_json(const json& j);
Problem load_problem(const std::string& path);  // InputError on I/O or schema failure

struct RunOptions {
  std::optional<int> order;
  double tol_root = 1e-7;
  double tol_solve = 1e-9;
  unsigned seed = 7;
};

struct Pipeline {
  Spectrum spectrum;
  KernelBasis basis;
  Projection projection;
  JetResult jet;
  std::vector<std::string> coord_names;
};

Spectrum run_spectrum(const Problem& p, const RunOptions& o);
Pipeline run_reduction(const Problem& p, const RunOptions& o);

struct ReducedSystem {
  PolyField corotated;
  TransformedField scaled;
  PolyField real;
  PolyField restricted;
};
// Applies the plan; param_values overrides the plan's values when given.
ReducedSystem apply_reduction(const Problem& p, const Pipeline& pl, const std::vector<cplx>& param_values = {});

struct VerifyOutcome {
  json report;
  std::vector<std::pair<std::string, std::string>> csv;  // file name, contents
  bool ok = true;
};
VerifyOutcome run_verify(const Problem& p, const Pipeline& pl, const RunOptions& o);

json spectrum_report(const Problem& p, const Spectrum& sp);
json reduce_report(const Problem& p, const Pipeline& pl);

}  // namespace cm
