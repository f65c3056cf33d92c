#include "cm/problem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cm/errors.hpp"

namespace cm {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InputError(where + ": unknown field '" + k + "'");
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T def, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : def;
}

MatC matrix_from_json(const json& j, int n, const std::string& where) {
  // scalar or [re, im] means a multiple of the identity; otherwise nested rows
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()))
    return complex_from_json(j) * MatC::Identity(n, n);
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw InputError(where + ": matrix must have " + std::to_string(n) + " rows");
  MatC m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) throw InputError(where + ": bad matrix row");
    for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

std::vector<double> doubles(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(where + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

int param_index(const NonlinearitySpec& F, const std::string& name) {
  for (size_t i = 0; i < F.params.size(); ++i)
    if (F.params[i] == name) return static_cast<int>(i);
  throw InputError("unknown parameter '" + name + "'");
}

NonlinearitySpec nonlinearity_from_json(const json& j, const json& kernels, const std::vector<std::string>& params,
                                        int n) {
  NonlinearitySpec F;
  F.n = n;
  F.params = params;
  if (!kernels.is_null()) {
    if (!kernels.is_object()) throw InputError("kernels: expected an object");
    for (const auto& [name, d] : kernels.items()) F.kernels[name] = kernel_from_json(d);
  }
  if (j.is_null()) return F;
  check_keys(j, {"terms", "symmetries"}, "nonlinearity");
  for (const auto& t : get<json>(j, "terms", "nonlinearity")) {
    check_keys(t, {"coeff", "param_powers", "outer", "factors", "out"}, "nonlinearity term");
    TaylorTerm term;
    term.coeff = complex_from_json(get<json>(t, "coeff", "term"));
    term.param_powers = get_or<std::vector<int>>(t, "param_powers", std::vector<int>(params.size(), 0), "term");
    if (t.contains("outer") && !t["outer"].is_null()) term.outer = get<std::string>(t, "outer", "term");
    for (const auto& f : get<json>(t, "factors", "term")) {
      if (!f.is_array() || f.size() != 2 || !f[1].is_number_integer())
        throw InputError("term factor must be [kernel-or-null, component]");
      Factor fac;
      if (!f[0].is_null()) {
        if (!f[0].is_string()) throw InputError("factor kernel must be a name or null");
        fac.kernel = f[0].get<std::string>();
      }
      fac.component = f[1].get<int>();
      term.factors.push_back(fac);
    }
    term.out_component = get_or<int>(t, "out", 0, "term");
    F.terms.push_back(term);
  }
  if (j.contains("symmetries")) {
    const json& s = j["symmetries"];
    check_keys(s, {"reflection", "sign", "odd_params", "actions"}, "symmetries");
    F.declared.reflection = get_or<bool>(s, "reflection", false, "symmetries");
    F.declared.sign = get_or<bool>(s, "sign", false, "symmetries");
    F.declared.odd_params.assign(params.size(), false);
    for (const auto& name : get_or<std::vector<std::string>>(s, "odd_params", {}, "symmetries"))
      F.declared.odd_params[param_index(F, name)] = true;
    if (s.contains("actions"))
      for (const auto& a : s["actions"]) F.declared.actions.push_back(matrix_from_json(a, n, "symmetry action"));
  }
  validate_nonlinearity(F);
  return F;
}

std::vector<std::string> default_coord_names(const KernelBasis& b) {
  std::vector<std::string> names;
  for (int i = 0; i < b.size(); ++i) names.push_back("c" + std::to_string(i));
  return names;
}

std::vector<std::string> real_slot_names(const std::vector<std::string>& names, const std::vector<int>& partner) {
  std::vector<std::string> out;
  for (size_t i = 0; i < partner.size(); ++i) {
    if (partner[i] == static_cast<int>(i)) out.push_back(names[i]);
    else if (partner[i] > static_cast<int>(i)) {
      out.push_back("Re_" + names[i]);
      out.push_back("Im_" + names[i]);
    }
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string profile_csv(const GridProfile& g, const ResidualReport& r) {
  std::ostringstream os;
  os << "x";
  const int n = g.u.empty() ? 1 : static_cast<int>(g.u[0].size());
  for (int i = 0; i < n; ++i) {
    const std::string s = n == 1 ? "" : std::to_string(i);
    os << ",re_u" << s << ",im_u" << s;
  }
  os << ",residual\n";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (size_t j = 0; j < g.u.size(); ++j) {
    os << num(g.x(static_cast<int>(j)));
    for (int i = 0; i < n; ++i) os << ',' << num(g.u[j](i).real()) << ',' << num(g.u[j](i).imag());
    os << ',' << num(r.pointwise[j]) << '\n';
  }
  return os.str();
}

// Oscillation frequencies at finite parameters: imaginary parts of the linear
// eigenvalues nearest to the corotation frequencies.
std::vector<double> finite_frequencies(const PolyField& f, const std::vector<double>& omega, const std::vector<cplx>& p) {
  if (omega.empty()) return omega;
  PolyField lin = substitute_params(f, p);
  Eigen::ComplexEigenSolver<MatC> es(field_jacobian(lin, VecC::Zero(f.M)));
  std::vector<double> out;
  for (double w : omega) {
    double best = w, dist = 1e300;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i).imag() - w) < dist) {
        dist = std::abs(es.eigenvalues()(i).imag() - w);
        best = es.eigenvalues()(i).imag();
      }
    out.push_back(best);
  }
  return out;
}

}  // namespace

KernelModel kernel_from_json(const json& j) {
  if (!j.is_object()) throw InputError("kernel descriptor must be an object");
  const std::string family = get<std::string>(j, "family", "kernel");
  KernelModel K;
  if (family == "sum") {
    check_keys(j, {"family", "parts", "eta0"}, "sum kernel");
    const json& parts = get<json>(j, "parts", "sum kernel");
    if (!parts.is_array() || parts.empty()) throw InputError("sum kernel needs parts");
    K = kernel_from_json(parts[0]);
    for (size_t i = 1; i < parts.size(); ++i) K = kernel_sum(K, kernel_from_json(parts[i]));
    if (j.contains("eta0")) K.eta0 = std::min(K.eta0, get<double>(j, "eta0", "sum kernel"));
    return K;
  }
  if (family == "scaled") {
    check_keys(j, {"family", "factor", "kernel"}, "scaled kernel");
    KernelModel inner = kernel_from_json(get<json>(j, "kernel", "scaled kernel"));
    return kernel_scaled(inner, matrix_from_json(get<json>(j, "factor", "scaled kernel"), inner.n, "factor"));
  }
  K.n = get_or<int>(j, "n", 1, "kernel");
  if (K.n < 1) throw InputError("kernel dimension must be positive");
  if (family == "gaussian_mixture") {
    check_keys(j, {"family", "n", "eta0", "terms"}, "gaussian_mixture");
    K.eta0 = get_or<double>(j, "eta0", 10.0, "gaussian_mixture");
    GaussianMixture g;
    for (const auto& t : get<json>(j, "terms", "gaussian_mixture")) {
      check_keys(t, {"c", "a", "b", "p"}, "gaussian term");
      GaussianTerm gt{matrix_from_json(get<json>(t, "c", "gaussian term"), K.n, "c"), get<double>(t, "a", "gaussian term"),
                      get_or<double>(t, "b", 0.0, "gaussian term"), get_or<int>(t, "p", 0, "gaussian term")};
      if (gt.a <= 0.0 || gt.p < 0) throw InputError("gaussian term needs a > 0 and p >= 0");
      g.terms.push_back(gt);
    }
    K.parts.push_back(g);
  } else if (family == "exponential_mixture") {
    check_keys(j, {"family", "n", "eta0", "terms"}, "exponential_mixture");
    ExponentialMixture e;
    double amin = 1e300;
    for (const auto& t : get<json>(j, "terms", "exponential_mixture")) {
      check_keys(t, {"c", "a", "b"}, "exponential term");
      ExponentialTerm et{matrix_from_json(get<json>(t, "c", "exponential term"), K.n, "c"),
                         get<double>(t, "a", "exponential term"), get_or<double>(t, "b", 0.0, "exponential term")};
      if (et.a <= 0.0) throw InputError("exponential term needs a > 0");
      amin = std::min(amin, et.a);
      e.terms.push_back(et);
    }
    K.eta0 = get_or<double>(j, "eta0", amin, "exponential_mixture");
    K.parts.push_back(e);
  } else if (family == "dirac_mixture") {
    check_keys(j, {"family", "n", "eta0", "terms"}, "dirac_mixture");
    K.eta0 = get_or<double>(j, "eta0", 10.0, "dirac_mixture");
    DiracMixture d;
    for (const auto& t : get<json>(j, "terms", "dirac_mixture")) {
      check_keys(t, {"A", "xi"}, "dirac term");
      d.terms.push_back({matrix_from_json(get<json>(t, "A", "dirac term"), K.n, "A"), get<double>(t, "xi", "dirac term")});
    }
    K.parts.push_back(d);
  } else if (family == "symbol") {
    check_keys(j, {"family", "n", "eta0", "numerator", "denominator", "base", "poles_hint"}, "symbol");
    K.eta0 = get_or<double>(j, "eta0", 10.0, "symbol");
    RationalSymbol s;
    for (const auto& c : get<json>(j, "numerator", "symbol")) s.numerator.push_back(matrix_from_json(c, K.n, "numerator"));
    for (const auto& c : get<json>(j, "denominator", "symbol")) s.denominator.push_back(matrix_from_json(c, K.n, "denominator"));
    if (s.numerator.empty() || s.denominator.empty()) throw InputError("symbol needs numerator and denominator");
    if (j.contains("base") && !j["base"].is_null()) {
      auto base = std::make_shared<KernelModel>(kernel_from_json(j["base"]));
      if (base->n != K.n) throw InputError("symbol base dimension mismatch");
      K.eta0 = std::min(K.eta0, base->eta0);
      s.base = base;
    }
    if (j.contains("poles_hint"))
      for (const auto& p : j["poles_hint"]) {
        const double re = std::abs(complex_from_json(p).real());
        if (re <= 0.0) throw InputError("poles_hint: pole on the imaginary axis");
        K.eta0 = std::min(K.eta0, 0.99 * re);
      }
    K.parts.push_back(s);
  } else {
    throw InputError("unknown kernel family '" + family + "'");
  }
  return K;
}

Problem problem_from_json(const json& j) {
  check_keys(j, {"schema", "name", "kernel", "kernels", "parameters", "nonlinearity", "projection", "order",
                 "coord_names", "reduction", "verify"},
             "problem");
  if (get<int>(j, "schema", "problem") != 1) throw InputError("unsupported schema version");
  Problem p;
  p.name = get_or<std::string>(j, "name", "", "problem");
  p.kernel = kernel_from_json(get<json>(j, "kernel", "problem"));
  const auto params = get_or<std::vector<std::string>>(j, "parameters", {}, "problem");
  p.nonlinearity = nonlinearity_from_json(j.value("nonlinearity", json()), j.value("kernels", json()), params, p.kernel.n);
  if (j.contains("projection")) {
    const json& pr = j["projection"];
    check_keys(pr, {"flavor", "weight"}, "projection");
    const std::string fl = get<std::string>(pr, "flavor", "projection");
    if (fl == "pointwise") p.flavor = Flavor::Pointwise;
    else if (fl == "gram") {
      p.flavor = Flavor::Gram;
      const std::string w = get_or<std::string>(pr, "weight", "gaussian", "projection");
      if (w == "gaussian") p.weight = Weight::Gaussian;
      else if (w == "sech") p.weight = Weight::Sech;
      else throw InputError("unknown projection weight '" + w + "'");
    } else throw InputError("unknown projection flavor '" + fl + "'");
  }
  p.order = get_or<int>(j, "order", 3, "problem");
  p.coord_names = get_or<std::vector<std::string>>(j, "coord_names", {}, "problem");
  if (j.contains("reduction")) {
    const json& r = j["reduction"];
    check_keys(r, {"corotate", "scaling", "real_coords"}, "reduction");
    ReductionPlan plan;
    if (r.contains("corotate")) plan.corotate = doubles(r["corotate"], "corotate");
    if (r.contains("scaling")) {
      const json& s = r["scaling"];
      check_keys(s, {"x", "coords", "params", "values"}, "scaling");
      plan.scaled = true;
      plan.x_exponent = get<double>(s, "x", "scaling");
      plan.coord_exponents = doubles(get<json>(s, "coords", "scaling"), "scaling coords");
      plan.param_exponents = doubles(get_or<json>(s, "params", json::array(), "scaling"), "scaling params");
      for (const auto& v : get_or<json>(s, "values", json::array(), "scaling")) plan.param_values.push_back(complex_from_json(v));
      if (plan.param_exponents.size() != params.size() || plan.param_values.size() != params.size())
        throw InputError("scaling: one exponent and one value per parameter required");
    }
    plan.real_coords = get_or<std::vector<int>>(r, "real_coords", {}, "reduction");
    p.reduction = plan;
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    check_keys(v, {"type", "sweep", "grid_h", "delta", "step", "tol", "speed_param", "speeds", "saddle", "target", "epsilon"},
               "verify");
    VerifyPlan plan;
    plan.type = get<std::string>(v, "type", "verify");
    if (plan.type != "homoclinic" && plan.type != "front") throw InputError("verify type must be homoclinic or front");
    if (!p.reduction || !p.reduction->scaled) throw InputError("verify needs a reduction with scaling");
    plan.sweep = doubles(get_or<json>(v, "sweep", json::array(), "verify"), "sweep");
    plan.grid_h = get_or<double>(v, "grid_h", 0.05, "verify");
    plan.delta = get_or<double>(v, "delta", 1e-6, "verify");
    plan.step = get_or<double>(v, "step", 1e-3, "verify");
    plan.tol = get_or<double>(v, "tol", 1e-4, "verify");
    plan.speed_param = get_or<std::string>(v, "speed_param", "", "verify");
    plan.speeds = doubles(get_or<json>(v, "speeds", json::array(), "verify"), "speeds");
    plan.saddle = doubles(get_or<json>(v, "saddle", json::array(), "verify"), "saddle");
    plan.target = doubles(get_or<json>(v, "target", json::array(), "verify"), "target");
    plan.epsilon = get_or<double>(v, "epsilon", 0.01, "verify");
    if (plan.type == "front") {
      if (!plan.speed_param.empty()) param_index(p.nonlinearity, plan.speed_param);
      if (plan.speeds.empty() || plan.saddle.empty() || plan.saddle.size() != plan.target.size())
        throw InputError("front verification needs speeds, saddle and target");
    } else if (plan.sweep.empty()) {
      throw InputError("homoclinic verification needs a sweep");
    }
    p.verify = plan;
  }
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  return problem_from_json(j);
}

Spectrum run_spectrum(const Problem& p, const RunOptions& o) {
  SpectrumOptions so;
  so.tol_root = o.tol_root;
  return locate_roots(p.kernel, so);
}

Pipeline run_reduction(const Problem& p, const RunOptions& o) {
  Pipeline pl;
  pl.spectrum = run_spectrum(p, o);
  if (pl.spectrum.M == 0) throw NumericalError("no characteristic roots on the imaginary axis: nothing to reduce");
  pl.basis = build_basis(p.kernel, pl.spectrum);
  pl.projection = p.flavor == Flavor::Pointwise ? build_pointwise(pl.basis) : build_gram(pl.basis, p.weight);
  JetOptions jo;
  jo.order = o.order.value_or(p.order);
  jo.tol_solve = o.tol_solve;
  jo.seed = o.seed;
  pl.jet = compute_jet(p.kernel, pl.spectrum, pl.projection, p.nonlinearity, jo);
  pl.coord_names = p.coord_names;
  if (pl.coord_names.empty()) pl.coord_names = default_coord_names(pl.basis);
  if (static_cast<int>(pl.coord_names.size()) != pl.basis.size())
    throw InputError("coord_names has " + std::to_string(pl.coord_names.size()) + " entries for " +
                     std::to_string(pl.basis.size()) + " kernel coordinates");
  return pl;
}

ReducedSystem apply_reduction(const Problem& p, const Pipeline& pl, const std::vector<cplx>& param_values) {
  if (!p.reduction) throw InputError("problem has no reduction plan");
  const ReductionPlan& r = *p.reduction;
  ReducedSystem s;
  s.corotated = pl.jet.field;
  if (!r.corotate.empty()) s.corotated = corotate(pl.jet.field, r.corotate).field;
  if (r.scaled) {
    if (static_cast<int>(r.coord_exponents.size()) != pl.jet.M) throw InputError("scaling: one exponent per coordinate required");
    s.scaled = scale_field(s.corotated, r.x_exponent, r.coord_exponents, r.param_exponents,
                           param_values.empty() ? r.param_values : param_values);
  } else {
    s.scaled.field = substitute_params(s.corotated, param_values.empty() ? r.param_values : param_values);
  }
  s.real = real_form(s.scaled.field, pl.basis.conj_partner);
  if (r.real_coords.empty()) {
    s.restricted = s.real;
  } else {
    for (int k : r.real_coords)
      if (k < 0 || k >= s.real.M) throw InputError("real_coords index out of range");
    s.restricted = restrict_field(s.real, r.real_coords);
  }
  return s;
}

json spectrum_report(const Problem& p, const Spectrum& sp) {
  return {{"schema", 1}, {"name", p.name}, {"spectrum", to_json(sp)}};
}

json reduce_report(const Problem& p, const Pipeline& pl) {
  const auto& J = pl.jet;
  json psi = json::object();
  for (const auto& [m, q] : J.psi) psi[index_key(m)] = to_json(q);
  json basis = json::array();
  for (int i = 0; i < pl.basis.size(); ++i) {
    const auto& l = pl.basis.labels[i];
    basis.push_back({{"name", pl.coord_names[i]}, {"nu", to_json(l.nu)}, {"chain", l.chain}, {"power", l.power},
                     {"conjugate", pl.coord_names[pl.basis.conj_partner[i]]}, {"element", to_json(pl.basis.elements[i])}});
  }
  json proj = {{"flavor", pl.projection.flavor == Flavor::Pointwise ? "pointwise" : "gram"},
               {"condition", pl.projection.condition},
               {"extra_orders", pl.projection.extra_orders}};
  if (pl.projection.flavor == Flavor::Gram) proj["weight"] = pl.projection.weight == Weight::Gaussian ? "gaussian" : "sech";
  json field = {{"complex", to_json(J.field, pl.coord_names, p.nonlinearity.params)},
                {"real", to_json(real_form(J.field, pl.basis.conj_partner), real_slot_names(pl.coord_names, pl.basis.conj_partner),
                                 p.nonlinearity.params)}};
  if (p.reduction) {
    ReducedSystem s = apply_reduction(p, pl);
    json dropped = json::array();
    for (const auto& d : s.scaled.dropped)
      dropped.push_back({{"component", pl.coord_names[d.component]}, {"index", to_json(d.index)}, {"order", d.exponent}});
    std::vector<std::string> rnames = real_slot_names(pl.coord_names, pl.basis.conj_partner), kept;
    if (p.reduction->real_coords.empty()) kept = rnames;
    else
      for (int k : p.reduction->real_coords) kept.push_back(rnames[k]);
    field["scaled"] = {{"complex", to_json(s.scaled.field, pl.coord_names, {})},
                       {"reduced", to_json(s.restricted, kept, {})},
                       {"dropped", dropped}};
  }
  json residuals = json::array();
  for (int o = 2; o <= J.order; ++o) residuals.push_back(J.residual_by_order[o]);
  return {{"schema", 1},
          {"name", p.name},
          {"order", J.order},
          {"spectrum", to_json(pl.spectrum)},
          {"basis", basis},
          {"projection", proj},
          {"psi", psi},
          {"field", field},
          {"residual_by_order", residuals},
          {"symmetry_skipped", J.symmetry_skipped}};
}

VerifyOutcome run_verify(const Problem& p, const Pipeline& pl, const RunOptions& o) {
  (void)o;
  if (!p.verify) throw InputError("problem has no verify section");
  const VerifyPlan& v = *p.verify;
  const ReductionPlan& r = *p.reduction;
  VerifyOutcome out;
  out.report = {{"schema", 1}, {"name", p.name}, {"type", v.type}};
  const double bmin = *std::min_element(r.coord_exponents.begin(), r.coord_exponents.end());

  auto profile = [&](const Trajectory& orbit, double eps, const std::vector<cplx>& pvals, const std::string& tag,
                     json& entry) {
    std::vector<cplx> actual(pvals.size());
    VecC pv(pvals.size());
    for (size_t j = 0; j < pvals.size(); ++j) {
      actual[j] = std::pow(eps, r.param_exponents[j]) * pvals[j];
      pv(j) = actual[j];
    }
    Unscaling U{finite_frequencies(pl.jet.field, r.corotate, actual), r.x_exponent, r.coord_exponents, eps,
                pl.basis.conj_partner, r.real_coords};
    if (U.keep.empty())
      for (int k = 0; k < static_cast<int>(orbit.c[0].size()); ++k) U.keep.push_back(k);
    const double sx = std::pow(eps, r.x_exponent);
    const double x0 = orbit.x.front() / sx, x1 = orbit.x.back() / sx;
    const int N = static_cast<int>(std::floor((x1 - x0) / v.grid_h));
    std::vector<VecC> cs;
    for (int j = 0; j <= N; ++j) {
      const double x = x0 + j * v.grid_h;
      cs.push_back(lift(U, sample(orbit, x * sx), x));
    }
    GridProfile g = reconstruct(pl.jet, pl.basis, pv, cs, x0, v.grid_h);
    ResidualReport res = residual(p.kernel, p.nonlinearity, pv, g);
    double amp = 0.0;
    for (const auto& u : g.u) amp = std::max(amp, u.norm());
    entry["epsilon"] = eps;
    entry["params"] = to_json(pv);
    entry["amplitude"] = amp;
    entry["amplitude_ratio"] = amp / std::pow(eps, bmin);
    entry["residual_max"] = res.max_norm;
    entry["residual_l2"] = res.l2_norm;
    entry["richardson"] = res.richardson;
    entry["quadrature_converged"] = res.converged;
    entry["grid_points"] = N + 1;
    if (!res.converged) out.ok = false;
    out.csv.emplace_back(tag + ".csv", profile_csv(g, res));
    return std::make_pair(amp, res.max_norm);
  };

  if (v.type == "homoclinic") {
    ReducedSystem s = apply_reduction(p, pl);
    HomoclinicResult h = shoot_homoclinic(s.restricted, v.delta, v.step);
    out.report["homoclinic"] = {{"found", h.found},
                                {"section", h.x_section},
                                {"return_distance", h.return_distance},
                                {"amplitude", h.amplitude}};
    if (!h.found) {
      out.ok = false;
      return out;
    }
    json runs = json::array();
    std::vector<double> amps, ress;
    for (size_t i = 0; i < v.sweep.size(); ++i) {
      json e;
      auto [amp, res] = profile(h.orbit, v.sweep[i], r.param_values, "profile_" + std::to_string(i), e);
      amps.push_back(amp);
      ress.push_back(res);
      runs.push_back(e);
    }
    out.report["runs"] = runs;
    if (v.sweep.size() >= 2) out.report["residual_amplitude_slope"] = fit_slope(amps, ress);
    return out;
  }

  // front
  const int ci = v.speed_param.empty() ? -1 : param_index(p.nonlinearity, v.speed_param);
  json runs = json::array();
  for (size_t i = 0; i < v.speeds.size(); ++i) {
    std::vector<cplx> vals = r.param_values;
    if (ci >= 0) vals[ci] = v.speeds[i];
    ReducedSystem s = apply_reduction(p, pl, vals);
    VecC saddle(v.saddle.size()), target(v.target.size());
    for (size_t k = 0; k < v.saddle.size(); ++k) {
      saddle(k) = v.saddle[k];
      target(k) = v.target[k];
    }
    if (saddle.size() != s.restricted.M) throw InputError("saddle dimension differs from the reduced system");
    FrontResult f = shoot_front(s.restricted, saddle, target, v.delta, v.step, 200.0, v.tol);
    json e = {{"speed", v.speeds[i]},
              {"found", f.found},
              {"monotone", f.monotone},
              {"end_distance", f.end_distance},
              {"saddle", to_json(f.saddle)}};
    if (!f.found) out.ok = false;
    if (f.found) profile(f.orbit, v.epsilon, vals, "front_" + std::to_string(i), e);
    runs.push_back(e);
  }
  out.report["runs"] = runs;
  return out;
}

}  // namespace cm
