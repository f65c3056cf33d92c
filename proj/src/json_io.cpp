#include "cm/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "cm/errors.hpp"

namespace cm {

namespace {

void dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // object_t is std::map: keys sorted
        if (!first) out += ',';
        first = false;
        out += json(k).dump();
        out += ':';
        dump_into(v, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) throw NumericalError("non-finite number in report");
      char buf[40];
      // -0 would not survive a parse round trip
      std::snprintf(buf, sizeof buf, "%.17g", d == 0.0 ? 0.0 : d);
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_stable(const json& j) {
  std::string s;
  dump_into(j, s);
  s += '\n';
  return s;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const VecC& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

json to_json(const QuasiPolynomial& q) {
  json terms = json::array();
  for (const auto& t : q.terms()) {
    json poly = json::array();
    for (const auto& c : t.poly) poly.push_back(to_json(c));
    terms.push_back({{"nu", to_json(t.nu)}, {"poly", poly}});
  }
  return {{"n", q.n()}, {"terms", terms}};
}

json to_json(const JetIndex& m) { return {{"powers", m.powers}, {"params", m.params}}; }

json to_json(const PolyField& f, const std::vector<std::string>& coords, const std::vector<std::string>& params) {
  json terms = json::array();
  for (const auto& [m, v] : f.coeffs)
    for (int i = 0; i < f.M; ++i) {
      if (v(i) == 0.0) continue;
      std::string mono;
      for (int k = 0; k < f.M; ++k)
        if (m.powers[k]) mono += (mono.empty() ? "" : "*") + coords[k] + (m.powers[k] > 1 ? "^" + std::to_string(m.powers[k]) : "");
      for (int k = 0; k < static_cast<int>(m.params.size()); ++k)
        if (m.params[k]) mono += (mono.empty() ? "" : "*") + params[k] + (m.params[k] > 1 ? "^" + std::to_string(m.params[k]) : "");
      terms.push_back({{"component", coords[i]}, {"index", to_json(m)}, {"monomial", mono}, {"coeff", to_json(v(i))}});
    }
  return {{"coords", coords}, {"params", params}, {"terms", terms}};
}

json to_json(const Spectrum& sp) {
  json roots = json::array();
  for (const auto& r : sp.roots) {
    json chains = json::array();
    for (const auto& ch : r.chains) {
      json c = json::array();
      for (const auto& v : ch) c.push_back(to_json(v));
      chains.push_back(c);
    }
    roots.push_back({{"nu", to_json(r.nu)},
                     {"algebraic_multiplicity", r.alg_mult},
                     {"geometric_multiplicity", r.geom_mult},
                     {"snap_distance", r.snap_distance},
                     {"chains", chains}});
  }
  const auto& c = sp.certificate;
  return {{"roots", roots},
          {"M", sp.M},
          {"strip_width", sp.strip_width},
          {"search_half_length", sp.search_half_length},
          {"winding_total", sp.winding_total},
          {"certificate", {{"re", {c.re0, c.re1}}, {"im", {c.im0, c.im1}}}},
          {"messages", sp.messages}};
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError("expected a number or [re, im], got " + j.dump());
}

QuasiPolynomial qp_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<QpTerm> terms;
  for (const auto& t : j.at("terms")) {
    QpTerm q{complex_from_json(t.at("nu")), {}};
    for (const auto& c : t.at("poly")) {
      VecC v(n);
      if (static_cast<int>(c.size()) != n) throw InputError("coefficient length differs from n");
      for (int i = 0; i < n; ++i) v(i) = complex_from_json(c[i]);
      q.poly.push_back(v);
    }
    terms.push_back(q);
  }
  return QuasiPolynomial(n, terms);
}

}  // namespace cm
