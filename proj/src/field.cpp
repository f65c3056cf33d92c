#include "cm/field.hpp"

#include <algorithm>
#include <cmath>

#include "cm/errors.hpp"

namespace cm {

int JetIndex::coord_degree() const {
  int s = 0;
  for (int x : powers) s += x;
  return s;
}

int JetIndex::order() const {
  int s = coord_degree();
  for (int x : params) s += x;
  return s;
}

bool JetIndex::operator<(const JetIndex& o) const {
  if (order() != o.order()) return order() < o.order();
  if (powers != o.powers) return powers > o.powers;
  return params > o.params;
}

namespace {

void compositions(int slots, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == slots - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = total; k >= 0; --k) {
    cur.push_back(k);
    compositions(slots, total - k, cur, out);
    cur.pop_back();
  }
}

using RealPoly = std::map<std::vector<int>, cplx>;

RealPoly poly_mul(const RealPoly& a, const RealPoly& b) {
  RealPoly r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r[e] += ca * cb;
    }
  return r;
}

}  // namespace

std::vector<JetIndex> indices_of_order(int M, int P, int order) {
  std::vector<JetIndex> out;
  if (M + P == 0) return out;
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(M + P, order, cur, comps);
  for (const auto& c : comps)
    out.push_back({std::vector<int>(c.begin(), c.begin() + M), std::vector<int>(c.begin() + M, c.end())});
  std::sort(out.begin(), out.end());
  return out;
}

JetIndex unit_index(int M, int P, int i) {
  JetIndex m{std::vector<int>(M, 0), std::vector<int>(P, 0)};
  m.powers[i] = 1;
  return m;
}

std::string index_key(const JetIndex& m) {
  std::string s;
  for (size_t i = 0; i < m.powers.size(); ++i) s += (i ? "," : "") + std::to_string(m.powers[i]);
  s += ";";
  for (size_t i = 0; i < m.params.size(); ++i) s += (i ? "," : "") + std::to_string(m.params[i]);
  return s;
}

VecC PolyField::eval(const VecC& c, const VecC& p) const {
  VecC r = VecC::Zero(M);
  for (const auto& [m, v] : coeffs) {
    cplx mono = 1.0;
    for (int k = 0; k < M; ++k) mono *= ipow(c(k), m.powers[k]);
    for (int j = 0; j < P; ++j) mono *= ipow(p(j), m.params[j]);
    r += mono * v;
  }
  return r;
}

cplx PolyField::coeff(int i, const JetIndex& m) const {
  auto it = coeffs.find(m);
  return it == coeffs.end() ? cplx(0.0) : it->second(i);
}

void PolyField::add(int i, const JetIndex& m, cplx v) {
  auto it = coeffs.find(m);
  if (it == coeffs.end()) it = coeffs.emplace(m, VecC::Zero(M)).first;
  it->second(i) += v;
}

TransformedField corotate(const PolyField& f, const std::vector<double>& omega) {
  if (static_cast<int>(omega.size()) != f.M) throw InputError("corotate: frequency count mismatch");
  TransformedField r;
  r.field.M = f.M;
  r.field.P = f.P;
  for (const auto& [m, v] : f.coeffs)
    for (int i = 0; i < f.M; ++i) {
      cplx c = v(i);
      if (m.coord_degree() == 1 && m.powers[i] == 1 && m.order() == 1) c -= cplx(0.0, omega[i]);
      if (std::abs(c) == 0.0) continue;
      double mis = -omega[i];
      for (int k = 0; k < f.M; ++k) mis += m.powers[k] * omega[k];
      if (std::abs(mis) < 1e-9) {
        if (std::abs(c) > 1e-13) r.field.add(i, m, c);
      } else {
        r.dropped.push_back({i, m, c, mis});
      }
    }
  return r;
}

TransformedField scale_field(const PolyField& f, double a, const std::vector<double>& b, const std::vector<double>& e,
                             const std::vector<cplx>& values, double zero_tol) {
  if (static_cast<int>(b.size()) != f.M || static_cast<int>(e.size()) != f.P ||
      static_cast<int>(values.size()) != f.P)
    throw InputError("scale_field: exponent count mismatch");
  TransformedField r;
  r.field.M = f.M;
  r.field.P = 0;
  double scale = 0.0;
  for (const auto& [m, v] : f.coeffs) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (const auto& [m, v] : f.coeffs)
    for (int i = 0; i < f.M; ++i) {
      if (std::abs(v(i)) <= zero_tol * std::max(1.0, scale)) continue;
      double ex = -a - b[i];
      cplx c = v(i);
      for (int k = 0; k < f.M; ++k) ex += b[k] * m.powers[k];
      for (int j = 0; j < f.P; ++j) {
        ex += e[j] * m.params[j];
        c *= ipow(values[j], m.params[j]);
      }
      if (ex < -1e-12)
        throw InputError("scaling leaves a term of negative order (" + index_key(m) + " in component " +
                             std::to_string(i) + ")");
      if (std::abs(ex) <= 1e-12) {
        r.field.add(i, JetIndex{m.powers, {}}, c);
      } else {
        r.dropped.push_back({i, m, v(i), ex});
      }
    }
  return r;
}

PolyField real_form(const PolyField& f, const std::vector<int>& partner) {
  if (static_cast<int>(partner.size()) != f.M) throw InputError("real_form: partner list mismatch");
  // new coordinate slots
  std::vector<int> xslot(f.M, -1), yslot(f.M, -1);
  int R = 0;
  for (int i = 0; i < f.M; ++i) {
    if (partner[i] == i) {
      xslot[i] = R++;
    } else if (partner[i] > i) {
      xslot[i] = R++;
      yslot[i] = R++;
    }
  }
  // c_i as real polynomial
  std::vector<RealPoly> sub(f.M);
  for (int i = 0; i < f.M; ++i) {
    const int base = partner[i] >= i ? i : partner[i];
    std::vector<int> ex(R, 0);
    ex[xslot[base]] = 1;
    sub[i][ex] = 1.0;
    if (partner[i] != i) {
      std::vector<int> ey(R, 0);
      ey[yslot[base]] = 1;
      sub[i][ey] = partner[i] > i ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
    }
  }
  PolyField out;
  out.M = R;
  out.P = f.P;
  for (const auto& [m, v] : f.coeffs) {
    RealPoly mono{{std::vector<int>(R, 0), 1.0}};
    for (int k = 0; k < f.M; ++k)
      for (int q = 0; q < m.powers[k]; ++q) mono = poly_mul(mono, sub[k]);
    for (int i = 0; i < f.M; ++i) {
      if (v(i) == 0.0 || partner[i] < i) continue;
      for (const auto& [ex, c] : mono) {
        const cplx val = v(i) * c;
        JetIndex idx{ex, m.params};
        if (std::abs(val.real()) > 0.0) out.add(xslot[i], idx, val.real());
        if (yslot[i] >= 0 && std::abs(val.imag()) > 0.0) out.add(yslot[i], idx, val.imag());
      }
    }
  }
  return out;
}

PolyField restrict_field(const PolyField& f, const std::vector<int>& keep) {
  PolyField out;
  out.M = static_cast<int>(keep.size());
  out.P = f.P;
  for (const auto& [m, v] : f.coeffs) {
    bool ok = true;
    for (int k = 0; k < f.M; ++k)
      if (m.powers[k] && std::find(keep.begin(), keep.end(), k) == keep.end()) ok = false;
    if (!ok) continue;
    JetIndex idx{std::vector<int>(out.M), m.params};
    for (int s = 0; s < out.M; ++s) idx.powers[s] = m.powers[keep[s]];
    for (int s = 0; s < out.M; ++s)
      if (v(keep[s]) != 0.0) out.add(s, idx, v(keep[s]));
  }
  return out;
}

PolyField substitute_params(const PolyField& f, const std::vector<cplx>& values) {
  if (static_cast<int>(values.size()) != f.P) throw InputError("substitute_params: value count mismatch");
  PolyField out;
  out.M = f.M;
  out.P = 0;
  for (const auto& [m, v] : f.coeffs) {
    cplx s = 1.0;
    for (int j = 0; j < f.P; ++j) s *= ipow(values[j], m.params[j]);
    if (s == 0.0) continue;
    for (int i = 0; i < f.M; ++i)
      if (v(i) != 0.0) out.add(i, JetIndex{m.powers, {}}, s * v(i));
  }
  return out;
}

MatC field_jacobian(const PolyField& f, const VecC& c) {
  MatC J = MatC::Zero(f.M, f.M);
  for (const auto& [m, v] : f.coeffs)
    for (int k = 0; k < f.M; ++k) {
      if (m.powers[k] == 0) continue;
      cplx d = double(m.powers[k]);
      for (int l = 0; l < f.M; ++l) d *= ipow(c(l), m.powers[l] - (l == k ? 1 : 0));
      J.col(k) += d * v;
    }
  return J;
}

}  // namespace cm
