#include "cm/verify.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "cm/errors.hpp"

namespace cm {

namespace {

VecC rk4_step(const PolyField& f, const VecC& c, double h) {
  const VecC k1 = f.eval(c);
  const VecC k2 = f.eval(c + 0.5 * h * k1);
  const VecC k3 = f.eval(c + 0.5 * h * k2);
  const VecC k4 = f.eval(c + h * k3);
  return c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_blowup(const VecC& c) {
  if (!c.allFinite() || c.norm() > 1e6) throw NumericalError("reduced trajectory blew up");
}

// Unstable eigenvector of the real Jacobian (largest positive eigenvalue).
VecC unstable_direction(const PolyField& f, const VecC& at) {
  MatC J = field_jacobian(f, at);
  Eigen::ComplexEigenSolver<MatC> es(J);
  int best = -1;
  for (int i = 0; i < J.rows(); ++i)
    if (es.eigenvalues()(i).real() > 1e-12 && std::abs(es.eigenvalues()(i).imag()) < 1e-9 &&
        (best < 0 || es.eigenvalues()(i).real() > es.eigenvalues()(best).real()))
      best = i;
  if (best < 0) throw NumericalError("equilibrium has no real unstable direction");
  VecC v = es.eigenvectors().col(best);
  // make it real: rotate by the phase of its largest entry
  int k = 0;
  v.cwiseAbs().maxCoeff(&k);
  v *= std::conj(v(k)) / std::abs(v(k));
  for (int i = 0; i < v.size(); ++i) v(i) = v(i).real();
  return v.normalized();
}

const KernelModel* lookup(const NonlinearitySpec& F, const std::string& name) {
  if (name.empty()) return nullptr;
  auto it = F.kernels.find(name);
  if (it == F.kernels.end()) throw InputError("unknown kernel reference '" + name + "'");
  return &it->second;
}

struct Tabulated {
  std::vector<MatC> w;  // K(kh), k = -W..W
  int W = 0;
};

Tabulated tabulate(const KernelModel& K, double h) {
  const double half = kernel_support_halfwidth(K, 1e-12);
  Tabulated t;
  t.w = tabulate_kernel(K, h, half);
  t.W = (static_cast<int>(t.w.size()) - 1) / 2;
  return t;
}

// (K*u)(x_j) = h sum_k K(kh) u(x_{j-k}), u extended by its edge values
std::vector<VecC> grid_convolve(const Tabulated& t, const std::vector<VecC>& u, double h) {
  const int N = static_cast<int>(u.size());
  const int n = static_cast<int>(u[0].size());
  std::vector<VecC> out(N, VecC::Zero(n));
  for (int j = 0; j < N; ++j) {
    VecC acc = VecC::Zero(n);
    for (int k = -t.W; k <= t.W; ++k) {
      const int idx = std::clamp(j - k, 0, N - 1);
      acc += t.w[k + t.W] * u[idx];
    }
    out[j] = h * acc;
  }
  return out;
}

std::vector<double> residual_values(const KernelModel& K, const NonlinearitySpec& F, const VecC& params,
                                    const std::vector<VecC>& u, double h) {
  const int N = static_cast<int>(u.size());
  std::map<std::string, Tabulated> tabs;
  auto tab = [&](const KernelModel& k, const std::string& key) -> const Tabulated& {
    auto it = tabs.find(key);
    if (it == tabs.end()) it = tabs.emplace(key, tabulate(k, h)).first;
    return it->second;
  };
  std::vector<VecC> r = grid_convolve(tab(K, ""), u, h);
  for (int j = 0; j < N; ++j) r[j] += u[j];
  std::map<std::string, std::vector<VecC>> conv;
  for (const auto& t : F.terms) {
    cplx s = t.coeff;
    for (size_t q = 0; q < t.param_powers.size(); ++q) s *= ipow(params(q), t.param_powers[q]);
    if (s == 0.0) continue;
    std::vector<cplx> prod(N, s);
    for (const auto& f : t.factors) {
      const std::vector<VecC>* v = &u;
      if (!f.kernel.empty()) {
        auto it = conv.find(f.kernel);
        if (it == conv.end())
          it = conv.emplace(f.kernel, grid_convolve(tab(*lookup(F, f.kernel), "k:" + f.kernel), u, h)).first;
        v = &it->second;
      }
      for (int j = 0; j < N; ++j) prod[j] *= (*v)[j](f.component);
    }
    std::vector<VecC> term(N, VecC::Zero(F.n));
    for (int j = 0; j < N; ++j) term[j](t.out_component) = prod[j];
    if (!t.outer.empty()) term = grid_convolve(tab(*lookup(F, t.outer), "k:" + t.outer), term, h);
    for (int j = 0; j < N; ++j) r[j] += term[j];
  }
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) out[j] = r[j].norm();
  return out;
}

}  // namespace

Trajectory integrate_reduced(const PolyField& f, const VecC& c0, double x0, double x1, double step) {
  if (f.P != 0) throw InputError("integrate_reduced: substitute parameters first");
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(x1 - x0) / step - 1e-9)));
  const double h = (x1 - x0) / n;
  Trajectory t;
  t.x.push_back(x0);
  t.c.push_back(c0);
  VecC c = c0;
  for (int i = 1; i <= n; ++i) {
    c = rk4_step(f, c, h);
    check_blowup(c);
    t.x.push_back(x0 + i * h);
    t.c.push_back(c);
  }
  return t;
}

HomoclinicResult shoot_homoclinic(const PolyField& f, double delta, double step, double x_max) {
  if (f.M != 2) throw InputError("homoclinic shooting needs a planar field");
  HomoclinicResult res;
  VecC v = unstable_direction(f, VecC::Zero(2));
  if (v(0).real() < 0.0) v = -v;
  VecC c = delta * v;
  Trajectory half;
  half.x.push_back(0.0);
  half.c.push_back(c);
  double x = 0.0;
  bool crossed = false;
  while (x < x_max) {
    VecC next = rk4_step(f, c, step);
    check_blowup(next);
    if (next(1).real() <= 0.0 && c(1).real() > 0.0) {
      // bisect the step for Y = 0
      double lo = 0.0, hi = step;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rk4_step(f, c, mid)(1).real() > 0.0 ? lo : hi) = mid;
      }
      const double hs = 0.5 * (lo + hi);
      c = rk4_step(f, c, hs);
      x += hs;
      half.x.push_back(x);
      half.c.push_back(c);
      crossed = true;
      break;
    }
    c = next;
    x += step;
    half.x.push_back(x);
    half.c.push_back(c);
  }
  if (!crossed) return res;
  res.x_section = x;
  res.amplitude = std::abs(c(0));
  // continue past the section: reversibility predicts a return to ~delta
  Trajectory back = integrate_reduced(f, c, x, 2.0 * x, step);
  res.return_distance = back.c.back().norm();
  res.found = res.return_distance < 1e-4;
  // orbit centred at the section, mirrored by (X, Y) -> (X, -Y)
  const int N = static_cast<int>(half.x.size());
  for (int i = 0; i < N; ++i) {
    res.orbit.x.push_back(half.x[i] - x);
    res.orbit.c.push_back(half.c[i]);
  }
  for (int i = N - 2; i >= 0; --i) {
    VecC m = half.c[i];
    m(1) = -m(1);
    res.orbit.x.push_back(x - half.x[i]);
    res.orbit.c.push_back(m);
  }
  return res;
}

VecC find_equilibrium(const PolyField& f, const VecC& guess) {
  VecC c = guess;
  for (int it = 0; it < 50; ++it) {
    VecC r = f.eval(c);
    if (r.norm() < 1e-14) break;
    c -= field_jacobian(f, c).fullPivLu().solve(r);
  }
  if (f.eval(c).norm() > 1e-10) throw NumericalError("equilibrium search did not converge");
  return c;
}

FrontResult shoot_front(const PolyField& f, const VecC& saddle_guess, const VecC& target, double delta, double step,
                        double x_max, double tol) {
  FrontResult res;
  res.saddle = find_equilibrium(f, saddle_guess);
  VecC v = unstable_direction(f, res.saddle);
  if ((v.adjoint() * (target - res.saddle))(0, 0).real() < 0.0) v = -v;
  VecC c = res.saddle + delta * v;
  const double dir = (target(0) - res.saddle(0)).real() >= 0.0 ? 1.0 : -1.0;
  res.orbit.x.push_back(0.0);
  res.orbit.c.push_back(c);
  res.monotone = true;
  double x = 0.0;
  while (x < x_max) {
    c = rk4_step(f, c, step);
    check_blowup(c);
    x += step;
    res.orbit.x.push_back(x);
    res.orbit.c.push_back(c);
    const double vel = dir * f.eval(c)(0).real();
    const double overshoot = dir * (c(0) - target(0)).real();
    if (vel < -tol || overshoot > tol) res.monotone = false;
    if ((c - target).norm() < tol) {
      res.found = true;
      break;
    }
  }
  res.end_distance = (c - target).norm();
  return res;
}

VecC lift(const Unscaling& U, const VecC& reduced, double x) {
  const int M = static_cast<int>(U.partner.size());
  // real-form slots
  std::vector<int> xslot(M, -1), yslot(M, -1);
  int R = 0;
  for (int i = 0; i < M; ++i) {
    if (U.partner[i] == i) xslot[i] = R++;
    else if (U.partner[i] > i) {
      xslot[i] = R++;
      yslot[i] = R++;
    }
  }
  VecC slots = VecC::Zero(R);
  for (size_t s = 0; s < U.keep.size(); ++s) slots(U.keep[s]) = reduced(s);
  VecC c(M);
  for (int i = 0; i < M; ++i) {
    const int base = U.partner[i] >= i ? i : U.partner[i];
    cplx X = slots(xslot[base]), Y = yslot[base] >= 0 ? slots(yslot[base]) : cplx(0.0);
    cplx chat = U.partner[i] == i ? X : (U.partner[i] > i ? X + cplx(0, 1) * Y : X - cplx(0, 1) * Y);
    const double w = U.omega.empty() ? 0.0 : U.omega[i];
    c(i) = std::exp(cplx(0.0, w * x)) * std::pow(U.eps, U.b[i]) * chat;
  }
  return c;
}

VecC sample(const Trajectory& t, double x) {
  if (x <= t.x.front()) return t.c.front();
  if (x >= t.x.back()) return t.c.back();
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  const size_t i = static_cast<size_t>(it - t.x.begin());
  const double s = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
  return (1.0 - s) * t.c[i - 1] + s * t.c[i];
}

GridProfile reconstruct(const JetResult& J, const KernelBasis& basis, const VecC& params, const std::vector<VecC>& coords,
                        double x0, double h) {
  GridProfile g;
  g.x0 = x0;
  g.h = h;
  std::vector<VecC> phi0;
  for (const auto& e : basis.elements) phi0.push_back(qp_eval(e, 0.0));
  std::vector<std::pair<JetIndex, VecC>> psi0;
  for (const auto& [m, q] : J.psi) psi0.emplace_back(m, qp_eval(q, 0.0));
  for (const auto& c : coords) {
    VecC u = VecC::Zero(basis.n);
    for (int i = 0; i < basis.size(); ++i) u += c(i) * phi0[i];
    for (const auto& [m, v] : psi0) {
      cplx mono = 1.0;
      for (int k = 0; k < J.M; ++k) mono *= ipow(c(k), m.powers[k]);
      for (int j = 0; j < J.P; ++j) mono *= ipow(params(j), m.params[j]);
      u += mono * v;
    }
    g.u.push_back(u);
  }
  return g;
}

ResidualReport residual(const KernelModel& K, const NonlinearitySpec& F, const VecC& params, const GridProfile& u) {
  ResidualReport rep;
  if (u.u.empty()) return rep;
  rep.pointwise = residual_values(K, F, params, u.u, u.h);
  for (double r : rep.pointwise) {
    rep.max_norm = std::max(rep.max_norm, r);
    rep.l2_norm += r * r * u.h;
  }
  rep.l2_norm = std::sqrt(rep.l2_norm);
  // coarse grid: every other point
  std::vector<VecC> coarse;
  for (size_t j = 0; j < u.u.size(); j += 2) coarse.push_back(u.u[j]);
  if (coarse.size() > 4) {
    auto rc = residual_values(K, F, params, coarse, 2.0 * u.h);
    for (size_t j = 0; j < rc.size(); ++j) rep.richardson = std::max(rep.richardson, std::abs(rep.pointwise[2 * j] - rc[j]) / 3.0);
  }
  rep.converged = rep.richardson <= std::max(0.1 * rep.max_norm, 1e-9);
  return rep;
}

}  // namespace cm
