#include "cm/kernel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cm/errors.hpp"

namespace cm {

namespace {

using CSeries = Series<cplx>;

MatC as_matrix(int n, cplx c) { return c * MatC::Identity(n, n); }

int part_count_dirac(const KernelModel& K) {
  int c = 0;
  for (const auto& p : K.parts)
    if (std::holds_alternative<DiracMixture>(p)) ++c;
  return c;
}

// sqrt(pi/a) e^{(nu0+h)^2/(4a)}
CSeries gaussian_base(double a, cplx nu0, int order) {
  CSeries f(order);
  f[0] = nu0 * nu0 / (4.0 * a);
  if (order >= 1) f[1] = 2.0 * nu0 / (4.0 * a);
  if (order >= 2) f[2] = 1.0 / (4.0 * a);
  return cplx(std::sqrt(M_PI / a)) * exp(f);
}

CSeries exp_linear(cplx c0, cplx c1, int order) {
  CSeries f(order);
  f[0] = c0;
  if (order >= 1) f[1] = c1;
  return exp(f);
}

MatSeries gaussian_series(const GaussianMixture& g, int n, cplx nu0, int order) {
  MatSeries r = mat_series_zero(order, n, n);
  for (const auto& t : g.terms) {
    if (t.a <= 0.0) throw InputError("gaussian term requires a > 0");
    CSeries s = gaussian_base(t.a, nu0, order + t.p);
    for (int i = 0; i < t.p; ++i) s = cplx(-1.0) * derivative(s);
    s = truncate(s, order);
    s = s * exp_linear(-t.b * nu0, -t.b, order);
    for (int k = 0; k <= order; ++k) r[k] += s[k] * t.c;
  }
  return r;
}

MatSeries exponential_series(const ExponentialMixture& e, int n, cplx nu0, int order) {
  MatSeries r = mat_series_zero(order, n, n);
  for (const auto& t : e.terms) {
    if (t.a <= 0.0) throw InputError("exponential term requires a > 0");
    if (std::abs(nu0.real()) >= t.a) throw NumericalError("transform evaluated beyond exponential kernel pole");
    CSeries plus(order, t.a + nu0), minus(order, t.a - nu0);
    if (order >= 1) {
      plus[1] = 1.0;
      minus[1] = -1.0;
    }
    CSeries s = reciprocal(plus) + reciprocal(minus);
    s = s * exp_linear(-t.b * nu0, -t.b, order);
    for (int k = 0; k <= order; ++k) r[k] += s[k] * t.c;
  }
  return r;
}

MatSeries dirac_series(const DiracMixture& d, int n, cplx nu0, int order) {
  MatSeries r = mat_series_zero(order, n, n);
  for (const auto& t : d.terms) {
    CSeries s = exp_linear(-t.xi * nu0, -t.xi, order);
    for (int k = 0; k <= order; ++k) r[k] += s[k] * t.A;
  }
  return r;
}

MatSeries rational_series(const RationalSymbol& s, int n, cplx nu0, int order) {
  if (s.denominator.empty() || s.numerator.empty()) throw InputError("symbol needs numerator and denominator");
  const int rows = static_cast<int>(s.numerator[0].rows());
  MatSeries num = mat_poly_series(s.numerator, nu0, order, rows, static_cast<int>(s.numerator[0].cols()));
  MatSeries den = mat_poly_series(s.denominator, nu0, order, rows, rows);
  if (std::abs(den[0].determinant()) < 1e-300) throw NumericalError("symbol evaluated at a pole");
  MatSeries r = mat_series_mul(mat_series_inverse(den), num);
  if (s.base) r = mat_series_mul(r, transform_series(*s.base, nu0, order));
  if (r[0].rows() != n || r[0].cols() != n) throw InputError("symbol dimension mismatch");
  return r;
}

MatSeries closure_series(const ClosureSymbol& c, int n, cplx nu0, int order) {
  if (std::abs(nu0.real()) >= c.width) throw NumericalError("symbol evaluated outside its analyticity strip");
  MatSeries r = mat_series_zero(order, n, n);
  if (c.derivative) {
    for (int k = 0; k <= order; ++k) r[k] = c.derivative(nu0, k) / factorial(k);
    return r;
  }
  // Trapezoidal Cauchy integral on a circle: spectrally accurate for analytic symbols.
  const double rad = std::min(0.25, 0.5 * (c.width - std::abs(nu0.real())));
  const int N = 64;
  for (int j = 0; j < N; ++j) {
    const cplx w = std::polar(1.0, 2.0 * M_PI * j / N);
    MatC f = c.symbol(nu0 + rad * w);
    for (int k = 0; k <= order; ++k) r[k] += f * (ipow(1.0 / (rad * w), k) / double(N));
  }
  return r;
}

// Roots of det(Den(nu)) by interpolation on the unit circle + companion matrix.
std::vector<cplx> det_poly_roots(const std::vector<MatC>& den) {
  const int n = static_cast<int>(den[0].rows());
  const int deg = n * (static_cast<int>(den.size()) - 1);
  if (deg <= 0) return {};
  const int N = deg + 1;
  std::vector<cplx> vals(N);
  for (int j = 0; j < N; ++j) {
    const cplx z = std::polar(1.0, 2.0 * M_PI * j / N);
    MatC m = MatC::Zero(n, n);
    for (int k = static_cast<int>(den.size()) - 1; k >= 0; --k) m = m * z + den[k];
    vals[j] = m.determinant();
  }
  std::vector<cplx> coef(N);
  double mx = 0.0;
  for (int k = 0; k < N; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < N; ++j) acc += vals[j] * std::polar(1.0, -2.0 * M_PI * j * k / N);
    coef[k] = acc / double(N);
    mx = std::max(mx, std::abs(coef[k]));
  }
  int d = N - 1;
  while (d > 0 && std::abs(coef[d]) < 1e-12 * mx) --d;
  if (d == 0) return {};
  MatC comp = MatC::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -coef[i] / coef[d];
  Eigen::ComplexEigenSolver<MatC> es(comp, false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
  return roots;
}

double op_norm(const MatC& m) {
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<MatC> svd(m);
  return svd.singularValues()(0);
}

std::vector<cplx> probe_points(double w) {
  return {cplx(0.0, 0.37), cplx(0.3 * w, 1.3), cplx(-0.2 * w, -0.71), cplx(0.15 * w, 2.9), cplx(0.1 * w, 0.0)};
}

double strip_probe_width(const KernelModel& K) {
  double w = K.eta0;
  for (const auto& p : K.parts) {
    if (auto e = std::get_if<ExponentialMixture>(&p))
      for (const auto& t : e->terms) w = std::min(w, t.a);
    if (auto c = std::get_if<ClosureSymbol>(&p)) w = std::min(w, c->width);
    if (auto r = std::get_if<RationalSymbol>(&p)) {
      for (const auto& z : det_poly_roots(r->denominator)) w = std::min(w, std::abs(z.real()));
      if (r->base) w = std::min(w, strip_probe_width(*r->base));
    }
  }
  return 0.5 * w;
}

}  // namespace

KernelModel gaussian_kernel(cplx c, double a, double b, int p, double eta0) {
  KernelModel K;
  K.n = 1;
  K.eta0 = eta0;
  K.parts.push_back(GaussianMixture{{GaussianTerm{as_matrix(1, c), a, b, p}}});
  return K;
}

KernelModel exponential_kernel(cplx c, double a, double b) {
  KernelModel K;
  K.n = 1;
  K.eta0 = a;
  K.parts.push_back(ExponentialMixture{{ExponentialTerm{as_matrix(1, c), a, b}}});
  return K;
}

KernelModel dirac_kernel(cplx A, double xi, double eta0) {
  KernelModel K;
  K.n = 1;
  K.eta0 = eta0;
  K.parts.push_back(DiracMixture{{DiracTerm{as_matrix(1, A), xi}}});
  return K;
}

KernelModel kernel_sum(const KernelModel& a, const KernelModel& b) {
  if (a.n != b.n) throw InputError("kernel_sum: dimension mismatch");
  KernelModel K = a;
  K.eta0 = std::min(a.eta0, b.eta0);
  K.parts.insert(K.parts.end(), b.parts.begin(), b.parts.end());
  return K;
}

KernelModel kernel_scaled(const KernelModel& k, cplx s) { return kernel_scaled(k, as_matrix(k.n, s)); }

KernelModel kernel_scaled(const KernelModel& k, const MatC& s) {
  if (s.rows() != k.n || s.cols() != k.n) throw InputError("kernel_scaled: dimension mismatch");
  KernelModel K = k;
  for (auto& p : K.parts) {
    if (auto g = std::get_if<GaussianMixture>(&p))
      for (auto& t : g->terms) t.c = s * t.c;
    if (auto e = std::get_if<ExponentialMixture>(&p))
      for (auto& t : e->terms) t.c = s * t.c;
    if (auto d = std::get_if<DiracMixture>(&p))
      for (auto& t : d->terms) t.A = s * t.A;
    if (auto r = std::get_if<RationalSymbol>(&p)) {
      // Den^{-1} Num -> s Den^{-1} Num: fold into a new symbol with base
      auto inner = std::make_shared<KernelModel>();
      inner->n = k.n;
      inner->eta0 = k.eta0;
      inner->parts.push_back(*r);
      p = RationalSymbol{{s}, {MatC::Identity(k.n, k.n)}, inner};
    }
    if (auto c = std::get_if<ClosureSymbol>(&p)) {
      ClosureSymbol cs = *c;
      auto f = c->symbol;
      cs.symbol = [f, s](cplx nu) { return MatC(s * f(nu)); };
      if (c->derivative) {
        auto df = c->derivative;
        cs.derivative = [df, s](cplx nu, int k) { return MatC(s * df(nu, k)); };
      }
      p = cs;
    }
  }
  return K;
}

MatSeries transform_series(const KernelModel& K, cplx nu, int order) {
  if (std::abs(nu.real()) >= K.eta0) throw NumericalError("transform requested outside the analyticity strip");
  MatSeries r = mat_series_zero(order, K.n, K.n);
  for (const auto& part : K.parts) {
    MatSeries s;
    if (auto g = std::get_if<GaussianMixture>(&part)) s = gaussian_series(*g, K.n, nu, order);
    else if (auto e = std::get_if<ExponentialMixture>(&part)) s = exponential_series(*e, K.n, nu, order);
    else if (auto d = std::get_if<DiracMixture>(&part)) s = dirac_series(*d, K.n, nu, order);
    else if (auto rs = std::get_if<RationalSymbol>(&part)) s = rational_series(*rs, K.n, nu, order);
    else s = closure_series(std::get<ClosureSymbol>(part), K.n, nu, order);
    for (int k = 0; k <= order; ++k) r[k] += s[k];
  }
  for (const auto& m : r)
    if (!m.allFinite()) throw NumericalError("transform evaluation is not finite");
  return r;
}

MatC transform(const KernelModel& K, cplx nu, int order) {
  return factorial(order) * transform_series(K, nu, order)[order];
}

MatC moment(const KernelModel& K, int m, cplx nu) {
  return ((m % 2 == 0) ? 1.0 : -1.0) * transform(K, nu, m);
}

QuasiPolynomial convolve_qp(const KernelModel& K, const QuasiPolynomial& u) {
  if (u.n() != K.n) throw InputError("convolve_qp: dimension mismatch");
  std::vector<QpTerm> out;
  for (const auto& t : u.terms()) {
    const int q = t.degree();
    MatSeries T = transform_series(K, t.nu, q);
    QpTerm r{t.nu, std::vector<VecC>(q + 1, VecC::Zero(K.n))};
    // K * (x^j e^{nu x}) = e^{nu x} sum_s C(j,s) (j-s)! T_{j-s} x^s
    for (int j = 0; j <= q; ++j)
      for (int s = 0; s <= j; ++s) r.poly[s] += (binomial(j, s) * factorial(j - s)) * (T[j - s] * t.poly[j]);
    out.push_back(std::move(r));
  }
  return QuasiPolynomial(K.n, std::move(out));
}

H1Report validate_h1(const KernelModel& K) {
  H1Report rep;
  double width = K.eta0;
  for (const auto& p : K.parts) {
    if (auto e = std::get_if<ExponentialMixture>(&p))
      for (const auto& t : e->terms) {
        rep.poles.push_back(cplx(t.a, 0.0));
        rep.poles.push_back(cplx(-t.a, 0.0));
      }
    if (auto r = std::get_if<RationalSymbol>(&p)) {
      for (const auto& z : det_poly_roots(r->denominator)) rep.poles.push_back(z);
      if (r->base) {
        H1Report b = validate_h1(*r->base);
        width = std::min(width, b.certified_width);
        rep.poles.insert(rep.poles.end(), b.poles.begin(), b.poles.end());
      }
    }
    if (auto c = std::get_if<ClosureSymbol>(&p)) width = std::min(width, c->width);
  }
  for (const auto& z : rep.poles) width = std::min(width, 0.99 * std::abs(z.real()));
  if (width <= 0.0) {
    rep.ok = false;
    rep.messages.push_back("pole on the imaginary axis: no analyticity strip");
    rep.certified_width = 0.0;
    return rep;
  }
  rep.certified_width = width;

  // Boundary sampling and decay along horizontal lines.
  const double w = 0.9 * width;
  for (double eta : {-w, 0.0, w}) {
    for (double ell = -50.0; ell <= 50.0; ell += 0.37) {
      try {
        MatC v = transform(K, cplx(eta, ell), 0);
        if (!v.allFinite()) throw NumericalError("non-finite");
      } catch (const NumericalError&) {
        rep.ok = false;
        rep.messages.push_back("transform not finite at Re nu = " + std::to_string(eta));
        return rep;
      }
    }
    double far = 0.0, near = 0.0;
    for (double ell : {1.0, 3.0, 10.0}) near = std::max(near, op_norm(transform(K, cplx(eta, ell), 0)));
    for (double ell : {1e3, -1e3, 1e4, -1e4}) far = std::max(far, op_norm(transform(K, cplx(eta, ell), 0)));
    if (!(far < 1e-2 * std::max(near, 1.0))) rep.decays = false;
  }
  if (!rep.decays) {
    rep.ok = false;
    rep.messages.push_back(part_count_dirac(K) ? "transform does not decay (Dirac part present)"
                                               : "transform does not decay along horizontal lines");
  }
  return rep;
}

bool kernel_is_real(const KernelModel& K) {
  const double w = strip_probe_width(K);
  for (const cplx& z : probe_points(w)) {
    MatC a = transform(K, std::conj(z), 0), b = transform(K, z, 0).conjugate();
    if ((a - b).norm() > 1e-12 * (1.0 + a.norm())) return false;
  }
  return true;
}

int kernel_parity(const KernelModel& K) {
  const double w = strip_probe_width(K);
  bool even = true, odd = true;
  for (const cplx& z : probe_points(w)) {
    MatC a = transform(K, z, 0), b = transform(K, -z, 0);
    const double s = 1e-12 * (1.0 + a.norm());
    if ((a - b).norm() > s) even = false;
    if ((a + b).norm() > s) odd = false;
  }
  if (even) return 1;
  if (odd) return -1;
  return 0;
}

bool kernel_has_dirac(const KernelModel& K) {
  if (part_count_dirac(K)) return true;
  for (const auto& p : K.parts)
    if (auto r = std::get_if<RationalSymbol>(&p))
      if (r->base && kernel_has_dirac(*r->base)) return true;
  return false;
}

std::vector<MatC> tabulate_kernel(const KernelModel& K, double h, double half_width) {
  if (kernel_has_dirac(K)) throw InputError("Dirac kernels have no x-space quadrature representation");
  const int N = static_cast<int>(std::floor(half_width / h + 1e-9));
  std::vector<MatC> out(2 * N + 1, MatC::Zero(K.n, K.n));
  bool symbolic = false;
  for (const auto& p : K.parts) {
    if (auto g = std::get_if<GaussianMixture>(&p)) {
      for (int j = -N; j <= N; ++j) {
        const double x = j * h;
        for (const auto& t : g->terms)
          out[j + N] += (ipow(x - t.b, t.p) * std::exp(-t.a * (x - t.b) * (x - t.b))) * t.c;
      }
    } else if (auto e = std::get_if<ExponentialMixture>(&p)) {
      for (int j = -N; j <= N; ++j) {
        const double x = j * h;
        for (const auto& t : e->terms) out[j + N] += std::exp(-t.a * std::abs(x - t.b)) * t.c;
      }
    } else {
      symbolic = true;
    }
  }
  if (symbolic) {
    KernelModel S = K;
    S.parts.clear();
    for (const auto& p : K.parts)
      if (std::holds_alternative<RationalSymbol>(p) || std::holds_alternative<ClosureSymbol>(p)) S.parts.push_back(p);
    // K(x) = (1/2pi) int K^(i l) e^{i l x} dl, trapezoid with period 4*half_width
    const double dl = 2.0 * M_PI / (4.0 * half_width + 8.0);
    double peak = 0.0;
    std::vector<std::pair<double, MatC>> samples;
    for (int m = 0;; ++m) {
      const double l = m * dl;
      MatC v = transform(S, cplx(0.0, l), 0);
      const double nv = v.norm();
      peak = std::max(peak, nv);
      samples.push_back({l, v});
      if (m > 0) samples.push_back({-l, transform(S, cplx(0.0, -l), 0)});
      if ((l > 5.0 && nv < 1e-14 * peak) || m > 200000) break;
    }
    for (int j = -N; j <= N; ++j) {
      const double x = j * h;
      MatC acc = MatC::Zero(K.n, K.n);
      for (const auto& [l, v] : samples) acc += std::exp(cplx(0.0, l * x)) * v;
      out[j + N] += acc * (dl / (2.0 * M_PI));
    }
  }
  return out;
}

double kernel_support_halfwidth(const KernelModel& K, double tol) {
  if (kernel_has_dirac(K)) throw InputError("Dirac kernels have no x-space quadrature representation");
  double r = 0.0;
  const double L = std::log(1.0 / tol);
  bool symbolic = false;
  for (const auto& p : K.parts) {
    if (auto g = std::get_if<GaussianMixture>(&p)) {
      for (const auto& t : g->terms) {
        double x = std::sqrt(L / t.a);
        for (int it = 0; it < 5; ++it) x = std::sqrt((L + t.p * std::log(std::max(x, 1.0))) / t.a);
        r = std::max(r, std::abs(t.b) + x);
      }
    } else if (auto e = std::get_if<ExponentialMixture>(&p)) {
      for (const auto& t : e->terms) r = std::max(r, std::abs(t.b) + L / t.a);
    } else {
      symbolic = true;
    }
  }
  if (symbolic) {
    const double W = 60.0, h = 0.1;
    auto tab = tabulate_kernel(K, h, W);
    const int N = (static_cast<int>(tab.size()) - 1) / 2;
    double peak = 0.0;
    for (const auto& m : tab) peak = std::max(peak, m.norm());
    int last = 0;
    for (int j = -N; j <= N; ++j)
      if (tab[j + N].norm() > tol * peak) last = std::max(last, std::abs(j));
    r = std::max(r, (last + 2) * h);
  }
  return r;
}

}  // namespace cm
