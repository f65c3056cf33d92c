#include "cm/spectrum.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>

#include "cm/errors.hpp"

namespace cm {

namespace {

constexpr double kBoundaryMinDet = 1e-8;
constexpr double kNullRel = 1e-8;

double op_norm(const MatC& m) { return m.size() == 1 ? std::abs(m(0, 0)) : Eigen::JacobiSVD<MatC>(m).singularValues()(0); }

struct Moments {
  Eigen::Vector3cd m;  // (1/2 pi i) oint nu^k d'/d, k = 0, 1, 2
  double min_det;
};

// Contour moments of d'/d = tr(T^{-1} T') over the rectangle boundary.
Moments contour_moments(const KernelModel& K, const Rect& r, double tol) {
  double min_det = std::numeric_limits<double>::infinity();
  Eigen::Vector3cd total = Eigen::Vector3cd::Zero();
  const cplx corners[5] = {{r.re0, r.im0}, {r.re1, r.im0}, {r.re1, r.im1}, {r.re0, r.im1}, {r.re0, r.im0}};
  for (int e = 0; e < 4; ++e) {
    const cplx z0 = corners[e], dz = corners[e + 1] - corners[e];
    auto f = [&](double t) -> Eigen::Vector3cd {
      const cplx nu = z0 + t * dz;
      MatSeries T = char_series(K, nu, 1);
      Eigen::PartialPivLU<MatC> lu(T[0]);
      min_det = std::min(min_det, std::abs(lu.determinant()));
      const cplx g = lu.solve(T[1]).trace() * dz;
      return Eigen::Vector3cd(g, g * nu, g * nu * nu);
    };
    total += integrate<Eigen::Vector3cd>(f, 0.0, 1.0, 0.25 * tol, 30).first;
  }
  return {total / cplx(0.0, 2.0 * M_PI), min_det};
}

int rounded_count(const Moments& mo) {
  if (mo.min_det < kBoundaryMinDet) throw NumericalError("characteristic root on or near the contour");
  const double c = std::round(mo.m(0).real());
  if (std::abs(mo.m(0) - c) > 0.1) throw NumericalError("winding number did not round to an integer");
  return static_cast<int>(c);
}

cplx newton_simple(const KernelModel& K, cplx nu) {
  for (int it = 0; it < 30; ++it) {
    MatSeries T = char_series(K, nu, 1);
    const cplx g = Eigen::PartialPivLU<MatC>(T[0]).solve(T[1]).trace();
    if (!std::isfinite(std::abs(g)) || std::abs(g) == 0.0) break;
    const cplx step = 1.0 / g;
    nu -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(nu))) break;
  }
  return nu;
}

struct Found {
  cplx nu;
  int mult;
};

class RootSearch {
 public:
  RootSearch(const KernelModel& K, double delta) : K_(K), delta_(delta) {}

  int count(double a, double b) { return rounded_count(contour_moments(K_, {-delta_, delta_, a, b}, 1e-9)); }

  void find(double a, double b, int c, std::vector<Found>& out) {
    if (c == 0) return;
    if (b - a < 1e-6) throw NumericalError("root cluster could not be separated");
    Moments mo = contour_moments(K_, {-delta_, delta_, a, b}, 1e-11);
    const cplx cen = mo.m(1) / double(c);
    const cplx var = mo.m(2) / double(c) - cen * cen;
    if (c == 1) {
      out.push_back({newton_simple(K_, cen), 1});
      return;
    }
    if (std::abs(var) < 1e-10 * std::max(1.0, std::norm(cen))) {
      out.push_back({refine_cluster(cen, c), c});
      return;
    }
    for (double frac : {0.4871, 0.5313, 0.4511, 0.5777}) {
      const double s = a + frac * (b - a);
      try {
        const int cl = count(a, s);
        find(a, s, cl, out);
        find(s, b, c - cl, out);
        return;
      } catch (const NumericalError& e) {
        if (std::string(e.what()).find("contour") == std::string::npos) throw;
      }
    }
    throw NumericalError("could not place a bisection line away from roots");
  }

 private:
  // Centroid of a cluster from a small contour around it.
  cplx refine_cluster(cplx cen, int c) {
    for (double r = 0.05; r > 1e-4; r *= 0.5) {
      try {
        Moments mo = contour_moments(K_, {cen.real() - r, cen.real() + r, cen.imag() - r, cen.imag() + r}, 1e-13);
        if (rounded_count(mo) != c) continue;
        return mo.m(1) / double(c);
      } catch (const NumericalError&) {
      }
    }
    return cen;
  }

  const KernelModel& K_;
  double delta_;
};

Eigen::MatrixXcd null_space(const MatC& A) {
  Eigen::JacobiSVD<MatC> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thresh = kNullRel * std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

// Head normalization: unit norm, first nonzero entry real positive.
VecC normalize_head(VecC v) {
  v.normalize();
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-10) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  return v;
}

}  // namespace

MatSeries char_series(const KernelModel& K, cplx nu, int order) {
  MatSeries T = transform_series(K, nu, order);
  T[0] += MatC::Identity(K.n, K.n);
  return T;
}

MatC char_matrix(const KernelModel& K, cplx nu) { return char_series(K, nu, 0)[0]; }

cplx char_det(const KernelModel& K, cplx nu) { return char_matrix(K, nu).determinant(); }

int count_roots(const KernelModel& K, const Rect& r) { return rounded_count(contour_moments(K, r, 1e-9)); }

CharacteristicRoot jordan_chains(const KernelModel& K, cplx nu, int alg_mult) {
  if (alg_mult < 1) throw InputError("jordan_chains: multiplicity must be positive");
  const int n = K.n;
  const int A = alg_mult;
  MatSeries T = char_series(K, nu, A);
  // L_p: block lower-triangular Toeplitz of T_0..T_p acting on (f^0..f^p), e^p = p! f^p
  std::vector<MatC> nulls(A);
  std::vector<int> N(A);
  for (int p = 0; p < A; ++p) {
    MatC L = MatC::Zero(n * (p + 1), n * (p + 1));
    for (int r = 0; r <= p; ++r)
      for (int q = 0; q <= r; ++q) L.block(n * r, n * (r - q), n, n) = T[q];
    nulls[p] = null_space(L);
    N[p] = static_cast<int>(nulls[p].cols());
  }
  if (N[A - 1] != A)
    throw NumericalError("Jordan chain lengths do not sum to the winding multiplicity (" + std::to_string(N[A - 1]) +
                         " vs " + std::to_string(A) + ")");
  auto ge = [&](int len) { return N[len - 1] - (len >= 2 ? N[len - 2] : 0); };  // chains of length >= len

  struct Chain {
    std::vector<VecC> f;
  };
  std::vector<Chain> chains;
  MatC heads(n, 0);
  for (int len = A; len >= 1; --len) {
    const int exact = ge(len) - (len < A ? ge(len + 1) : 0);
    if (exact <= 0) continue;
    const MatC& NB = nulls[len - 1];
    MatC H = NB.topRows(n);
    // directions available as heads of length-len chains, minus chosen heads
    MatC P = H;
    if (heads.cols() > 0) {
      Eigen::HouseholderQR<MatC> qr(heads);
      MatC Q = qr.householderQ() * MatC::Identity(n, heads.cols());
      P = H - Q * (Q.adjoint() * H);
    }
    Eigen::JacobiSVD<MatC> svd(P, Eigen::ComputeThinU);
    if (svd.singularValues().size() < exact || svd.singularValues()(exact - 1) < kNullRel)
      throw NumericalError("inconsistent Jordan structure");
    for (int k = 0; k < exact; ++k) {
      VecC h = normalize_head(svd.matrixU().col(k));
      VecC c = H.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(h);
      VecC full = NB * c;
      Chain ch;
      for (int p = 0; p < len; ++p) ch.f.push_back(full.segment(n * p, n));
      ch.f[0] = h;
      chains.push_back(ch);
      heads.conservativeResize(n, heads.cols() + 1);
      heads.col(heads.cols() - 1) = h;
    }
  }
  // Higher chain vectors orthogonal to the heads, using shifted chains.
  for (auto& ch : chains) {
    const int len = static_cast<int>(ch.f.size());
    for (int p = 1; p < len; ++p) {
      std::vector<int> elig;
      for (int j = 0; j < static_cast<int>(chains.size()); ++j)
        if (static_cast<int>(chains[j].f.size()) >= len - p) elig.push_back(j);
      MatC He(n, elig.size());
      for (size_t j = 0; j < elig.size(); ++j) He.col(j) = chains[elig[j]].f[0];
      VecC a = He.colPivHouseholderQr().solve(ch.f[p]);
      for (size_t j = 0; j < elig.size(); ++j) {
        std::vector<VecC> g = chains[elig[j]].f;
        for (int s = 0; p + s < len; ++s) ch.f[p + s] -= a(j) * g[s];
      }
    }
  }
  CharacteristicRoot root;
  root.nu = nu;
  root.alg_mult = A;
  root.geom_mult = static_cast<int>(chains.size());
  for (auto& ch : chains) {
    std::vector<VecC> e;
    for (size_t p = 0; p < ch.f.size(); ++p) e.push_back(factorial(static_cast<int>(p)) * ch.f[p]);
    root.chains.push_back(e);
  }
  return root;
}

Spectrum locate_roots(const KernelModel& K, const SpectrumOptions& opt) {
  H1Report h1 = validate_h1(K);
  if (!h1.ok) {
    std::string msg = "kernel fails the localization hypothesis";
    for (const auto& m : h1.messages) msg += ": " + m;
    throw NumericalError(msg);
  }
  Spectrum sp;
  double w = std::min(opt.strip_cap, 0.9 * h1.certified_width);

  // L: beyond it ||K^|| < 1/2 on the strip, so d cannot vanish.
  double last = 0.0, limit = 100.0;
  for (;;) {
    for (double ell = 0.0; ell <= limit; ell += 0.02)
      for (double eta : {-w, 0.0, w})
        for (double s : {1.0, -1.0})
          if (op_norm(transform(K, cplx(eta, s * ell), 0)) >= 0.5) last = std::max(last, ell);
    if (last < 0.9 * limit || limit >= 1e4) break;
    limit *= 4.0;
  }
  if (last >= 0.9 * limit) throw NumericalError("transform does not decay below 1/2 on the search range");
  double L = 2.0 * std::max(last, 1.0);

  // Shrink the strip until it holds no off-axis roots.
  double delta = 0.0;
  int thin = 0, full = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 60) throw NumericalError("could not certify a root-free strip");
    delta = std::min(0.25 * w, 0.01);
    try {
      full = count_roots(K, {-w, w, -L, L});
      thin = count_roots(K, {-delta, delta, -L, L});
    } catch (const NumericalError&) {
      w *= 0.97;
      L *= 1.013;
      continue;
    }
    if (full == thin) break;
    sp.messages.push_back("off-axis roots inside |Re nu| < " + std::to_string(w) + "; strip reduced");
    w *= 0.5;
    if (w < 1e-4) throw NumericalError("off-axis roots accumulate at the imaginary axis");
  }
  sp.strip_width = w;
  sp.search_half_length = L;
  sp.winding_total = full;
  sp.certificate = {-w, w, -L, L};

  std::vector<Found> found;
  RootSearch rs(K, delta);
  rs.find(-L, L, thin, found);

  const bool real = kernel_is_real(K);
  for (auto& f : found) {
    if (std::abs(f.nu.real()) > opt.tol_root)
      throw NumericalError("characteristic root off the imaginary axis at distance " + std::to_string(std::abs(f.nu.real())));
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.nu.imag() < b.nu.imag(); });
  for (auto& f : found) {
    CharacteristicRoot r;
    r.snap_distance = std::abs(f.nu.real());
    cplx nu(0.0, f.nu.imag());
    if (real && std::abs(nu.imag()) < opt.tol_root) {
      r.snap_distance = std::max(r.snap_distance, std::abs(nu.imag()));
      nu = 0.0;
    }
    r.nu = nu;
    r.alg_mult = f.mult;
    sp.roots.push_back(r);
  }
  if (real) {
    // enforce exact conjugate symmetry; chains of the lower root are conjugates
    for (auto& r : sp.roots)
      if (r.nu.imag() < 0.0) {
        auto it = std::min_element(sp.roots.begin(), sp.roots.end(), [&](const auto& a, const auto& b) {
          return std::abs(a.nu - std::conj(r.nu)) < std::abs(b.nu - std::conj(r.nu));
        });
        if (std::abs(it->nu - std::conj(r.nu)) > 1e-8 || it->alg_mult != r.alg_mult)
          throw NumericalError("real kernel with unpaired complex root");
        const double im = 0.5 * (it->nu.imag() - r.nu.imag());
        it->nu = cplx(0.0, im);
        r.nu = cplx(0.0, -im);
      }
  }
  for (auto& r : sp.roots) {
    if (real && r.nu.imag() < 0.0) continue;
    CharacteristicRoot c = jordan_chains(K, r.nu, r.alg_mult);
    r.geom_mult = c.geom_mult;
    r.chains = c.chains;
  }
  if (real)
    for (auto& r : sp.roots)
      if (r.nu.imag() < 0.0) {
        const auto& up = *std::find_if(sp.roots.begin(), sp.roots.end(),
                                       [&](const auto& a) { return a.nu == std::conj(r.nu); });
        r.geom_mult = up.geom_mult;
        r.chains = up.chains;
        for (auto& ch : r.chains)
          for (auto& v : ch) v = v.conjugate();
      }
  for (const auto& r : sp.roots) sp.M += r.alg_mult;
  if (sp.M != sp.winding_total) throw NumericalError("root multiplicities do not add up to the winding count");
  return sp;
}

}  // namespace cm
