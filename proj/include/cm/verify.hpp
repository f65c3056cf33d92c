#pragma once

// Numerical validation: integration of reduced fields, reversible homoclinic
// and front shooting, reconstruction of profiles on a grid, and residuals of
// the nonlocal equation by trapezoidal convolution.

#include <vector>

#include "cm/jet.hpp"

namespace cm {

struct Trajectory {
  std::vector<double> x;
  std::vector<VecC> c;
};

// Classical RK4 with fixed step from x0 to x1 (field parameters substituted).
Trajectory integrate_reduced(const PolyField& f, const VecC& c0, double x0, double x1, double step);

struct HomoclinicResult {
  bool found = false;
  double x_section = 0.0;        // crossing of the symmetric section
  double return_distance = 0.0;  // |c| after integrating the same span past the section
  double amplitude = 0.0;        // |first coordinate| at the section
  Trajectory orbit;              // full orbit on [-x_section, x_section], reversed half by symmetry
};

// Real planar field with reversor (X, Y) -> (X, -Y) and a saddle at 0:
// leave along the unstable direction, stop on Y = 0, mirror.
HomoclinicResult shoot_homoclinic(const PolyField& f, double delta = 1e-6, double step = 1e-3, double x_max = 200.0);

struct FrontResult {
  bool found = false;
  bool monotone = false;
  VecC saddle;
  double end_distance = 0.0;
  Trajectory orbit;
};

// Newton for an equilibrium of f near guess.
VecC find_equilibrium(const PolyField& f, const VecC& guess);

// Leave the saddle along its unstable direction towards target; monotone means
// the first coordinate moves towards the target without overshoot (tolerance tol).
FrontResult shoot_front(const PolyField& f, const VecC& saddle_guess, const VecC& target, double delta = 1e-6,
                        double step = 1e-3, double x_max = 200.0, double tol = 1e-4);

// Map from reduced (scaled, real, restricted) coordinates back to kernel
// coordinates: c_i(x) = e^{i w_i x} eps^{b_i} chat_i(eps^a x).
struct Unscaling {
  std::vector<double> omega;
  double a = 0.0;
  std::vector<double> b;
  double eps = 1.0;
  std::vector<int> partner;  // conjugate partners of kernel coordinates
  std::vector<int> keep;     // real-form slots kept in the reduced system
};
VecC lift(const Unscaling& U, const VecC& reduced, double x);

struct GridProfile {
  double x0 = 0.0;
  double h = 0.1;
  std::vector<VecC> u;
  double x(int j) const { return x0 + j * h; }
};

// u(x) = (u0(c(x)) + Psi(c(x)))(0) along lifted trajectory values c(x_j).
GridProfile reconstruct(const JetResult& J, const KernelBasis& basis, const VecC& params, const std::vector<VecC>& coords,
                        double x0, double h);

// Linear interpolation of a trajectory at x (clamped at the ends).
VecC sample(const Trajectory& t, double x);

struct ResidualReport {
  double max_norm = 0.0;
  double l2_norm = 0.0;
  double richardson = 0.0;  // |r_h - r_2h| / 3 on common points
  bool converged = true;
  std::vector<double> pointwise;  // |r| per grid point
};

// u + K*u + F(u, p) with trapezoidal convolutions (constant extension at the edges).
ResidualReport residual(const KernelModel& K, const NonlinearitySpec& F, const VecC& params, const GridProfile& u);

}  // namespace cm
