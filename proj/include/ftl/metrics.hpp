#pragma once

#include <string>
#include <vector>

#include "ftl/dynamics.hpp"
#include "ftl/particles.hpp"
#include "ftl/piecewise_density.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

/// Sum of density jumps. Boundary-inclusive counts the up/down jumps
/// between the support edges and the surrounding vacuum.
double total_variation(const PiecewiseConstantDensity& d,
                       bool include_boundary);

/// Total variation restricted to [a, b], counting jumps strictly inside
/// (a, b). Support-edge jumps count when they fall inside the window.
double local_tv(const PiecewiseConstantDensity& d, double a, double b);

/// local_tv of v(rho(.)) on [a, b]; outside the support the composed
/// value is v(0) = v_max, not zero.
double local_tv_of_velocity(const PiecewiseConstantDensity& d,
                            const VelocityModel& model, double a, double b);

/// 1-Wasserstein distance via the pseudo-inverse form, cross-checked
/// against the CDF form (they must agree to 1e-10). Masses must match to
/// 1e-10.
double wasserstein1(const PiecewiseConstantDensity& d1,
                    const PiecewiseConstantDensity& d2);

// The two W1 routes, exposed separately for the dual-identity checks.
double wasserstein1_pseudo_inverse(const PiecewiseConstantDensity& d1,
                                   const PiecewiseConstantDensity& d2);
double wasserstein1_cdf(const PiecewiseConstantDensity& d1,
                        const PiecewiseConstantDensity& d2);

/// Exact integral of |d - ref| over [a, b] (merged breakpoints, no
/// quadrature error).
double l1_error(const PiecewiseConstantDensity& d,
                const PiecewiseConstantDensity& ref, double a, double b);

struct OleinikDiagnostic {
  double t = 0.0;
  std::vector<double> z;  // t * R_i * (dx_{i+1} - dx_i), one per gap
  double max_z = 0.0;     // max over follower (non-phantom) gaps
  double ell = 0.0;
};

/// One-sided smoothing diagnostic; velocities recomputed from positions.
OleinikDiagnostic oleinik(const ParticleState& state,
                          const VelocityModel& model);

/// C2 bump phi(t, x) = psi((t-tc)/tw) * psi((x-xc)/xw) with
/// psi(s) = (1 - s^2)^3 on [-1, 1].
struct BumpTestFunction {
  double t_center;
  double t_halfwidth;
  double x_center;
  double x_halfwidth;

  double phi(double t, double x) const;
  double phi_t(double t, double x) const;
  double phi_x(double t, double x) const;
  /// max of |phi| and its first/second t- and x-derivatives.
  double c2_norm() const;
  std::string describe() const;
};

struct EntropyResidualReport {
  double k = 0.0;
  std::string testfn;
  double value = 0.0;
  double tol = 0.0;
};

/// Kruzhkov entropy residual of the trajectory against constant k,
/// integrated against the bump: exact in x per cell, trapezoid in t over
/// the snapshots. Snapshot spacing must be at most a twentieth of the
/// bump's time width and the bump's time support must lie inside the
/// snapshot range.
EntropyResidualReport entropy_residual(const Trajectory& traj,
                                       const VelocityModel& model, double k,
                                       const BumpTestFunction& phi);

}  // namespace ftl
