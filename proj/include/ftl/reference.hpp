#pragma once

#include <vector>

#include "ftl/piecewise_density.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

/// Elementary wave of the Riemann problem for a strictly concave flux.
struct Wave {
  enum class Kind { None, Shock, Rarefaction };
  Kind kind = Kind::None;
  double left = 0.0;
  double right = 0.0;
  double sigma = 0.0;    // shock speed (Rankine-Hugoniot)
  double s_left = 0.0;   // rarefaction head/tail speeds f'(left), f'(right)
  double s_right = 0.0;
};

/// Entropy-admissible wave for the jump (rho_L, rho_R); requires a
/// strictly concave flux on [0, max(rho_L, rho_R)].
Wave solve_riemann(double rho_left, double rho_right,
                   const VelocityModel& model);

/// Inverse of f' by bisection; rho_hi bounds the search bracket.
double inverse_flux_derivative(const VelocityModel& model, double slope,
                               double rho_hi);

/// Exact entropy solution of a piecewise-constant Cauchy problem by wave
/// front tracking: rarefactions split into fans of sub-jumps of size at
/// most delta_rho, interactions processed chronologically. The sampler
/// substitutes the exact continuous fan profile wherever no interaction
/// has disturbed a fan.
class FrontTracker {
 public:
  FrontTracker(const PiecewiseConstantDensity& datum,
               const VelocityModel& model, double t_end,
               double delta_rho = 1e-3);

  double t_end() const { return t_end_; }

  /// Pointwise exact value at (t, x), t <= t_end.
  double sample(double t, double x) const;

  /// Profile at time t as a piecewise-constant density; undisturbed fans
  /// are re-sampled from the exact profile on a sub-delta_rho grid.
  PiecewiseConstantDensity sample_density(double t) const;

  long interaction_count() const { return interactions_; }

 private:
  struct Front {
    double t0, x0, speed;
    double left, right;
    double death;           // time the front was absorbed (inf if alive)
    long fan_id = -1;       // -1 for shocks
    double fan_t0 = 0.0;    // fan center (shared by the fan's pieces)
    double fan_x0 = 0.0;

    double position(double t) const { return x0 + speed * (t - t0); }
    bool alive_at(double t) const { return t0 <= t && t < death; }
  };

  void emit_wave(double t, double x, double rho_l, double rho_r,
                 std::vector<std::size_t>& emitted);
  void run(double t_stop);
  std::vector<const Front*> alive_sorted(double t) const;
  double fan_value(const Front& f, double t, double x) const;

  VelocityModel model_;
  double t_end_;
  double delta_rho_;
  double rho_hi_ = 0.0;  // concavity validated up to here
  double t_now_ = 0.0;
  long interactions_ = 0;
  long next_fan_id_ = 0;
  std::vector<Front> fronts_;      // full history
  std::vector<std::size_t> active_;  // alive fronts, spatially ordered
};

}  // namespace ftl
