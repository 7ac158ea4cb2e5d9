#pragma once

#include <vector>

#include "ftl/ode23.hpp"
#include "ftl/particles.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

/// Instantaneous particle velocities, length N+1.
///
/// Anchored: dx_i = v(ell/gap_i) for i < N, dx_N = v_max.
/// Phantom: interior particles follow their forward gap, the leader
/// x_{N-1} moves at v_max, and the reported phantom velocities are the
/// time derivatives of the reflection formulas.
std::vector<double> rhs(const ParticleState& state, const VelocityModel& model);

/// dR_i/dt for the gap-density system: followers couple to the next gap,
/// the last entry is the gap behind the leader (driven by v_max).
std::vector<double> density_rhs(const GapDensities& r,
                                const VelocityModel& model);

struct IntegrationStats {
  long accepted_steps = 0;
  long rejected_steps = 0;
  double min_gap_seen = 0.0;
};

struct Trajectory {
  std::vector<ParticleState> snapshots;  // strictly increasing times
  IntegrationStats stats;
};

/// Advance the particle system to t_end, recording the requested snapshot
/// times by dense output. Steps producing non-ordered positions are
/// rejected and retried with half the step.
Trajectory integrate(const ParticleState& state, const VelocityModel& model,
                     double t_end, double rel_tol, double abs_tol,
                     const std::vector<double>& snapshot_times);

}  // namespace ftl
