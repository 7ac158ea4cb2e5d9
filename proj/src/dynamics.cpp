#include "ftl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftl {

std::vector<double> rhs(const ParticleState& state,
                        const VelocityModel& model) {
  state.validate();
  const std::size_t n = state.gap_count();
  std::vector<double> w(n + 1);
  auto gap_speed = [&](std::size_t i) {
    return model.v(state.ell / (state.x[i + 1] - state.x[i]));
  };
  if (state.mode == ParticleMode::Anchored) {
    for (std::size_t i = 0; i < n; ++i) w[i] = gap_speed(i);
    w[n] = model.v_max();
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = gap_speed(i);
    w[n - 1] = model.v_max();
    // derivatives of the reflection formulas
    w[0] = 2.0 * w[1] - w[2];
    w[n] = 2.0 * w[n - 1] - w[n - 2];
  }
  return w;
}

std::vector<double> density_rhs(const GapDensities& g,
                                const VelocityModel& model) {
  if (g.r.empty() || !(g.ell > 0.0))
    throw std::invalid_argument("invalid gap densities");
  const std::size_t m = g.r.size();
  std::vector<double> dr(m);
  for (std::size_t i = 0; i + 1 < m; ++i)
    dr[i] = -(g.r[i] * g.r[i] / g.ell) * (model.v(g.r[i + 1]) - model.v(g.r[i]));
  dr[m - 1] =
      -(g.r[m - 1] * g.r[m - 1] / g.ell) * (model.v_max() - model.v(g.r[m - 1]));
  return dr;
}

namespace {

bool strictly_increasing(const std::vector<double>& y) {
  for (std::size_t i = 0; i + 1 < y.size(); ++i)
    if (!(y[i] < y[i + 1])) return false;
  return true;
}

ParticleState assemble(const ParticleState& proto, double t,
                       const std::vector<double>& active) {
  ParticleState s;
  s.t = t;
  s.ell = proto.ell;
  s.mode = proto.mode;
  if (proto.mode == ParticleMode::Anchored) {
    s.x = active;
  } else {
    const std::size_t n = proto.gap_count();
    s.x.resize(n + 1);
    std::copy(active.begin(), active.end(), s.x.begin() + 1);
    s.x[0] = 2.0 * s.x[1] - s.x[2];
    s.x[n] = 2.0 * s.x[n - 1] - s.x[n - 2];
  }
  return s;
}

}  // namespace

Trajectory integrate(const ParticleState& state, const VelocityModel& model,
                     double t_end, double rel_tol, double abs_tol,
                     const std::vector<double>& snapshot_times) {
  state.validate();
  if (!(t_end > state.t)) throw std::invalid_argument("t_end must exceed t");
  std::vector<double> snaps = snapshot_times;
  if (snaps.empty()) snaps.push_back(t_end);
  if (!std::is_sorted(snaps.begin(), snaps.end()))
    throw std::invalid_argument("snapshot times must be sorted");
  if (snaps.front() < state.t || snaps.back() > t_end)
    throw std::invalid_argument("snapshot times outside [t, t_end]");

  const bool anchored = state.mode == ParticleMode::Anchored;
  const double ell = state.ell;
  const double vmax = model.v_max();

  std::vector<double> y0;
  if (anchored)
    y0 = state.x;
  else
    y0.assign(state.x.begin() + 1, state.x.end() - 1);

  auto ode_rhs = [&](double, const std::vector<double>& y,
                     std::vector<double>& dy) {
    if (!strictly_increasing(y)) return false;
    dy.resize(y.size());
    const std::size_t last = y.size() - 1;
    for (std::size_t i = 0; i < last; ++i)
      dy[i] = model.v(ell / (y[i + 1] - y[i]));
    dy[last] = vmax;
    return true;
  };

  Trajectory traj;
  traj.stats.min_gap_seen = std::numeric_limits<double>::infinity();
  auto track_min_gap = [&](const std::vector<double>& y) {
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
      traj.stats.min_gap_seen =
          std::min(traj.stats.min_gap_seen, y[i + 1] - y[i]);
  };
  track_min_gap(y0);

  Ode23Options opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  opts.accept = [&](const std::vector<double>& y) {
    if (!strictly_increasing(y)) return false;
    track_min_gap(y);
    return true;
  };

  const Ode23Stats stats = integrate_ode23(
      ode_rhs, y0, state.t, t_end, opts, snaps,
      [&](double t, const std::vector<double>& y) {
        traj.snapshots.push_back(assemble(state, t, y));
      });
  traj.stats.accepted_steps = stats.accepted_steps;
  traj.stats.rejected_steps = stats.rejected_steps;
  return traj;
}

}  // namespace ftl
