#pragma once

#include <functional>
#include <vector>

namespace ftl {

/// Right-hand side callback. Returns false when the state is outside the
/// admissible set (e.g. crossed particles); the current step is then
/// rejected and retried with a smaller step.
using OdeRhs = std::function<bool(double t, const std::vector<double>& y,
                                  std::vector<double>& dy)>;

/// Predicate applied to every accepted end-of-step state.
using OdeAccept = std::function<bool(const std::vector<double>& y)>;

struct Ode23Options {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  OdeAccept accept;  // optional
};

struct Ode23Stats {
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// Embedded Bogacki-Shampine 2(3) pair with PI step control and cubic
/// Hermite dense output at the requested snapshot times. snapshot_times
/// must be sorted and lie in [t0, t_end]; on_snapshot is invoked once per
/// requested time, in order. Deterministic for identical inputs.
Ode23Stats integrate_ode23(
    const OdeRhs& rhs, std::vector<double> y0, double t0, double t_end,
    const Ode23Options& opts, const std::vector<double>& snapshot_times,
    const std::function<void(double t, const std::vector<double>& y)>&
        on_snapshot,
    std::vector<double>* y_end = nullptr);

}  // namespace ftl
