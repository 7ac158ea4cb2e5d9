#include "ftl/ode23.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftl {

namespace {

double error_norm(const std::vector<double>& e, const std::vector<double>& y0,
                  const std::vector<double>& y1, double rtol, double atol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = e[i] / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(e.size()));
}

void hermite(const std::vector<double>& y0, const std::vector<double>& f0,
             const std::vector<double>& y1, const std::vector<double>& f1,
             double h, double theta, std::vector<double>& out) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  out.resize(y0.size());
  for (std::size_t i = 0; i < y0.size(); ++i)
    out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
}

}  // namespace

Ode23Stats integrate_ode23(
    const OdeRhs& rhs, std::vector<double> y, double t0, double t_end,
    const Ode23Options& opts, const std::vector<double>& snapshot_times,
    const std::function<void(double t, const std::vector<double>& y)>&
        on_snapshot,
    std::vector<double>* y_end) {
  if (!(t_end > t0)) throw std::invalid_argument("t_end must exceed t0");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be > 0");

  const std::size_t dim = y.size();
  Ode23Stats stats;
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), ytmp(dim),
      ynew(dim), err(dim), interp;

  double t = t0;
  if (!rhs(t, y, k1))
    throw std::runtime_error("inadmissible initial state for ODE solve");

  // Initial step: conservative estimate from the rhs magnitude.
  double f_mag = 0.0, y_mag = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    f_mag = std::max(f_mag, std::abs(k1[i]));
    y_mag = std::max(y_mag, std::abs(y[i]));
  }
  double h = (t_end - t0) * 1e-3;
  if (f_mag > 0.0)
    h = std::min(h, 0.01 * (opts.abs_tol + opts.rel_tol * y_mag + 1e-3) /
                        f_mag);
  h = std::max(h, (t_end - t0) * 1e-12);

  const double h_min = 1e-14 * (t_end - t0);
  std::size_t snap_idx = 0;
  // snapshots requested exactly at t0
  while (snap_idx < snapshot_times.size() &&
         snapshot_times[snap_idx] <= t0) {
    if (on_snapshot) on_snapshot(snapshot_times[snap_idx], y);
    ++snap_idx;
  }

  double prev_err = 1.0;  // PI controller memory
  bool have_prev = false;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < h_min)
      throw std::runtime_error(
          "ODE step size underflow at t = " + std::to_string(t));

    bool stage_ok = true;
    for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
    stage_ok = rhs(t + 0.5 * h, ytmp, k2);
    if (stage_ok) {
      for (std::size_t i = 0; i < dim; ++i)
        ytmp[i] = y[i] + 0.75 * h * k2[i];
      stage_ok = rhs(t + 0.75 * h, ytmp, k3);
    }
    if (stage_ok) {
      for (std::size_t i = 0; i < dim; ++i)
        ynew[i] = y[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] +
                              4.0 / 9.0 * k3[i]);
      stage_ok = rhs(t + h, ynew, k4);
    }
    if (stage_ok && opts.accept) stage_ok = opts.accept(ynew);

    if (!stage_ok) {
      ++stats.rejected_steps;
      h *= 0.5;
      continue;
    }

    // 2nd-order embedded solution for the error estimate.
    for (std::size_t i = 0; i < dim; ++i) {
      const double z = y[i] + h * (7.0 / 24.0 * k1[i] + 0.25 * k2[i] +
                                   1.0 / 3.0 * k3[i] + 0.125 * k4[i]);
      err[i] = ynew[i] - z;
    }
    const double e = error_norm(err, y, ynew, opts.rel_tol, opts.abs_tol);
    if (e > 1.0) {
      ++stats.rejected_steps;
      h *= std::max(0.2, 0.9 * std::pow(e, -1.0 / 3.0));
      continue;
    }

    // Dense output for snapshots inside (t, t+h].
    while (snap_idx < snapshot_times.size() &&
           snapshot_times[snap_idx] <= t + h) {
      const double ts = snapshot_times[snap_idx];
      if (on_snapshot) {
        hermite(y, k1, ynew, k4, h, (ts - t) / h, interp);
        on_snapshot(ts, interp);
      }
      ++snap_idx;
    }

    t += h;
    y.swap(ynew);
    k1.swap(k4);  // FSAL
    ++stats.accepted_steps;

    double factor;
    if (have_prev) {
      factor = 0.9 * std::pow(e > 0 ? e : 1e-10, -0.7 / 3.0) *
               std::pow(prev_err > 0 ? prev_err : 1e-10, 0.4 / 3.0);
    } else {
      factor = 0.9 * std::pow(e > 0 ? e : 1e-10, -1.0 / 3.0);
    }
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
    prev_err = e;
    have_prev = true;
  }

  // snapshots requested exactly at t_end that float comparison missed
  while (snap_idx < snapshot_times.size()) {
    if (on_snapshot) on_snapshot(snapshot_times[snap_idx], y);
    ++snap_idx;
  }

  if (y_end) *y_end = y;
  return stats;
}

}  // namespace ftl
