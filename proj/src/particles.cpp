#include "ftl/particles.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace ftl {

void ParticleState::validate() const {
  if (x.size() < 4)
    throw std::invalid_argument("particle state needs N >= 3 gaps");
  if (!(ell > 0.0)) throw std::invalid_argument("gap mass must be > 0");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i] < x[i + 1]))
      throw std::runtime_error("particle positions not strictly ordered");
  }
}

GapDensities gap_densities(const ParticleState& state) {
  GapDensities g;
  g.ell = state.ell;
  g.r.reserve(state.gap_count());
  for (std::size_t i = 0; i + 1 < state.x.size(); ++i)
    g.r.push_back(state.ell / (state.x[i + 1] - state.x[i]));
  return g;
}

PiecewiseConstantDensity reconstruct(const ParticleState& state) {
  state.validate();
  std::vector<double> values;
  values.reserve(state.gap_count());
  for (std::size_t i = 0; i + 1 < state.x.size(); ++i)
    values.push_back(state.ell / (state.x[i + 1] - state.x[i]));
  return PiecewiseConstantDensity(state.x, std::move(values));
}

PseudoInverse pseudo_inverse(const ParticleState& state) {
  state.validate();
  std::vector<PseudoInverse::Knot> knots;
  knots.reserve(state.x.size());
  for (std::size_t i = 0; i < state.x.size(); ++i)
    knots.push_back({static_cast<double>(i) * state.ell, state.x[i]});
  return PseudoInverse::from_knots(std::move(knots));
}

InitialDatum::InitialDatum(PiecewiseConstantDensity d)
    : density(std::move(d)), total_mass(density.mass()),
      ess_sup(density.ess_sup()) {
  if (!(total_mass > 0.0))
    throw std::invalid_argument("initial datum has zero mass");
}

namespace {

// Smallest x with F(x) >= level (left edge of CDF plateaus).
double quantile_left(const PiecewiseConstantDensity& d, double level) {
  const auto& b = d.breakpoints();
  const auto& c = d.values();
  double m_before = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (m_before >= level) return b[j];
    const double m_after = m_before + c[j] * (b[j + 1] - b[j]);
    if (c[j] > 0.0 && m_after >= level)
      return b[j] + (level - m_before) / c[j];
    m_before = m_after;
  }
  return b.back();
}

double support_min(const PiecewiseConstantDensity& d) {
  const auto& c = d.values();
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] > 0.0) return d.breakpoints()[j];
  return d.breakpoints().front();
}

double support_max(const PiecewiseConstantDensity& d) {
  const auto& c = d.values();
  for (std::size_t j = c.size(); j > 0; --j)
    if (c[j - 1] > 0.0) return d.breakpoints()[j];
  return d.breakpoints().back();
}

}  // namespace

ParticleState partition(const InitialDatum& datum, int n_gaps,
                        ParticleMode mode) {
  if (n_gaps < 3) throw std::invalid_argument("need N >= 3 gaps");
  const double mass = datum.total_mass;
  const double ell = mass / n_gaps;
  if (ell < 64.0 * DBL_EPSILON * mass)
    throw std::invalid_argument(
        "N too large: per-gap mass below the resolvable mass increment; "
        "reduce N or rescale the datum");

  ParticleState s;
  s.t = 0.0;
  s.ell = ell;
  s.mode = mode;
  s.x.resize(static_cast<std::size_t>(n_gaps) + 1);
  for (int i = 1; i < n_gaps; ++i)
    s.x[static_cast<std::size_t>(i)] =
        quantile_left(datum.density, ell * static_cast<double>(i));

  const std::size_t n = static_cast<std::size_t>(n_gaps);
  if (mode == ParticleMode::Anchored) {
    s.x[0] = support_min(datum.density);
    s.x[n] = support_max(datum.density);
  } else {
    s.x[0] = 2.0 * s.x[1] - s.x[2];
    s.x[n] = 2.0 * s.x[n - 1] - s.x[n - 2];
  }
  s.validate();
  return s;
}

double invert_cdf_table(const std::vector<double>& x,
                        const std::vector<double>& cdf, double level) {
  if (x.size() != cdf.size() || x.size() < 2)
    throw std::invalid_argument("CDF table needs matching x/cdf columns");
  const double mass = cdf.back();
  if (level < 0.0 || level > mass)
    throw std::invalid_argument("quantile level outside [0, mass]");
  if (mass * DBL_EPSILON * 64.0 > level && level > 0.0)
    throw std::invalid_argument(
        "quantile level below the resolvable mass increment of the table");
  // Bisection on the piecewise-linear interpolant of the table for the
  // smallest x with F(x) >= level.
  auto F = [&](double q) {
    if (q <= x.front()) return cdf.front();
    if (q >= x.back()) return cdf.back();
    std::size_t lo = 0, hi = x.size() - 1;
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (x[mid] <= q)
        lo = mid;
      else
        hi = mid;
    }
    const double s = (q - x[lo]) / (x[hi] - x[lo]);
    return cdf[lo] + s * (cdf[hi] - cdf[lo]);
  };
  double lo = x.front(), hi = x.back();
  const double tol = 1e-12 * (x.back() - x.front());
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) >= level)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace ftl
