#pragma once

#include <optional>
#include <vector>

#include "ftl/piecewise_density.hpp"

namespace ftl {

enum class ParticleMode { Phantom, Anchored };

/// N+1 ordered particle positions bounding N gaps of equal mass ell.
///
/// Anchored: x_0 and x_N sit on the support edges and are integrated.
/// Phantom: x_0 and x_N are reflections of the edge interior particles,
/// recomputed algebraically after every step.
struct ParticleState {
  double t = 0.0;
  std::vector<double> x;  // size N+1, strictly increasing
  double ell = 0.0;
  ParticleMode mode = ParticleMode::Anchored;

  std::size_t gap_count() const { return x.size() - 1; }
  void validate() const;  // throws on non-ordered positions or N < 3
};

/// Gap densities R_i = ell / (x_{i+1} - x_i).
struct GapDensities {
  std::vector<double> r;
  double ell = 0.0;
};

GapDensities gap_densities(const ParticleState& state);

/// Discrete density: value ell/gap on each [x_i, x_{i+1}).
PiecewiseConstantDensity reconstruct(const ParticleState& state);

/// Pseudo-inverse with knots at multiples of ell, built directly from the
/// particle positions.
PseudoInverse pseudo_inverse(const ParticleState& state);

struct InitialDatum {
  PiecewiseConstantDensity density;
  double total_mass;
  double ess_sup;

  explicit InitialDatum(PiecewiseConstantDensity d);
};

/// Equal-mass partition of the initial datum (quantile placement).
/// Quantiles sit at the left edge of any CDF plateau. Anchored mode pins
/// x_0 and x_N to the support edges; Phantom mode reflects them from the
/// interior quantile particles.
ParticleState partition(const InitialDatum& datum, int n_gaps,
                        ParticleMode mode);

/// Left-edge generalized CDF inverse of a tabulated continuous CDF
/// (bisection to 1e-12 of the domain width). Used for datum tables given
/// as sampled CDFs rather than piecewise-constant densities.
double invert_cdf_table(const std::vector<double>& x,
                        const std::vector<double>& cdf, double level);

}  // namespace ftl
