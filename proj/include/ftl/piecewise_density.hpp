#pragma once

#include <string>
#include <vector>

namespace ftl {

/// Nonnegative piecewise-constant density: value values[j] on
/// [breakpoints[j], breakpoints[j+1]), zero outside the breakpoint range.
/// Constructors merge breakpoints closer than 1e-14 times the domain width.
class PiecewiseConstantDensity {
 public:
  PiecewiseConstantDensity(std::vector<double> breakpoints,
                           std::vector<double> values);

  // CSV rows (x_left, x_right, value); header row required. Cells must be
  // non-overlapping; gaps between cells become explicit zero cells.
  static PiecewiseConstantDensity from_csv(const std::string& path);
  void to_csv(const std::string& path) const;

  const std::vector<double>& breakpoints() const { return b_; }
  const std::vector<double>& values() const { return c_; }
  std::size_t cell_count() const { return c_.size(); }

  double mass() const;
  double ess_sup() const;
  double support_min() const { return b_.front(); }
  double support_max() const { return b_.back(); }

  double value_at(double x) const;
  /// Cumulative mass up to x; continuous, non-decreasing, piecewise linear.
  double cdf(double x) const;

 private:
  std::vector<double> b_;
  std::vector<double> c_;
};

/// Generalized inverse X(z) = inf{x : F(x) > z} of a density's CDF,
/// stored as piecewise-linear knots on [0, M]. Plateaus of the CDF
/// (vacuum regions) appear as vertical segments: two knots with the same
/// z and different x.
class PseudoInverse {
 public:
  struct Knot {
    double z;
    double x;
  };

  static PseudoInverse from_density(const PiecewiseConstantDensity& d);
  // knots must be non-decreasing in both coordinates
  static PseudoInverse from_knots(std::vector<Knot> knots);

  const std::vector<Knot>& knots() const { return knots_; }
  double total_mass() const { return knots_.back().z; }

  /// Right-continuous evaluation (upper value at a jump).
  double operator()(double z) const;
  /// Left limit (lower value at a jump); equals operator() elsewhere.
  double eval_left(double z) const;

 private:
  std::vector<Knot> knots_;
};

}  // namespace ftl
