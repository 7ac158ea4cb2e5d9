#pragma once

#include <string>
#include <vector>

namespace ftl {

/// Point evaluation of the flux f(rho) = rho * v(rho).
struct FluxEval {
  double rho = 0.0;
  double f = 0.0;   // rho * v(rho)
  double df = 0.0;  // v(rho) + rho * v'(rho)
};

struct AssumptionReport {
  bool v1_ok = false;        // v'(rho) < 0 at all interior samples
  bool v2_ok = false;        // rho * v'(rho) non-increasing across samples
  double worst_violation = 0.0;
};

/// Decreasing velocity law v(rho) with analytic derivative.
///
/// Built-in forms: LWR v(rho) = 1 - rho, generalized LWR
/// v(rho) = v_max (1 - rho^gamma), and tabulated laws interpolated by a
/// monotone piecewise cubic (Fritsch-Carlson). Immutable after
/// construction.
class VelocityModel {
 public:
  enum class Form { Lwr, GeneralizedLwr, Tabulated };

  static VelocityModel lwr();
  static VelocityModel generalized_lwr(double v_max, double gamma);
  // points: strictly increasing rho, paired v values.
  static VelocityModel tabulated(std::vector<std::pair<double, double>> points);
  // Two-column CSV "rho,v" with a header row.
  static VelocityModel tabulated_from_csv(const std::string& path);

  double v(double rho) const;
  double dv(double rho) const;
  double v_max() const { return v_max_; }
  Form form() const { return form_; }
  double gamma() const { return gamma_; }

  FluxEval flux(double rho) const;

  AssumptionReport validate_assumptions(double rho_max, int grid_size) const;

  /// True if f'(rho) is strictly decreasing on a grid over [0, rho_hi]
  /// (needed by the exact Riemann construction).
  bool flux_concave_on(double rho_hi, int grid_size = 512) const;

  std::string describe() const;

 private:
  VelocityModel() = default;

  Form form_ = Form::Lwr;
  double v_max_ = 1.0;
  double gamma_ = 1.0;

  // Tabulated form: pchip knots and derivatives.
  std::vector<double> tab_rho_;
  std::vector<double> tab_v_;
  std::vector<double> tab_d_;  // interpolant slope at each knot
};

}  // namespace ftl
