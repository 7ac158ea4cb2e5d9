#include "ftl/velocity_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftl {

namespace {

void require_finite_nonnegative(double rho) {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw std::domain_error("density must be finite and >= 0, got " +
                            std::to_string(rho));
  }
}

// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> delta(n - 1), d(n);
  for (std::size_t k = 0; k + 1 < n; ++k)
    delta[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);

  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      d[k] = 0.0;
    } else {
      const double w1 = 2.0 * (x[k + 1] - x[k]) + (x[k] - x[k - 1]);
      const double w2 = (x[k + 1] - x[k]) + 2.0 * (x[k] - x[k - 1]);
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  // Clamp endpoint slopes so the interpolant stays monotone on end cells.
  auto clamp_end = [](double& de, double del) {
    if (de * del <= 0.0)
      de = 0.0;
    else if (std::abs(de) > 3.0 * std::abs(del))
      de = 3.0 * del;
  };
  clamp_end(d[0], delta[0]);
  clamp_end(d[n - 1], delta[n - 2]);
  return d;
}

}  // namespace

VelocityModel VelocityModel::lwr() {
  VelocityModel m;
  m.form_ = Form::Lwr;
  m.v_max_ = 1.0;
  return m;
}

VelocityModel VelocityModel::generalized_lwr(double v_max, double gamma) {
  if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be > 0");
  if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
  VelocityModel m;
  m.form_ = Form::GeneralizedLwr;
  m.v_max_ = v_max;
  m.gamma_ = gamma;
  return m;
}

VelocityModel VelocityModel::tabulated(
    std::vector<std::pair<double, double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("tabulated model needs at least 2 points");
  VelocityModel m;
  m.form_ = Form::Tabulated;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k > 0 && !(points[k].first > points[k - 1].first))
      throw std::invalid_argument("tabulated rho grid must strictly increase");
    m.tab_rho_.push_back(points[k].first);
    m.tab_v_.push_back(points[k].second);
  }
  if (m.tab_rho_.front() > 0.0) {
    throw std::invalid_argument("tabulated model must start at rho = 0");
  }
  m.tab_d_ = pchip_slopes(m.tab_rho_, m.tab_v_);
  m.v_max_ = m.tab_v_.front();
  return m;
}

VelocityModel VelocityModel::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model CSV: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty model CSV: " + path);
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
      throw std::runtime_error("bad row in model CSV: " + line);
    pts.emplace_back(std::stod(a), std::stod(b));
  }
  return tabulated(std::move(pts));
}

double VelocityModel::v(double rho) const {
  require_finite_nonnegative(rho);
  switch (form_) {
    case Form::Lwr:
      return 1.0 - rho;
    case Form::GeneralizedLwr:
      return v_max_ * (1.0 - std::pow(rho, gamma_));
    case Form::Tabulated: {
      const auto& xs = tab_rho_;
      if (rho >= xs.back()) {  // linear extrapolation with end slope
        return tab_v_.back() + tab_d_.back() * (rho - xs.back());
      }
      const auto it = std::upper_bound(xs.begin(), xs.end(), rho);
      const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
      const double h = xs[k + 1] - xs[k];
      const double s = (rho - xs[k]) / h;
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
      const double h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s);
      const double h11 = s * s * (s - 1);
      return h00 * tab_v_[k] + h * h10 * tab_d_[k] + h01 * tab_v_[k + 1] +
             h * h11 * tab_d_[k + 1];
    }
  }
  return 0.0;
}

double VelocityModel::dv(double rho) const {
  require_finite_nonnegative(rho);
  switch (form_) {
    case Form::Lwr:
      return -1.0;
    case Form::GeneralizedLwr:
      if (gamma_ == 1.0) return -v_max_;
      return -v_max_ * gamma_ * std::pow(rho, gamma_ - 1.0);
    case Form::Tabulated: {
      const auto& xs = tab_rho_;
      if (rho >= xs.back()) return tab_d_.back();
      const auto it = std::upper_bound(xs.begin(), xs.end(), rho);
      const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
      const double h = xs[k + 1] - xs[k];
      const double s = (rho - xs[k]) / h;
      const double dh00 = 6 * s * (s - 1) / h;
      const double dh10 = (1 - s) * (1 - 3 * s);
      const double dh01 = -6 * s * (s - 1) / h;
      const double dh11 = s * (3 * s - 2);
      return dh00 * tab_v_[k] + dh10 * tab_d_[k] + dh01 * tab_v_[k + 1] +
             dh11 * tab_d_[k + 1];
    }
  }
  return 0.0;
}

FluxEval VelocityModel::flux(double rho) const {
  require_finite_nonnegative(rho);
  FluxEval e;
  e.rho = rho;
  e.f = rho * v(rho);
  e.df = v(rho) + rho * dv(rho);
  return e;
}

AssumptionReport VelocityModel::validate_assumptions(double rho_max,
                                                     int grid_size) const {
  if (!(rho_max > 0.0)) throw std::invalid_argument("rho_max must be > 0");
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");

  AssumptionReport rep;
  rep.v1_ok = true;
  rep.v2_ok = true;
  const double tol = 1e-12;
  double prev_rdv = 0.0;
  for (int k = 0; k <= grid_size; ++k) {
    const double rho = rho_max * static_cast<double>(k) / grid_size;
    const double d = dv(rho);
    if (k > 0 && !(d < 0.0)) {
      rep.v1_ok = false;
      rep.worst_violation = std::max(rep.worst_violation, d);
    }
    const double rdv = rho * d;
    if (k > 0 && rdv > prev_rdv + tol) {
      rep.v2_ok = false;
      rep.worst_violation = std::max(rep.worst_violation, rdv - prev_rdv);
    }
    prev_rdv = rdv;
  }
  return rep;
}

bool VelocityModel::flux_concave_on(double rho_hi, int grid_size) const {
  if (!(rho_hi > 0.0)) return true;
  double prev = flux(0.0).df;
  for (int k = 1; k <= grid_size; ++k) {
    const double rho = rho_hi * static_cast<double>(k) / grid_size;
    const double d = flux(rho).df;
    if (!(d < prev)) return false;
    prev = d;
  }
  return true;
}

std::string VelocityModel::describe() const {
  switch (form_) {
    case Form::Lwr:
      return "lwr";
    case Form::GeneralizedLwr:
      return "glwr:gamma=" + std::to_string(gamma_) +
             ",vmax=" + std::to_string(v_max_);
    case Form::Tabulated:
      return "tabulated:" + std::to_string(tab_rho_.size()) + " points";
  }
  return "?";
}

}  // namespace ftl
