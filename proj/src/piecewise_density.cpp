#include "ftl/piecewise_density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftl {

PiecewiseConstantDensity::PiecewiseConstantDensity(
    std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
    throw std::invalid_argument(
        "need m+1 breakpoints for m cell values, m >= 1");
  for (double x : breakpoints)
    if (!std::isfinite(x))
      throw std::invalid_argument("non-finite breakpoint");
  for (double c : values) {
    if (!std::isfinite(c) || c < 0.0)
      throw std::invalid_argument("cell values must be finite and >= 0");
  }
  const double width = breakpoints.back() - breakpoints.front();
  if (!(width > 0.0))
    throw std::invalid_argument("breakpoints must span a positive width");
  const double merge_tol = 1e-14 * width;

  b_.push_back(breakpoints.front());
  for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
    const double left = breakpoints[j];
    const double right = breakpoints[j + 1];
    if (!(right >= left))
      throw std::invalid_argument("breakpoints must be non-decreasing");
    if (right - left <= merge_tol) continue;  // drop zero-width cell
    b_.push_back(right);
    c_.push_back(values[j]);
  }
  if (c_.empty())
    throw std::invalid_argument("all cells have zero width");
}

PiecewiseConstantDensity PiecewiseConstantDensity::from_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open density CSV: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty density CSV: " + path);

  struct Cell {
    double left, right, value;
  };
  std::vector<Cell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') ||
        !std::getline(row, c, ','))
      throw std::runtime_error("bad row in density CSV: " + line);
    cells.push_back({std::stod(a), std::stod(b), std::stod(c)});
  }
  if (cells.empty()) throw std::runtime_error("density CSV has no cells");
  std::sort(cells.begin(), cells.end(),
            [](const Cell& u, const Cell& w) { return u.left < w.left; });

  std::vector<double> b{cells.front().left};
  std::vector<double> v;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const Cell& cell = cells[j];
    if (!(cell.right > cell.left))
      throw std::runtime_error("density CSV cell with non-positive width");
    if (cell.value < 0.0)
      throw std::runtime_error("density CSV cell with negative value");
    if (cell.left < b.back() - 1e-14 * (cells.back().right - cells.front().left))
      throw std::runtime_error("density CSV cells overlap");
    if (cell.left > b.back()) {  // vacuum gap between cells
      b.push_back(cell.left);
      v.push_back(0.0);
    }
    b.push_back(cell.right);
    v.push_back(cell.value);
  }
  return PiecewiseConstantDensity(std::move(b), std::move(v));
}

void PiecewiseConstantDensity::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write density CSV: " + path);
  out << "x_left,x_right,value\n";
  char buf[160];
  for (std::size_t j = 0; j < c_.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", b_[j], b_[j + 1],
                  c_[j]);
    out << buf;
  }
}

double PiecewiseConstantDensity::mass() const {
  double m = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j)
    m += c_[j] * (b_[j + 1] - b_[j]);
  return m;
}

double PiecewiseConstantDensity::ess_sup() const {
  return *std::max_element(c_.begin(), c_.end());
}

double PiecewiseConstantDensity::value_at(double x) const {
  if (x < b_.front() || x >= b_.back()) return 0.0;
  const auto it = std::upper_bound(b_.begin(), b_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - b_.begin()) - 1;
  return c_[std::min(j, c_.size() - 1)];
}

double PiecewiseConstantDensity::cdf(double x) const {
  if (x <= b_.front()) return 0.0;
  double m = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (x >= b_[j + 1]) {
      m += c_[j] * (b_[j + 1] - b_[j]);
    } else {
      m += c_[j] * (x - b_[j]);
      break;
    }
  }
  return m;
}

PseudoInverse PseudoInverse::from_density(const PiecewiseConstantDensity& d) {
  if (!(d.mass() > 0.0))
    throw std::invalid_argument("pseudo-inverse of a zero-mass density");
  PseudoInverse inv;
  const auto& b = d.breakpoints();
  const auto& c = d.values();
  double z = 0.0;
  inv.knots_.push_back({0.0, b.front()});
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] > 0.0) {
      z += c[j] * (b[j + 1] - b[j]);
      inv.knots_.push_back({z, b[j + 1]});
    } else {
      // CDF plateau: vertical jump of X at level z.
      inv.knots_.push_back({z, b[j + 1]});
    }
  }
  return inv;
}

PseudoInverse PseudoInverse::from_knots(std::vector<Knot> knots) {
  if (knots.size() < 2)
    throw std::invalid_argument("pseudo-inverse needs at least 2 knots");
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    if (knots[k + 1].z < knots[k].z || knots[k + 1].x < knots[k].x)
      throw std::invalid_argument("pseudo-inverse knots must be monotone");
  }
  PseudoInverse inv;
  inv.knots_ = std::move(knots);
  return inv;
}

double PseudoInverse::operator()(double z) const {
  if (z <= knots_.front().z) {
    // at z = 0 on a leading plateau the inf definition gives the upper knot
    std::size_t k = 0;
    while (k + 1 < knots_.size() && knots_[k + 1].z <= knots_.front().z) ++k;
    return knots_[k].x;
  }
  if (z >= knots_.back().z) return knots_.back().x;
  // last knot with knots_[k].z <= z, preferring the upper one at ties
  std::size_t lo = 0, hi = knots_.size() - 1;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (knots_[mid].z <= z)
      lo = mid;
    else
      hi = mid;
  }
  const Knot& a = knots_[lo];
  const Knot& b = knots_[hi];
  if (b.z == a.z) return b.x;
  return a.x + (z - a.z) * (b.x - a.x) / (b.z - a.z);
}

double PseudoInverse::eval_left(double z) const {
  if (z <= knots_.front().z) return knots_.front().x;
  if (z >= knots_.back().z) {
    std::size_t k = knots_.size() - 1;
    while (k > 0 && knots_[k - 1].z >= knots_.back().z) --k;
    return knots_[k].x;
  }
  // first knot with knots_[k].z >= z, preferring the lower one at ties
  std::size_t lo = 0, hi = knots_.size() - 1;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (knots_[mid].z < z)
      lo = mid;
    else
      hi = mid;
  }
  const Knot& a = knots_[lo];
  const Knot& b = knots_[hi];
  if (b.z == a.z) return a.x;
  return a.x + (z - a.z) * (b.x - a.x) / (b.z - a.z);
}

}  // namespace ftl
