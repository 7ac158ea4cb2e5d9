#include "ftl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftl {

namespace {

void require_concave(const VelocityModel& model, double rho_hi) {
  if (rho_hi > 0.0 && !model.flux_concave_on(rho_hi))
    throw std::invalid_argument(
        "flux is not strictly concave on the relevant density range; "
        "model unsupported by the exact solver");
}

double rankine_hugoniot(const VelocityModel& model, double l, double r) {
  return (model.flux(r).f - model.flux(l).f) / (r - l);
}

}  // namespace

Wave solve_riemann(double rho_left, double rho_right,
                   const VelocityModel& model) {
  if (rho_left < 0.0 || rho_right < 0.0)
    throw std::domain_error("Riemann states must be >= 0");
  require_concave(model, std::max(rho_left, rho_right));

  Wave w;
  w.left = rho_left;
  w.right = rho_right;
  if (rho_left == rho_right) {
    w.kind = Wave::Kind::None;
  } else if (rho_left < rho_right) {
    w.kind = Wave::Kind::Shock;
    w.sigma = rankine_hugoniot(model, rho_left, rho_right);
  } else {
    w.kind = Wave::Kind::Rarefaction;
    w.s_left = model.flux(rho_left).df;
    w.s_right = model.flux(rho_right).df;
  }
  return w;
}

double inverse_flux_derivative(const VelocityModel& model, double slope,
                               double rho_hi) {
  // f' is strictly decreasing on [0, rho_hi]; plain bisection.
  double lo = 0.0, hi = rho_hi;
  const double d_lo = model.flux(lo).df;
  const double d_hi = model.flux(hi).df;
  if (slope >= d_lo) return lo;
  if (slope <= d_hi) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + rho_hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (model.flux(mid).df > slope)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

FrontTracker::FrontTracker(const PiecewiseConstantDensity& datum,
                           const VelocityModel& model, double t_end,
                           double delta_rho)
    : model_(model), t_end_(t_end), delta_rho_(delta_rho) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!(delta_rho > 0.0)) throw std::invalid_argument("delta_rho must be > 0");
  rho_hi_ = datum.ess_sup();
  require_concave(model_, rho_hi_);

  const auto& b = datum.breakpoints();
  const auto& c = datum.values();
  std::vector<std::size_t> emitted;
  emit_wave(0.0, b.front(), 0.0, c.front(), emitted);
  for (std::size_t j = 1; j < c.size(); ++j)
    emit_wave(0.0, b[j], c[j - 1], c[j], emitted);
  emit_wave(0.0, b.back(), c.back(), 0.0, emitted);
  active_.clear();
  for (std::size_t i = 0; i < fronts_.size(); ++i) active_.push_back(i);

  run(t_end);
}

void FrontTracker::emit_wave(double t, double x, double rho_l, double rho_r,
                             std::vector<std::size_t>& emitted) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (rho_l == rho_r) return;
  if (rho_l < rho_r) {
    Front f{t, x, rankine_hugoniot(model_, rho_l, rho_r), rho_l, rho_r, inf};
    emitted.push_back(fronts_.size());
    fronts_.push_back(f);
    return;
  }
  // Rarefaction: fan of sub-jumps of size <= delta_rho, ordered by
  // increasing speed.
  const long id = next_fan_id_++;
  const int m = std::max(1, static_cast<int>(
                                std::ceil((rho_l - rho_r) / delta_rho_)));
  double prev = rho_l;
  for (int j = 1; j <= m; ++j) {
    const double next =
        rho_l + (rho_r - rho_l) * static_cast<double>(j) / m;
    Front f{t, x, rankine_hugoniot(model_, prev, next), prev, next, inf};
    f.fan_id = id;
    f.fan_t0 = t;
    f.fan_x0 = x;
    emitted.push_back(fronts_.size());
    fronts_.push_back(f);
    prev = next;
  }
}

void FrontTracker::run(double t_stop) {
  while (true) {
    if (interactions_ > 1000000)
      throw std::runtime_error("front tracking exceeded 1e6 interactions");

    // earliest collision among adjacent active fronts
    double t_best = std::numeric_limits<double>::infinity();
    std::size_t pair = 0;
    for (std::size_t a = 0; a + 1 < active_.size(); ++a) {
      const Front& fl = fronts_[active_[a]];
      const Front& fr = fronts_[active_[a + 1]];
      if (!(fl.speed > fr.speed)) continue;
      const long double gap = static_cast<long double>(fr.position(t_now_)) -
                              static_cast<long double>(fl.position(t_now_));
      const long double dt =
          std::max<long double>(0.0L, gap) /
          (static_cast<long double>(fl.speed) -
           static_cast<long double>(fr.speed));
      const double tc = static_cast<double>(t_now_ + dt);
      if (tc < t_best) {
        t_best = tc;
        pair = a;
      }
    }
    if (!(t_best <= t_stop)) break;

    // cluster all fronts meeting at the same point
    const double xc = fronts_[active_[pair]].position(t_best);
    const double scale =
        1.0 + std::abs(xc) +
        std::abs(fronts_[active_.back()].position(t_best) -
                 fronts_[active_.front()].position(t_best));
    const double tol = 1e-11 * scale;
    std::size_t lo = pair, hi = pair + 1;
    while (lo > 0 &&
           std::abs(fronts_[active_[lo - 1]].position(t_best) - xc) <= tol)
      --lo;
    while (hi + 1 < active_.size() &&
           std::abs(fronts_[active_[hi + 1]].position(t_best) - xc) <= tol)
      ++hi;

    const double rho_l = fronts_[active_[lo]].left;
    const double rho_r = fronts_[active_[hi]].right;
    for (std::size_t a = lo; a <= hi; ++a)
      fronts_[active_[a]].death = t_best;

    std::vector<std::size_t> emitted;
    emit_wave(t_best, xc, rho_l, rho_r, emitted);
    active_.erase(active_.begin() + static_cast<long>(lo),
                  active_.begin() + static_cast<long>(hi) + 1);
    active_.insert(active_.begin() + static_cast<long>(lo), emitted.begin(),
                   emitted.end());
    t_now_ = t_best;
    ++interactions_;
  }
  t_now_ = t_stop;
}

std::vector<const FrontTracker::Front*> FrontTracker::alive_sorted(
    double t) const {
  std::vector<const Front*> out;
  for (const Front& f : fronts_)
    if (f.alive_at(t)) out.push_back(&f);
  std::sort(out.begin(), out.end(), [&](const Front* a, const Front* b) {
    const double pa = a->position(t);
    const double pb = b->position(t);
    if (pa != pb) return pa < pb;
    return a->speed < b->speed;
  });
  return out;
}

double FrontTracker::fan_value(const Front& f, double t, double x) const {
  const double tau = t - f.fan_t0;
  if (!(tau > 0.0)) return f.left;
  return inverse_flux_derivative(model_, (x - f.fan_x0) / tau, rho_hi_);
}

double FrontTracker::sample(double t, double x) const {
  if (t < 0.0 || t > t_end_)
    throw std::invalid_argument("sample time outside [0, t_end]");
  const auto alive = alive_sorted(t);
  if (alive.empty()) return 0.0;
  if (x < alive.front()->position(t)) return alive.front()->left;

  // rightmost front at or left of x
  std::size_t j = 0;
  while (j + 1 < alive.size() && alive[j + 1]->position(t) <= x) ++j;
  const Front* fl = alive[j];
  if (j + 1 < alive.size()) {
    const Front* fr = alive[j + 1];
    if (fl->fan_id >= 0 && fl->fan_id == fr->fan_id && fl->right == fr->left)
      return fan_value(*fl, t, x);
  }
  return fl->right;
}

PiecewiseConstantDensity FrontTracker::sample_density(double t) const {
  if (t < 0.0 || t > t_end_)
    throw std::invalid_argument("sample time outside [0, t_end]");
  const auto alive = alive_sorted(t);
  if (alive.empty()) {
    return PiecewiseConstantDensity({0.0, 1.0}, {0.0});
  }

  std::vector<double> b{alive.front()->position(t)};
  std::vector<double> v;
  for (std::size_t j = 0; j + 1 < alive.size(); ++j) {
    const Front* fl = alive[j];
    const Front* fr = alive[j + 1];
    const double xl = fl->position(t);
    const double xr = fr->position(t);
    if (!(xr > b.back())) continue;
    const bool fan_region =
        fl->fan_id >= 0 && fl->fan_id == fr->fan_id && fl->right == fr->left;
    if (fan_region && t > fl->fan_t0) {
      // resolve the continuous profile on a fine sub-grid
      const int sub = 4;
      for (int q = 1; q <= sub; ++q) {
        const double xq = xl + (xr - xl) * static_cast<double>(q) / sub;
        const double xm = 0.5 * (b.back() + xq);
        b.push_back(xq);
        v.push_back(fan_value(*fl, t, xm));
      }
    } else {
      b.push_back(xr);
      v.push_back(fl->right);
    }
    (void)xl;
  }
  if (v.empty()) {
    // single front: represent the jump location with vacuum around it
    const double x0 = alive.front()->position(t);
    return PiecewiseConstantDensity({x0 - 1.0, x0, x0 + 1.0},
                                    {alive.front()->left,
                                     alive.front()->right});
  }
  return PiecewiseConstantDensity(std::move(b), std::move(v));
}

}  // namespace ftl
