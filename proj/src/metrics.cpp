#include "ftl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ftl {

namespace {

// Exact integral of |f - g| on [a, b] for linear f, g given by endpoint
// values (fa, fb) and (ga, gb).
double integrate_abs_linear(double a, double b, double fa, double fb,
                            double ga, double gb) {
  const double w = b - a;
  const double da = fa - ga;
  const double db = fb - gb;
  if (da * db >= 0.0) return 0.5 * (std::abs(da) + std::abs(db)) * w;
  const double xr = w * da / (da - db);  // sign change offset from a
  return 0.5 * (std::abs(da) * xr + std::abs(db) * (w - xr));
}

struct Jump {
  double pos;
  double left;
  double right;
};

std::vector<Jump> density_jumps(const PiecewiseConstantDensity& d) {
  const auto& b = d.breakpoints();
  const auto& c = d.values();
  std::vector<Jump> jumps;
  jumps.push_back({b.front(), 0.0, c.front()});
  for (std::size_t j = 1; j < c.size(); ++j)
    jumps.push_back({b[j], c[j - 1], c[j]});
  jumps.push_back({b.back(), c.back(), 0.0});
  return jumps;
}

}  // namespace

double total_variation(const PiecewiseConstantDensity& d,
                       bool include_boundary) {
  const auto jumps = density_jumps(d);
  double tv = 0.0;
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    if (!include_boundary && (j == 0 || j + 1 == jumps.size())) continue;
    tv += std::abs(jumps[j].right - jumps[j].left);
  }
  return tv;
}

double local_tv(const PiecewiseConstantDensity& d, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("local_tv needs a < b");
  double tv = 0.0;
  for (const Jump& j : density_jumps(d))
    if (a < j.pos && j.pos < b) tv += std::abs(j.right - j.left);
  return tv;
}

double local_tv_of_velocity(const PiecewiseConstantDensity& d,
                            const VelocityModel& model, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("local_tv needs a < b");
  double tv = 0.0;
  for (const Jump& j : density_jumps(d))
    if (a < j.pos && j.pos < b)
      tv += std::abs(model.v(j.right) - model.v(j.left));
  return tv;
}

double wasserstein1_pseudo_inverse(const PiecewiseConstantDensity& d1,
                                   const PiecewiseConstantDensity& d2) {
  const PseudoInverse x1 = PseudoInverse::from_density(d1);
  const PseudoInverse x2 = PseudoInverse::from_density(d2);
  std::vector<double> grid;
  for (const auto& k : x1.knots()) grid.push_back(k.z);
  for (const auto& k : x2.knots()) grid.push_back(k.z);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double za = grid[g];
    const double zb = grid[g + 1];
    total += integrate_abs_linear(za, zb, x1(za), x1.eval_left(zb), x2(za),
                                  x2.eval_left(zb));
  }
  return total;
}

double wasserstein1_cdf(const PiecewiseConstantDensity& d1,
                        const PiecewiseConstantDensity& d2) {
  std::vector<double> grid = d1.breakpoints();
  grid.insert(grid.end(), d2.breakpoints().begin(), d2.breakpoints().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double xa = grid[g];
    const double xb = grid[g + 1];
    total += integrate_abs_linear(xa, xb, d1.cdf(xa), d1.cdf(xb), d2.cdf(xa),
                                  d2.cdf(xb));
  }
  return total;
}

double wasserstein1(const PiecewiseConstantDensity& d1,
                    const PiecewiseConstantDensity& d2) {
  const double m1 = d1.mass();
  const double m2 = d2.mass();
  if (std::abs(m1 - m2) > 1e-10 * std::max({m1, m2, 1.0}))
    throw std::invalid_argument("W1 requires equal total masses");
  const double via_inverse = wasserstein1_pseudo_inverse(d1, d2);
  const double via_cdf = wasserstein1_cdf(d1, d2);
  if (std::abs(via_inverse - via_cdf) >
      1e-10 * std::max(1.0, std::abs(via_inverse)))
    throw std::runtime_error("W1 dual forms disagree beyond tolerance");
  return via_inverse;
}

double l1_error(const PiecewiseConstantDensity& d,
                const PiecewiseConstantDensity& ref, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("l1_error needs a < b");
  std::vector<double> grid{a, b};
  for (double x : d.breakpoints())
    if (x > a && x < b) grid.push_back(x);
  for (double x : ref.breakpoints())
    if (x > a && x < b) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double mid = 0.5 * (grid[g] + grid[g + 1]);
    total += std::abs(d.value_at(mid) - ref.value_at(mid)) *
             (grid[g + 1] - grid[g]);
  }
  return total;
}

OleinikDiagnostic oleinik(const ParticleState& state,
                          const VelocityModel& model) {
  state.validate();
  OleinikDiagnostic diag;
  diag.t = state.t;
  diag.ell = state.ell;
  const std::size_t n = state.gap_count();
  diag.z.assign(n, 0.0);
  if (state.t > 0.0) {
    const std::vector<double> w = rhs(state, model);
    const GapDensities g = gap_densities(state);
    for (std::size_t i = 0; i < n; ++i)
      diag.z[i] = state.t * g.r[i] * (w[i + 1] - w[i]);
  }
  // Phantom edge gaps mirror their neighbours; exclude them from the
  // reported maximum.
  const std::size_t lo = state.mode == ParticleMode::Phantom ? 1 : 0;
  const std::size_t hi = state.mode == ParticleMode::Phantom ? n - 1 : n;
  diag.max_z = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    diag.max_z = std::max(diag.max_z, diag.z[i]);
  return diag;
}

namespace {

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return q * q * q;
}

double bump_d(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return -6.0 * s * q * q;
}

constexpr double kBumpSupD = 1.7173625848;  // max |d/ds (1-s^2)^3|
constexpr double kBumpSupDD = 6.0;          // max |d^2/ds^2 (1-s^2)^3|

// 5-point Gauss-Legendre nodes/weights on [-1, 1]; exact for the
// degree-6 bump polynomial.
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665,
                           0.5688888888888889, 0.4786286704993665,
                           0.2369268850561891};

}  // namespace

double BumpTestFunction::phi(double t, double x) const {
  return bump((t - t_center) / t_halfwidth) * bump((x - x_center) / x_halfwidth);
}

double BumpTestFunction::phi_t(double t, double x) const {
  return bump_d((t - t_center) / t_halfwidth) / t_halfwidth *
         bump((x - x_center) / x_halfwidth);
}

double BumpTestFunction::phi_x(double t, double x) const {
  return bump((t - t_center) / t_halfwidth) *
         bump_d((x - x_center) / x_halfwidth) / x_halfwidth;
}

double BumpTestFunction::c2_norm() const {
  return std::max({1.0, kBumpSupD / t_halfwidth,
                   kBumpSupDD / (t_halfwidth * t_halfwidth),
                   kBumpSupD / x_halfwidth,
                   kBumpSupDD / (x_halfwidth * x_halfwidth)});
}

std::string BumpTestFunction::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "bump(t: %g +/- %g, x: %g +/- %g)", t_center,
                t_halfwidth, x_center, x_halfwidth);
  return buf;
}

namespace {

// Scaling constant of the entropy-residual tolerance model
// tol = C * (dt^2 + ell) * ||phi||_C2. The ell part majorises the
// cell-averaging error of the scheme's weak form (jump sums bounded by
// the total variation of v(rho) times the bump's Lipschitz constant);
// the dt^2 part is the trapezoid-in-time error.
constexpr double kEntropyTolScale = 0.01;

}  // namespace

EntropyResidualReport entropy_residual(const Trajectory& traj,
                                       const VelocityModel& model, double k,
                                       const BumpTestFunction& phi) {
  if (k < 0.0) throw std::invalid_argument("entropy constant k must be >= 0");
  if (traj.snapshots.size() < 2)
    throw std::invalid_argument("entropy residual needs >= 2 snapshots");
  const double t_lo = phi.t_center - phi.t_halfwidth;
  const double t_hi = phi.t_center + phi.t_halfwidth;
  if (!(t_lo > 0.0))
    throw std::invalid_argument("bump time support must lie in (0, inf)");
  if (t_lo < traj.snapshots.front().t || t_hi > traj.snapshots.back().t)
    throw std::invalid_argument(
        "bump time support exceeds the trajectory's snapshot range");

  const double x_lo = phi.x_center - phi.x_halfwidth;
  const double x_hi = phi.x_center + phi.x_halfwidth;
  const double fk = model.flux(k).f;

  // psi_t-independent x-factors of the integrand at one snapshot.
  auto g_of = [&](const ParticleState& s) {
    const double ts = s.t;
    double sum_a = 0.0;  // multiplies phi_t
    double sum_b = 0.0;  // multiplies phi_x
    const double ell = s.ell;
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
      const double xl = s.x[i];
      const double xr = s.x[i + 1];
      if (xr <= x_lo || xl >= x_hi) continue;
      const double r = ell / (xr - xl);
      const double a_coef = std::abs(r - k) - k;
      const double sgn = r > k ? 1.0 : (r < k ? -1.0 : 0.0);
      const double b_coef = sgn * (model.flux(r).f - fk) - fk;

      const double cl = std::max(xl, x_lo);
      const double cr = std::min(xr, x_hi);
      double ix = 0.0;  // integral of the x-bump over the clipped cell
      for (int q = 0; q < 5; ++q) {
        const double xq = 0.5 * (cl + cr) + 0.5 * (cr - cl) * kGx[q];
        ix += kGw[q] * bump((xq - phi.x_center) / phi.x_halfwidth);
      }
      ix *= 0.5 * (cr - cl);
      const double jx = bump((xr - phi.x_center) / phi.x_halfwidth) -
                        bump((xl - phi.x_center) / phi.x_halfwidth);
      sum_a += a_coef * ix;
      sum_b += b_coef * jx;
    }
    const double st = (ts - phi.t_center) / phi.t_halfwidth;
    return bump_d(st) / phi.t_halfwidth * sum_a + bump(st) * sum_b;
  };

  double value = 0.0;
  double dt_max = 0.0;
  double g_prev = 0.0;
  bool have_prev = false;
  double t_prev = 0.0;
  for (const ParticleState& s : traj.snapshots) {
    if (s.t < t_lo || s.t > t_hi) {
      // restart at gaps outside the support; g vanishes there anyway
      have_prev = s.t < t_lo ? false : have_prev;
      if (s.t > t_hi) break;
      continue;
    }
    const double g = g_of(s);
    if (have_prev) {
      const double dt = s.t - t_prev;
      dt_max = std::max(dt_max, dt);
      value += 0.5 * (g_prev + g) * dt;
    }
    g_prev = g;
    t_prev = s.t;
    have_prev = true;
  }
  if (dt_max <= 0.0 || dt_max > 2.0 * phi.t_halfwidth / 20.0)
    throw std::invalid_argument(
        "snapshots too sparse for the bump's time width");

  EntropyResidualReport rep;
  rep.k = k;
  rep.testfn = phi.describe();
  rep.value = value;
  const double ell = traj.snapshots.front().ell;
  rep.tol = kEntropyTolScale * (dt_max * dt_max + ell) * phi.c2_norm();
  return rep;
}

}  // namespace ftl
