#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ftl/harness.hpp"
#include "ftl/metrics.hpp"

using namespace ftl;

namespace {

PiecewiseConstantDensity random_density(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_cells(1, 8);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  const int m = n_cells(rng);
  std::vector<double> b(static_cast<std::size_t>(m) + 1);
  for (double& x : b) x = pos(rng);
  std::sort(b.begin(), b.end());
  for (std::size_t j = 0; j + 1 < b.size(); ++j)
    if (b[j + 1] - b[j] < 1e-3) b[j + 1] = b[j] + 1e-3;
  std::vector<double> c(static_cast<std::size_t>(m));
  double mass = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    c[j] = val(rng);
    mass += c[j] * (b[j + 1] - b[j]);
  }
  if (mass <= 0.0) c[0] = 0.5;
  return PiecewiseConstantDensity(std::move(b), std::move(c));
}

PiecewiseConstantDensity rescaled_to_mass(const PiecewiseConstantDensity& d,
                                          double target) {
  std::vector<double> c = d.values();
  const double factor = target / d.mass();
  for (double& v : c) v *= factor;
  return PiecewiseConstantDensity(d.breakpoints(), std::move(c));
}

}  // namespace

TEST_CASE("total variation of simple profiles") {
  const PiecewiseConstantDensity one_cell({0.0, 1.0}, {0.7});
  CHECK(total_variation(one_cell, true) == doctest::Approx(1.4));
  CHECK(total_variation(one_cell, false) == 0.0);

  const auto two = ic_paper();  // 0.4 on [-1,0], 0.8 on [0,1]
  CHECK(total_variation(two, true) == doctest::Approx(1.6));
  CHECK(total_variation(two, false) == doctest::Approx(0.4));
}

TEST_CASE("interior TV never exceeds boundary-inclusive TV") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_density(rng);
    CHECK(total_variation(d, false) <= total_variation(d, true) + 1e-15);
  }
}

TEST_CASE("local TV counts only jumps inside the window") {
  const auto d = ic_paper();
  CHECK(local_tv(d, -0.5, 0.5) == doctest::Approx(0.4));
  CHECK(local_tv(d, -2.0, 2.0) == doctest::Approx(1.6));  // edges included
  CHECK(local_tv(d, 0.1, 0.9) == 0.0);
  CHECK(local_tv(d, -1.0, 1.0) == doctest::Approx(0.4));  // a,b excluded
  CHECK_THROWS(local_tv(d, 1.0, -1.0));
}

TEST_CASE("local TV of the velocity uses v outside the support") {
  const auto d = ic_paper();
  const auto m = VelocityModel::lwr();
  // jump at 0: |v(0.8) - v(0.4)| = 0.4
  CHECK(local_tv_of_velocity(d, m, -0.5, 0.5) == doctest::Approx(0.4));
  // support edge at 1: |v(0) - v(0.8)| = 0.8, vacuum maps to v_max
  CHECK(local_tv_of_velocity(d, m, 0.5, 1.5) == doctest::Approx(0.8));
}

TEST_CASE("Wasserstein-1 basics") {
  const auto d = ic_paper();
  CHECK(wasserstein1(d, d) == doctest::Approx(0.0));

  // translation by 0.3 costs 0.3 per unit mass
  PiecewiseConstantDensity shifted({-0.7, 0.3, 1.3}, {0.4, 0.8});
  CHECK(wasserstein1(d, shifted) == doctest::Approx(0.3 * 1.2).epsilon(1e-12));

  const PiecewiseConstantDensity uni({0.0, 1.0}, {1.0});
  const PiecewiseConstantDensity spread({0.0, 2.0}, {0.5});
  CHECK(wasserstein1(uni, spread) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS(wasserstein1(uni, d));  // unequal masses
}

TEST_CASE("the two W1 forms agree on random equal-mass pairs") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d1 = random_density(rng);
    const auto d2 = rescaled_to_mass(random_density(rng), d1.mass());
    const double a = wasserstein1_pseudo_inverse(d1, d2);
    const double b = wasserstein1_cdf(d1, d2);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, a));
  }
}

TEST_CASE("W1 handles vacuum regions") {
  const PiecewiseConstantDensity split({0.0, 1.0, 2.0, 3.0}, {0.5, 0.0, 0.5});
  const PiecewiseConstantDensity solid({1.0, 2.0}, {1.0});
  // quantile paths: |2z - (1+z)| on [0,1/2], |z| on [1/2,1]
  CHECK(wasserstein1(split, solid) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("exact L1 distance between piecewise-constant profiles") {
  const auto d = ic_paper();
  const PiecewiseConstantDensity zero({-2.0, 2.0}, {0.0});
  CHECK(l1_error(d, zero, -2.0, 2.0) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(l1_error(d, d, -2.0, 2.0) == 0.0);
  // window clipping: only the 0.8 plateau intersects [0.5, 3]
  CHECK(l1_error(d, zero, 0.5, 3.0) == doctest::Approx(0.4).epsilon(1e-14));

  const PiecewiseConstantDensity other({-1.0, 1.0}, {0.6});
  // |0.4-0.6| on [-1,0] plus |0.8-0.6| on [0,1]
  CHECK(l1_error(d, other, -2.0, 2.0) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("one-sided smoothing diagnostic") {
  const auto m = VelocityModel::lwr();
  ParticleState s;
  s.x = {0.0, 0.25, 0.5, 0.75, 1.0};
  s.ell = 0.25;
  s.mode = ParticleMode::Anchored;

  SUBCASE("z vanishes at t = 0") {
    s.t = 0.0;
    const auto diag = oleinik(s, m);
    CHECK(diag.max_z == 0.0);
    for (double z : diag.z) CHECK(z == 0.0);
  }
  SUBCASE("uniform gaps load only the leader gap") {
    s.t = 0.5;
    const auto diag = oleinik(s, m);
    // interior gaps have equal velocities on both sides
    for (std::size_t i = 0; i + 1 < diag.z.size(); ++i)
      CHECK(diag.z[i] == doctest::Approx(0.0));
    // leader gap: t * R * (v_max - v(R)) with R = 1
    CHECK(diag.z.back() == doctest::Approx(0.5 * 1.0 * (1.0 - 0.0)));
    CHECK(diag.max_z == doctest::Approx(0.5));
  }
}

TEST_CASE("oleinik bound holds along an integrated run") {
  const auto m = VelocityModel::lwr();
  InitialDatum datum(ic_paper());
  const auto s0 = partition(datum, 50, ParticleMode::Anchored);
  std::vector<double> snaps{0.1, 0.25, 0.5, 0.75, 1.0};
  const auto traj = integrate(s0, m, 1.0, 1e-8, 1e-11, snaps);
  for (const auto& s : traj.snapshots) {
    const auto diag = oleinik(s, m);
    CHECK(diag.max_z <= s.ell * (1.0 + 1e-6));
  }
}

TEST_CASE("bump test function") {
  const BumpTestFunction phi{0.5, 0.2, 0.0, 1.0};
  CHECK(phi.phi(0.5, 0.0) == doctest::Approx(1.0));
  CHECK(phi.phi(0.71, 0.0) == 0.0);  // beyond the time support
  CHECK(phi.phi(0.5, 1.5) == 0.0);   // outside the space support
  CHECK(phi.phi_t(0.5, 0.0) == doctest::Approx(0.0));
  CHECK(phi.phi_x(0.5, 0.0) == doctest::Approx(0.0));
  // finite-difference cross-check of the derivatives
  const double h = 1e-6;
  const double t = 0.45, x = 0.3;
  CHECK(phi.phi_t(t, x) ==
        doctest::Approx((phi.phi(t + h, x) - phi.phi(t - h, x)) / (2 * h))
            .epsilon(1e-6));
  CHECK(phi.phi_x(t, x) ==
        doctest::Approx((phi.phi(t, x + h) - phi.phi(t, x - h)) / (2 * h))
            .epsilon(1e-6));
  CHECK(phi.c2_norm() >= 6.0 / (0.2 * 0.2));
}

TEST_CASE("entropy residual of a resolved run stays within tolerance") {
  const auto m = VelocityModel::lwr();
  InitialDatum datum(ic_paper());
  const auto s0 = partition(datum, 150, ParticleMode::Anchored);
  std::vector<double> snaps;
  for (int k = 0; k <= 100; ++k) snaps.push_back(0.5 * k / 100.0);
  const auto traj = integrate(s0, m, 0.5, 1e-7, 1e-10, snaps);

  const BumpTestFunction phi{0.25, 0.18, -0.05, 0.45};
  // k = 0 reduces to the weak form; k above the range gives its negative
  for (double k : {0.0, 1.0}) {
    const auto rep = entropy_residual(traj, m, k, phi);
    CHECK(std::abs(rep.value) <= rep.tol);
  }
  // k between the shock states: the shock produces entropy
  const auto rep = entropy_residual(traj, m, 0.6, phi);
  CHECK(rep.value >= -rep.tol);
}

TEST_CASE("entropy residual rejects unusable inputs") {
  const auto m = VelocityModel::lwr();
  InitialDatum datum(ic_paper());
  const auto s0 = partition(datum, 20, ParticleMode::Anchored);
  const auto sparse = integrate(s0, m, 0.5, 1e-6, 1e-9, {0.0, 0.25, 0.5});
  const BumpTestFunction phi{0.25, 0.18, 0.0, 0.5};
  CHECK_THROWS(entropy_residual(sparse, m, 0.6, phi));  // snapshots too sparse
  const BumpTestFunction at_zero{0.1, 0.2, 0.0, 0.5};
  CHECK_THROWS(entropy_residual(sparse, m, 0.6, at_zero));  // support hits t<=0
  CHECK_THROWS(entropy_residual(sparse, m, -1.0, phi));
}
