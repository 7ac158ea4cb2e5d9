#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ftl/velocity_model.hpp"

using ftl::VelocityModel;

TEST_CASE("LWR flux values") {
  const auto m = VelocityModel::lwr();
  CHECK(m.v_max() == 1.0);

  auto e0 = m.flux(0.0);
  CHECK(e0.f == 0.0);
  CHECK(e0.df == 1.0);

  CHECK(m.flux(0.4).f == doctest::Approx(0.24).epsilon(1e-15));

  auto e8 = m.flux(0.8);
  CHECK(e8.f == doctest::Approx(0.16).epsilon(1e-15));
  CHECK(e8.df == doctest::Approx(-0.6).epsilon(1e-15));
}

TEST_CASE("flux is exactly rho*v and rejects bad input") {
  const auto m = VelocityModel::generalized_lwr(2.0, 3.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double rho = u(rng);
    CHECK(m.flux(rho).f == rho * m.v(rho));  // exact by construction
  }
  CHECK_THROWS_AS(m.flux(-0.1), std::domain_error);
  CHECK_THROWS_AS(m.flux(std::nan("")), std::domain_error);
}

TEST_CASE("LWR derivative identity") {
  const auto m = VelocityModel::lwr();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double rho = u(rng);
    CHECK(std::abs(m.flux(rho).df - (1.0 - 2.0 * rho)) <= 1e-14);
  }
}

TEST_CASE("assumption validation") {
  SUBCASE("LWR satisfies V1 and V2") {
    const auto rep = VelocityModel::lwr().validate_assumptions(1.0, 256);
    CHECK(rep.v1_ok);
    CHECK(rep.v2_ok);
  }

  SUBCASE("increasing tabulated law fails V1") {
    const auto m = VelocityModel::tabulated({{0.0, 0.1}, {1.0, 0.5}, {2.0, 1.0}});
    const auto rep = m.validate_assumptions(2.0, 64);
    CHECK_FALSE(rep.v1_ok);
  }

  SUBCASE("v = exp(-rho) satisfies V1 but not V2") {
    // rho * v' = -rho e^{-rho} turns around at rho = 1
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k <= 300; ++k) {
      const double rho = 3.0 * k / 300.0;
      pts.emplace_back(rho, std::exp(-rho));
    }
    const auto m = VelocityModel::tabulated(std::move(pts));
    const auto rep = m.validate_assumptions(3.0, 256);
    CHECK(rep.v1_ok);
    CHECK_FALSE(rep.v2_ok);
  }
}

TEST_CASE("V1 models are strictly decreasing on random pairs") {
  const auto models = {VelocityModel::lwr(),
                       VelocityModel::generalized_lwr(1.3, 2.0)};
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  for (const auto& m : models) {
    REQUIRE(m.validate_assumptions(1.0, 128).v1_ok);
    for (int i = 0; i < 200; ++i) {
      double a = u(rng), b = u(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      CHECK(m.v(a) > m.v(b));
    }
  }
}

TEST_CASE("tabulated CSV loader") {
  {
    std::FILE* f = std::fopen("model_tmp.csv", "w");
    std::fputs("rho,v\n0,1\n0.5,0.6\n1,0\n", f);
    std::fclose(f);
  }
  const auto m = VelocityModel::tabulated_from_csv("model_tmp.csv");
  CHECK(m.v(0.0) == doctest::Approx(1.0));
  CHECK(m.v(1.0) == doctest::Approx(0.0));
  CHECK(m.v_max() == doctest::Approx(1.0));
  CHECK(m.validate_assumptions(1.0, 64).v1_ok);
  CHECK_THROWS(VelocityModel::tabulated_from_csv("missing_file.csv"));
}
