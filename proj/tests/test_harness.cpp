#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ftl/harness.hpp"

using namespace ftl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round trips through JSON with defaults resolved") {
  const nlohmann::json j = {{"n", 50}, {"t_end", 0.25}, {"model", "glwr:2"}};
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.n == 50);
  CHECK(c.t_end == 0.25);
  CHECK(c.model == "glwr:2");
  CHECK(c.mode == "anchored");  // default survives
  CHECK(c.datum == "ic-paper");

  const nlohmann::json out = c.to_json();
  CHECK(out.at("n") == 50);
  CHECK(out.at("rel_tol") == 1e-6);
  CHECK(out.at("snapshots").size() == 21);  // defaults materialized
  const ExperimentConfig back = ExperimentConfig::from_json(out);
  CHECK(back.to_json() == out);
}

TEST_CASE("config validation rejects bad inputs") {
  ExperimentConfig c;
  c.n = 2;
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.mode = "sideways";
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.model = "nonsense";
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.datum = "does_not_exist.csv";
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.snapshots = {0.0, 2.0};  // beyond t_end = 0.5
  CHECK_THROWS(c.validate());
}

TEST_CASE("minimal run produces outputs and diagnostics") {
  ExperimentConfig c;
  c.n = 3;
  c.t_end = 0.1;
  c.snapshots = {0.0, 0.05, 0.1};
  c.out_dir = "harness_out_min";
  const RunResult res = run_experiment(c);
  CHECK(res.trajectory.snapshots.size() == 3);
  CHECK(fs::exists(fs::path(c.out_dir) / "trajectory.csv"));
  CHECK(fs::exists(fs::path(c.out_dir) / "density_0000.csv"));
  CHECK(fs::exists(fs::path(c.out_dir) / "diagnostics.json"));

  const auto& diag = res.diagnostics;
  CHECK(diag.at("model_assumptions").at("v1_ok") == true);
  CHECK(diag.at("model_assumptions").at("v2_ok") == true);
  CHECK(diag.at("snapshots").size() == 3);
  CHECK(diag.at("snapshots")[0].at("w1_from_initial") == 0.0);
  CHECK(diag.contains("notes"));  // velocity-law assumption is flagged
}

TEST_CASE("runs are deterministic byte for byte") {
  ExperimentConfig c;
  c.n = 20;
  c.t_end = 0.3;
  c.out_dir = "harness_out_a";
  run_experiment(c);
  c.out_dir = "harness_out_b";
  run_experiment(c);
  CHECK(slurp("harness_out_a/trajectory.csv") ==
        slurp("harness_out_b/trajectory.csv"));
  CHECK(slurp("harness_out_a/density_0020.csv") ==
        slurp("harness_out_b/density_0020.csv"));
}

TEST_CASE("trajectory CSV round trip") {
  ExperimentConfig c;
  c.n = 8;
  c.t_end = 0.2;
  c.snapshots = {0.0, 0.1, 0.2};
  const RunResult res = run_experiment(c, false);
  write_trajectory_csv(res.trajectory, "traj_tmp.csv");
  const Trajectory back = read_trajectory_csv(
      "traj_tmp.csv", res.trajectory.snapshots.front().ell,
      ParticleMode::Anchored);
  REQUIRE(back.snapshots.size() == res.trajectory.snapshots.size());
  for (std::size_t k = 0; k < back.snapshots.size(); ++k) {
    CHECK(back.snapshots[k].t == res.trajectory.snapshots[k].t);
    for (std::size_t i = 0; i < back.snapshots[k].x.size(); ++i)
      CHECK(back.snapshots[k].x[i] == res.trajectory.snapshots[k].x[i]);
  }
}

TEST_CASE("convergence rows keep the requested order and repeat exactly") {
  ExperimentConfig c;
  c.n_list = {20, 10, 20};
  c.t_end = 0.2;
  c.delta_rho = 1e-2;
  const ConvergenceResult r1 = converge(c);
  REQUIRE(r1.rows.size() == 3);
  CHECK(r1.rows[0].n == 20);
  CHECK(r1.rows[1].n == 10);
  CHECK(r1.rows[2].n == 20);
  // duplicate N entries give identical errors
  CHECK(r1.rows[0].l1_error == r1.rows[2].l1_error);
  // coarser particle count is worse
  CHECK(r1.rows[1].l1_error > r1.rows[0].l1_error);
}

TEST_CASE("parallel convergence matches serial") {
  ExperimentConfig c;
  c.n_list = {10, 15, 20, 25};
  c.t_end = 0.2;
  c.delta_rho = 1e-2;
  c.jobs = 1;
  const ConvergenceResult serial = converge(c);
  c.jobs = 4;
  const ConvergenceResult parallel = converge(c);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].n == parallel.rows[i].n);
    CHECK(serial.rows[i].l1_error == parallel.rows[i].l1_error);
  }
  CHECK(serial.observed_order == parallel.observed_order);
}

TEST_CASE("observed order of a synthetic first-order sequence") {
  std::vector<ConvergenceRow> rows;
  for (int n : {50, 100, 200, 400}) {
    ConvergenceRow r;
    r.n = n;
    r.l1_error = 3.0 / n;
    rows.push_back(r);
  }
  CHECK(observed_order(rows) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property checks pass on a standard run") {
  ExperimentConfig c;
  c.n = 40;
  c.t_end = 0.5;
  c.rel_tol = 1e-8;
  c.abs_tol = 1e-11;
  const CheckReport report = check_properties(c);
  for (const PropertyCheck& chk : report.checks) {
    INFO(chk.name << ": " << chk.detail);
    CHECK((chk.passed || !chk.applicable));
  }
  CHECK(report.all_passed());
  const auto j = report.to_json();
  CHECK(j.at("all_passed") == true);
  CHECK(j.at("checks").size() == report.checks.size());
}

TEST_CASE("V2-dependent checks report as not applicable when unverified") {
  // v = exp(-4 rho): rho * v'(rho) turns increasing past rho = 1/4, so
  // V2 fails on [0, 0.8] while V1 still holds
  {
    std::FILE* f = std::fopen("vel_v1_only_tmp.csv", "w");
    std::fputs("rho,v\n", f);
    for (int i = 0; i <= 120; ++i) {
      const double rho = 3.0 * i / 120.0;
      std::fprintf(f, "%.17g,%.17g\n", rho, std::exp(-4.0 * rho));
    }
    std::fclose(f);
  }
  ExperimentConfig c;
  c.model = "table:vel_v1_only_tmp.csv";
  c.n = 20;
  c.t_end = 0.3;
  const CheckReport report = check_properties(c);
  bool saw_na = false;
  for (const PropertyCheck& chk : report.checks) {
    if (chk.name == "oleinik" || chk.name == "local_bv") {
      CHECK_FALSE(chk.applicable);
      CHECK(chk.detail == "not applicable (V2 unverified)");
      saw_na = true;
    }
  }
  CHECK(saw_na);
  CHECK(report.all_passed());  // inapplicable checks do not fail the report
}

TEST_CASE("corrupted trajectories fail the integrity check") {
  ExperimentConfig c;
  c.n = 8;
  c.t_end = 0.2;
  c.snapshots = {0.0, 0.1, 0.2};
  const RunResult res = run_experiment(c, false);
  Trajectory bad = res.trajectory;
  std::swap(bad.snapshots[1].x[2], bad.snapshots[1].x[3]);
  const InitialDatum datum = c.make_datum();
  const CheckReport report = check_trajectory(bad, c.make_model(),
                                              datum.total_mass, datum.ess_sup);
  REQUIRE_FALSE(report.checks.empty());
  CHECK(report.checks.front().name == "integrity");
  CHECK_FALSE(report.checks.front().passed);
  CHECK_FALSE(report.all_passed());

  Trajectory pinched = res.trajectory;
  // collapse a gap far below ell / rho_sup
  pinched.snapshots[2].x[1] = pinched.snapshots[2].x[0] + 1e-4;
  const CheckReport r2 = check_trajectory(pinched, c.make_model(),
                                          datum.total_mass, datum.ess_sup);
  CHECK_FALSE(r2.all_passed());
  for (const PropertyCheck& chk : r2.checks)
    if (chk.name == "max_principle") CHECK_FALSE(chk.passed);
}
