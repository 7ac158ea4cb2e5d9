#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftl/harness.hpp"

namespace {

using ftl::ExperimentConfig;
using nlohmann::json;

struct CliFlags {
  std::string config_path;
  std::string model, datum, mode, out_dir;
  int n = -1;
  std::vector<int> n_list;
  double t_end = -1, rel_tol = -1, abs_tol = -1, delta_rho = -1;
  std::vector<double> snapshots;
  int jobs = -1;
};

void add_common_flags(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--model", f.model, "lwr | glwr:<gamma> | table:<path>");
  cmd->add_option("--datum", f.datum, "ic-paper | density CSV path");
  cmd->add_option("--mode", f.mode, "anchored | phantom");
  cmd->add_option("--n", f.n, "number of equal-mass gaps");
  cmd->add_option("--n-list", f.n_list, "gap counts for converge")
      ->delimiter(',');
  cmd->add_option("--t-end", f.t_end, "final time");
  cmd->add_option("--snapshots", f.snapshots, "snapshot times")
      ->delimiter(',');
  cmd->add_option("--rtol", f.rel_tol, "relative ODE tolerance");
  cmd->add_option("--atol", f.abs_tol, "absolute ODE tolerance");
  cmd->add_option("--delta-rho", f.delta_rho, "front-tracking fan step");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--jobs", f.jobs, "parallel jobs for converge");
}

// Config file first, then flags override.
ExperimentConfig resolve(const CliFlags& f) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in)
      throw std::runtime_error("cannot open config: " + f.config_path);
    json j;
    in >> j;
    c = ExperimentConfig::from_json(j);
  }
  if (!f.model.empty()) c.model = f.model;
  if (!f.datum.empty()) c.datum = f.datum;
  if (!f.mode.empty()) c.mode = f.mode;
  if (f.n > 0) c.n = f.n;
  if (!f.n_list.empty()) c.n_list = f.n_list;
  if (f.t_end > 0) c.t_end = f.t_end;
  if (!f.snapshots.empty()) c.snapshots = f.snapshots;
  if (f.rel_tol > 0) c.rel_tol = f.rel_tol;
  if (f.abs_tol > 0) c.abs_tol = f.abs_tol;
  if (f.delta_rho > 0) c.delta_rho = f.delta_rho;
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  if (f.jobs > 0) c.jobs = f.jobs;
  return c;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic follow-the-leader particle solver for scalar "
               "conservation laws"};
  app.require_subcommand(1);

  CliFlags f;
  auto* cmd_run = app.add_subcommand("run", "single experiment");
  add_common_flags(cmd_run, f);
  auto* cmd_conv =
      app.add_subcommand("converge", "L1 convergence study over --n-list");
  add_common_flags(cmd_conv, f);
  auto* cmd_check =
      app.add_subcommand("check", "property suite on one experiment");
  add_common_flags(cmd_check, f);

  auto* cmd_riemann =
      app.add_subcommand("riemann", "solve one Riemann problem, print JSON");
  double rho_l = 0.0, rho_r = 0.0;
  std::string riemann_model = "lwr";
  cmd_riemann->add_option("--left", rho_l, "left state")->required();
  cmd_riemann->add_option("--right", rho_r, "right state")->required();
  cmd_riemann->add_option("--model", riemann_model,
                          "lwr | glwr:<gamma> | table:<path>");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_riemann->parsed()) {
      ExperimentConfig mc;
      mc.model = riemann_model;
      const ftl::Wave w = ftl::solve_riemann(rho_l, rho_r, mc.make_model());
      json j;
      j["left"] = w.left;
      j["right"] = w.right;
      switch (w.kind) {
        case ftl::Wave::Kind::None:
          j["kind"] = "none";
          break;
        case ftl::Wave::Kind::Shock:
          j["kind"] = "shock";
          j["sigma"] = w.sigma;
          break;
        case ftl::Wave::Kind::Rarefaction:
          j["kind"] = "rarefaction";
          j["s_left"] = w.s_left;
          j["s_right"] = w.s_right;
          break;
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    const ExperimentConfig config = resolve(f);

    if (cmd_run->parsed()) {
      const ftl::RunResult result = ftl::run_experiment(config);
      std::cout << "wrote " << config.out_dir << " ("
                << result.trajectory.snapshots.size() << " snapshots, "
                << result.trajectory.stats.accepted_steps
                << " accepted steps)\n";
      return 0;
    }

    if (cmd_conv->parsed()) {
      const ftl::ConvergenceResult result = ftl::converge(config);
      std::cout << "N,l1_error,runtime_s,accepted,rejected\n";
      for (const auto& row : result.rows)
        std::cout << row.n << ',' << fmt17(row.l1_error) << ','
                  << fmt17(row.runtime_seconds) << ',' << row.accepted_steps
                  << ',' << row.rejected_steps << "\n";
      std::cout << "observed_order," << fmt17(result.observed_order) << "\n";
      return 0;
    }

    if (cmd_check->parsed()) {
      const ftl::CheckReport report = ftl::check_properties(config);
      for (const auto& c : report.checks) {
        std::cout << (c.applicable ? (c.passed ? "PASS " : "FAIL ") : "SKIP ")
                  << c.name << " (worst margin " << fmt17(c.worst_margin)
                  << (c.detail.empty() ? "" : "; " + c.detail) << ")\n";
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
