#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftl/dynamics.hpp"
#include "ftl/metrics.hpp"
#include "ftl/particles.hpp"
#include "ftl/reference.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

struct ExperimentConfig {
  std::string model = "lwr";        // lwr | glwr:<gamma> | table:<path>
  std::string datum = "ic-paper";   // ic-paper | <csv path>
  std::string mode = "anchored";    // anchored | phantom
  int n = 200;
  std::vector<int> n_list;
  double t_end = 0.5;
  std::vector<double> snapshots;    // defaults to 21 uniform times
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double delta_rho = 1e-3;
  std::string out_dir = "out";
  int jobs = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // fully resolved, including defaults
  void validate() const;

  VelocityModel make_model() const;
  InitialDatum make_datum() const;
  ParticleMode particle_mode() const;
  std::vector<double> snapshot_times() const;
};

/// The two-plateau initial profile used throughout the experiments:
/// 0.4 on [-1, 0], 0.8 on (0, 1], zero elsewhere (total mass 1.2).
PiecewiseConstantDensity ic_paper();

struct RunResult {
  Trajectory trajectory;
  nlohmann::json diagnostics;
};

/// Single experiment: integrate, write trajectory CSV, per-snapshot
/// density CSVs and the diagnostics JSON into config.out_dir.
RunResult run_experiment(const ExperimentConfig& config,
                         bool write_outputs = true);

struct ConvergenceRow {
  int n = 0;
  double l1_error = 0.0;
  double runtime_seconds = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double observed_order = 0.0;
  // error window used for the L1 integrals
  double window_lo = -2.0;
  double window_hi = 2.0;
};

/// L1 errors against the front-tracking reference for each N in
/// config.n_list; rows computed independently (config.jobs threads),
/// output order fixed by the N-list.
ConvergenceResult converge(const ExperimentConfig& config);

/// Least-squares slope of log(error) against log(N), negated so that a
/// first-order scheme reports 1.
double observed_order(const std::vector<ConvergenceRow>& rows);

struct PropertyCheck {
  std::string name;
  bool applicable = true;
  bool passed = false;
  double worst_margin = 0.0;  // most negative slack observed
  std::string detail;
};

struct CheckReport {
  std::vector<PropertyCheck> checks;
  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Runs the trajectory of `config` and asserts the scheme's structural
/// properties on it: maximum principle, TV contraction, the Oleinik
/// bound (when V2 validates), local BV of v(rho), and W1 time
/// continuity.
CheckReport check_properties(const ExperimentConfig& config);

/// Same property suite on an already-computed trajectory (e.g. one read
/// back from a trajectory CSV).
CheckReport check_trajectory(const Trajectory& traj,
                             const VelocityModel& model, double total_mass,
                             double rho_sup);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path, double ell,
                               ParticleMode mode);

}  // namespace ftl
