#include "ftl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ftl {

namespace fs = std::filesystem;
using nlohmann::json;

PiecewiseConstantDensity ic_paper() {
  return PiecewiseConstantDensity({-1.0, 0.0, 1.0}, {0.4, 0.8});
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("model")) c.model = j.at("model").get<std::string>();
  if (j.contains("datum")) c.datum = j.at("datum").get<std::string>();
  if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
  if (j.contains("n")) c.n = j.at("n").get<int>();
  if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
  if (j.contains("t_end")) c.t_end = j.at("t_end").get<double>();
  if (j.contains("snapshots"))
    c.snapshots = j.at("snapshots").get<std::vector<double>>();
  if (j.contains("rel_tol")) c.rel_tol = j.at("rel_tol").get<double>();
  if (j.contains("abs_tol")) c.abs_tol = j.at("abs_tol").get<double>();
  if (j.contains("delta_rho")) c.delta_rho = j.at("delta_rho").get<double>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["model"] = model;
  j["datum"] = datum;
  j["mode"] = mode;
  j["n"] = n;
  j["n_list"] = n_list;
  j["t_end"] = t_end;
  j["snapshots"] = snapshot_times();
  j["rel_tol"] = rel_tol;
  j["abs_tol"] = abs_tol;
  j["delta_rho"] = delta_rho;
  j["out_dir"] = out_dir;
  j["jobs"] = jobs;
  return j;
}

void ExperimentConfig::validate() const {
  if (n < 3) throw std::invalid_argument("config: n must be >= 3");
  for (int m : n_list)
    if (m < 3) throw std::invalid_argument("config: n_list entries must be >= 3");
  if (!(t_end > 0.0)) throw std::invalid_argument("config: t_end must be > 0");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("config: tolerances must be > 0");
  if (!(delta_rho > 0.0))
    throw std::invalid_argument("config: delta_rho must be > 0");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  if (mode != "anchored" && mode != "phantom")
    throw std::invalid_argument("config: mode must be anchored or phantom");
  make_model();
  if (datum != "ic-paper" && !fs::exists(datum))
    throw std::invalid_argument("config: datum CSV does not exist: " + datum);
  for (double t : snapshots)
    if (t < 0.0 || t > t_end)
      throw std::invalid_argument("config: snapshot times outside [0, t_end]");
}

VelocityModel ExperimentConfig::make_model() const {
  if (model == "lwr") return VelocityModel::lwr();
  if (model.rfind("glwr:", 0) == 0) {
    const double gamma = std::stod(model.substr(5));
    return VelocityModel::generalized_lwr(1.0, gamma);
  }
  if (model.rfind("table:", 0) == 0)
    return VelocityModel::tabulated_from_csv(model.substr(6));
  throw std::invalid_argument("config: unknown model spec: " + model);
}

InitialDatum ExperimentConfig::make_datum() const {
  if (datum == "ic-paper") return InitialDatum(ic_paper());
  return InitialDatum(PiecewiseConstantDensity::from_csv(datum));
}

ParticleMode ExperimentConfig::particle_mode() const {
  return mode == "phantom" ? ParticleMode::Phantom : ParticleMode::Anchored;
}

std::vector<double> ExperimentConfig::snapshot_times() const {
  if (!snapshots.empty()) return snapshots;
  std::vector<double> ts;
  // k/20 first so the endpoint lands on t_end exactly
  for (int k = 0; k <= 20; ++k) ts.push_back(t_end * (k / 20.0));
  return ts;
}

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory CSV: " + path);
  const std::size_t n_pts = traj.snapshots.front().x.size();
  out << "t";
  for (std::size_t i = 0; i < n_pts; ++i) out << ",x_" << i;
  out << "\n";
  for (const ParticleState& s : traj.snapshots) {
    out << fmt17(s.t);
    for (double xi : s.x) out << ',' << fmt17(xi);
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::string& path, double ell,
                               ParticleMode mode) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory CSV: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trajectory CSV: " + path);
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    ParticleState s;
    s.ell = ell;
    s.mode = mode;
    bool first = true;
    while (std::getline(row, cell, ',')) {
      if (first) {
        s.t = std::stod(cell);
        first = false;
      } else {
        s.x.push_back(std::stod(cell));
      }
    }
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

RunResult run_experiment(const ExperimentConfig& config, bool write_outputs) {
  config.validate();
  const VelocityModel model = config.make_model();
  const InitialDatum datum = config.make_datum();
  const ParticleState initial =
      partition(datum, config.n, config.particle_mode());

  std::vector<double> snaps = config.snapshot_times();
  std::sort(snaps.begin(), snaps.end());

  RunResult result;
  result.trajectory = integrate(initial, model, config.t_end, config.rel_tol,
                                config.abs_tol, snaps);

  const auto report = model.validate_assumptions(datum.ess_sup, 512);

  json diag;
  diag["config"] = config.to_json();
  diag["model_assumptions"] = {{"v1_ok", report.v1_ok},
                               {"v2_ok", report.v2_ok},
                               {"worst_violation", report.worst_violation}};
  diag["total_mass"] = datum.total_mass;
  diag["rho_sup"] = datum.ess_sup;
  if (config.datum == "ic-paper" && config.model == "lwr") {
    diag["notes"] = json::array(
        {"velocity law for the reproduction runs assumed to be v(rho) = "
         "1 - rho; the reference experiments do not name it explicitly"});
  }

  json per_snapshot = json::array();
  const PiecewiseConstantDensity rho0 =
      reconstruct(result.trajectory.snapshots.front());
  for (const ParticleState& s : result.trajectory.snapshots) {
    const PiecewiseConstantDensity d = reconstruct(s);
    const OleinikDiagnostic ol = oleinik(s, model);
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
      min_gap = std::min(min_gap, s.x[i + 1] - s.x[i]);
    per_snapshot.push_back({{"t", s.t},
                            {"tv", total_variation(d, true)},
                            {"max_z", ol.max_z},
                            {"min_gap", min_gap},
                            {"w1_from_initial", wasserstein1(d, rho0)}});
  }
  diag["snapshots"] = per_snapshot;
  diag["stats"] = {{"accepted_steps", result.trajectory.stats.accepted_steps},
                   {"rejected_steps", result.trajectory.stats.rejected_steps},
                   {"min_gap_seen", result.trajectory.stats.min_gap_seen}};

  // entropy residuals are advisory; only computable with dense snapshots
  json entropy = json::array();
  const double sup_lo = datum.density.support_min();
  const double sup_hi = datum.density.support_max();
  const BumpTestFunction bump{0.5 * config.t_end, 0.3 * config.t_end,
                              0.5 * (sup_lo + sup_hi),
                              0.5 * (sup_hi - sup_lo)};
  for (double k : {0.0, 0.5 * datum.ess_sup}) {
    try {
      const EntropyResidualReport rep =
          entropy_residual(result.trajectory, model, k, bump);
      entropy.push_back({{"k", rep.k},
                         {"phi", rep.testfn},
                         {"value", rep.value},
                         {"tol", rep.tol}});
    } catch (const std::invalid_argument&) {
      // snapshots too sparse for this bump; skip
      break;
    }
  }
  diag["entropy_residuals"] = entropy;
  result.diagnostics = diag;

  if (write_outputs) {
    fs::create_directories(config.out_dir);
    write_trajectory_csv(result.trajectory,
                         (fs::path(config.out_dir) / "trajectory.csv").string());
    for (std::size_t si = 0; si < result.trajectory.snapshots.size(); ++si) {
      char name[64];
      std::snprintf(name, sizeof(name), "density_%04zu.csv", si);
      reconstruct(result.trajectory.snapshots[si])
          .to_csv((fs::path(config.out_dir) / name).string());
    }
    std::ofstream out(fs::path(config.out_dir) / "diagnostics.json");
    out << diag.dump(2) << "\n";
  }
  return result;
}

double observed_order(const std::vector<ConvergenceRow>& rows) {
  // least-squares slope of log(error) vs log(N), sign-flipped
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(rows.size());
  for (const ConvergenceRow& r : rows) {
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(r.l1_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ConvergenceResult converge(const ExperimentConfig& config) {
  config.validate();
  if (config.n_list.size() < 2)
    throw std::invalid_argument("converge needs an n_list with >= 2 entries");
  const VelocityModel model = config.make_model();
  const InitialDatum datum = config.make_datum();

  const FrontTracker reference(datum.density, model, config.t_end,
                               config.delta_rho);
  const PiecewiseConstantDensity exact =
      reference.sample_density(config.t_end);

  ConvergenceResult result;
  result.rows.resize(config.n_list.size());

  auto run_one = [&](std::size_t idx) {
    const int n = config.n_list[idx];
    const auto start = std::chrono::steady_clock::now();
    const ParticleState initial =
        partition(datum, n, config.particle_mode());
    const Trajectory traj =
        integrate(initial, model, config.t_end, config.rel_tol,
                  config.abs_tol, {config.t_end});
    const PiecewiseConstantDensity approx =
        reconstruct(traj.snapshots.back());
    ConvergenceRow row;
    row.n = n;
    row.l1_error =
        l1_error(approx, exact, result.window_lo, result.window_hi);
    row.accepted_steps = traj.stats.accepted_steps;
    row.rejected_steps = traj.stats.rejected_steps;
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.rows[idx] = row;
  };

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < result.rows.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t i = static_cast<std::size_t>(w);
             i < result.rows.size(); i += static_cast<std::size_t>(jobs))
          run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  result.observed_order = observed_order(result.rows);
  return result;
}

bool CheckReport::all_passed() const {
  for (const PropertyCheck& c : checks)
    if (c.applicable && !c.passed) return false;
  return true;
}

json CheckReport::to_json() const {
  json arr = json::array();
  for (const PropertyCheck& c : checks)
    arr.push_back({{"name", c.name},
                   {"applicable", c.applicable},
                   {"passed", c.passed},
                   {"worst_margin", c.worst_margin},
                   {"detail", c.detail}});
  return {{"checks", arr}, {"all_passed", all_passed()}};
}

CheckReport check_trajectory(const Trajectory& traj,
                             const VelocityModel& model, double total_mass,
                             double rho_sup) {
  CheckReport report;

  // structural integrity first; everything else assumes valid states
  {
    PropertyCheck c{"integrity", true, true, 0.0, ""};
    try {
      if (traj.snapshots.empty())
        throw std::runtime_error("trajectory has no snapshots");
      double t_prev = -std::numeric_limits<double>::infinity();
      for (const ParticleState& s : traj.snapshots) {
        s.validate();
        if (!(s.t > t_prev))
          throw std::runtime_error("snapshot times not strictly increasing");
        t_prev = s.t;
        const double mass = reconstruct(s).mass();
        const double expected = s.ell * static_cast<double>(s.gap_count());
        if (std::abs(mass - expected) > 1e-13 * expected)
          throw std::runtime_error("reconstructed mass drifted");
      }
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    report.checks.push_back(c);
    if (!c.passed) return report;
  }

  const double ell = traj.snapshots.front().ell;
  const AssumptionReport assumptions =
      model.validate_assumptions(rho_sup, 512);

  // discrete maximum principle: gaps never drop below ell/R
  {
    PropertyCheck c{"max_principle", true, true, 0.0, ""};
    const double floor = ell / rho_sup * (1.0 - 1e-9);
    double worst = std::numeric_limits<double>::infinity();
    for (const ParticleState& s : traj.snapshots)
      for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
        worst = std::min(worst, (s.x[i + 1] - s.x[i]) - floor);
    c.worst_margin = worst;
    c.passed = worst >= 0.0;
    report.checks.push_back(c);
  }

  // BV contraction: boundary-inclusive TV non-increasing
  {
    PropertyCheck c{"tv_contraction", true, true, 0.0, ""};
    double prev = std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const ParticleState& s : traj.snapshots) {
      const double tv = total_variation(reconstruct(s), true);
      worst = std::min(worst, prev - tv + 1e-8);
      prev = tv;
    }
    c.worst_margin = worst;
    c.passed = worst >= 0.0;
    report.checks.push_back(c);
  }

  // Oleinik bound, only under (V2)
  {
    PropertyCheck c{"oleinik", assumptions.v2_ok, false, 0.0, ""};
    if (!assumptions.v2_ok) {
      c.detail = "not applicable (V2 unverified)";
    } else {
      double worst = std::numeric_limits<double>::infinity();
      for (const ParticleState& s : traj.snapshots) {
        if (!(s.t > 0.0)) continue;
        const OleinikDiagnostic ol = oleinik(s, model);
        worst = std::min(worst, ell * (1.0 + 1e-6) - ol.max_z);
      }
      c.worst_margin = worst;
      c.passed = worst >= 0.0;
    }
    report.checks.push_back(c);
  }

  // local BV of v(rho) on a fixed window for t >= delta
  {
    PropertyCheck c{"local_bv", assumptions.v2_ok, false, 0.0, ""};
    if (!assumptions.v2_ok) {
      c.detail = "not applicable (V2 unverified)";
    } else {
      const double t_last = traj.snapshots.back().t;
      const double delta = std::max(1e-12, t_last / 10.0);
      const double a = traj.snapshots.front().x.front();
      const double b = traj.snapshots.front().x.back();
      const double bound =
          2.0 * (model.v_max() - model.v(rho_sup) + (b - a) / delta) + 1e-6;
      double worst = std::numeric_limits<double>::infinity();
      bool outside = false;
      for (const ParticleState& s : traj.snapshots) {
        if (s.t < delta) continue;
        if (a < s.x.front() || b > s.x.back()) outside = true;
        worst = std::min(
            worst, bound - local_tv_of_velocity(reconstruct(s), model, a, b));
      }
      c.worst_margin = worst;
      c.passed = worst >= 0.0;
      if (outside)
        c.detail = "window extends beyond the particle support at some times";
    }
    report.checks.push_back(c);
  }

  // W1 time continuity on random snapshot pairs
  {
    PropertyCheck c{"w1_time_continuity", true, true, 0.0, ""};
    const double v_at_r = model.v(rho_sup);
    const double lip = (std::max(model.v_max(), std::abs(v_at_r)) +
                        2.0 * (model.v_max() - v_at_r)) *
                       total_mass;
    std::mt19937 rng(20160317u);
    std::uniform_int_distribution<std::size_t> pick(
        0, traj.snapshots.size() - 1);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
      std::size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      const double w1 = wasserstein1(reconstruct(traj.snapshots[i]),
                                     reconstruct(traj.snapshots[j]));
      const double dt = std::abs(traj.snapshots[i].t - traj.snapshots[j].t);
      worst = std::min(worst, lip * dt * (1.0 + 1e-6) - w1);
    }
    c.worst_margin = worst;
    c.passed = worst >= 0.0;
    report.checks.push_back(c);
  }

  return report;
}

CheckReport check_properties(const ExperimentConfig& config) {
  const RunResult run = run_experiment(config, false);
  const InitialDatum datum = config.make_datum();
  return check_trajectory(run.trajectory, config.make_model(),
                          datum.total_mass, datum.ess_sup);
}

}  // namespace ftl
