// Copyright 2026 The swddc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swddc/harness.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "swddc/baseline_filters.h"
#include "swddc/fullgrid_control.h"

namespace swddc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// The configured filter behind one interface.
class FilterState {
 public:
  FilterState(const ExperimentConfig& c, const Vector& M0, RngStream& init_rng)
      : kind_(c.filter), jitter_(c.jitter()), sigma_(c.obs_noise_cov()) {
    if (kind_ == "direct") {
      cloud_ = sample_prior(c.prior(), c.particles, init_rng);
    } else if (kind_ == "augpf") {
      aug_ = init_augmented_cloud(M0, sigma_, c.prior(), c.particles, init_rng);
    } else {
      ens_ = init_ensemble(M0, sigma_, c.prior(), c.particles, init_rng);
    }
  }

  // Parameter samples handed to the control solver.
  ParticleCloud parameter_cloud() const {
    if (kind_ == "direct") return cloud_;
    const auto& s = kind_ == "augpf" ? aug_.particles : ens_.members;
    const int d = kind_ == "augpf" ? aug_.dim_state : ens_.dim_state;
    std::vector<Vector> p;
    p.reserve(s.size());
    for (const auto& v : s) p.push_back(v.tail(v.size() - d));
    return ParticleCloud(std::move(p));
  }

  Vector estimate() const {
    if (kind_ == "direct") return posterior_mean(cloud_);
    return kind_ == "augpf" ? parameter_mean(aug_) : parameter_mean(ens_);
  }

  Vector spread() const {
    if (kind_ == "direct") return posterior_std(cloud_);
    return kind_ == "augpf" ? parameter_std(aug_) : parameter_std(ens_);
  }

  // Returns true when the step needed a fallback or regularization.
  bool step(const ControlledModel& model, double t_n, const Vector& x_est,
            const Vector& u_n, const Vector& M_next, int n, double dt,
            RngStream& rng) {
    if (kind_ == "direct") {
      auto r = df_step(cloud_, model, t_n, x_est, u_n, M_next, sigma_, jitter_,
                       n, dt, rng);
      cloud_ = std::move(r.cloud);
      return r.degenerate;
    }
    if (kind_ == "augpf") {
      auto r = augpf_step(aug_, model, t_n, u_n, M_next, sigma_, jitter_, n, dt,
                          rng);
      aug_ = std::move(r.cloud);
      return r.degenerate;
    }
    auto r = augenkf_step(ens_, model, t_n, u_n, M_next, sigma_, jitter_, n, dt,
                          rng);
    ens_ = std::move(r.ensemble);
    return r.regularized;
  }

 private:
  std::string kind_;
  JitterSpec jitter_;
  Matrix sigma_;
  ParticleCloud cloud_;
  AugmentedCloud aug_;
  Ensemble ens_;
};

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

Vector generate_observation(const Vector& x_true, const Matrix& Sigma,
                            RngStream& rng) {
  require(Sigma.rows() == x_true.size() && Sigma.cols() == x_true.size(),
          "generate_observation: Sigma dimension mismatch");
  return x_true + psd_sqrt(Sigma) * rng.normal_vector(x_true.size());
}

RngStream trial_stream(std::uint64_t seed, int trial, StreamRole role) {
  return RngStream(seed, static_cast<std::uint64_t>(trial) * 16 +
                             static_cast<std::uint64_t>(role));
}

double RunRecord::phase_sum() const {
  double s = 0.0;
  for (const auto& r : steps) {
    s += r.solve_s + r.plant_s + r.filter_s + r.reference_s;
  }
  return s;
}

RunRecord run_swddc(const ExperimentConfig& config, int trial) {
  const auto run_start = Clock::now();
  config.validate();
  const Problem problem = make_problem(config);
  const ControlledModel& model = *problem.model;
  const TemporalGrid grid = config.grid();
  const int N = grid.n_steps();
  const double dt = grid.dt();
  const Matrix Sigma = config.obs_noise_cov();

  RngStream truth_rng = trial_stream(config.seed, trial, StreamRole::kTruth);
  RngStream obs_rng = trial_stream(config.seed, trial, StreamRole::kObservation);
  RngStream init_rng = trial_stream(config.seed, trial, StreamRole::kFilterInit);
  RngStream filter_rng = trial_stream(config.seed, trial, StreamRole::kFilter);
  RngStream solver_rng = trial_stream(config.seed, trial, StreamRole::kSolver);

  RunRecord record;
  record.trial = trial;
  record.steps.resize(N + 1);

  // analytic references for the parameter before and after a switch
  auto t_ref = Clock::now();
  std::optional<RiccatiSolution> ric_before;
  std::optional<RiccatiSolution> ric_after;
  if (problem.lq) {
    ric_before = riccati_solve(*problem.lq, config.true_param, grid,
                               config.riccati_substeps);
    ric_after = riccati_solve(*problem.lq, config.true_param_after, grid,
                              config.riccati_substeps);
  }
  record.steps[0].reference_s = seconds_since(t_ref);

  Vector x = config.x0;
  Vector M = generate_observation(x, Sigma, obs_rng);
  FilterState filter(config, M, init_rng);
  ControlTrajectory control =
      constant_control(0, N, Vector::Zero(model.dim_control()));

  for (int n = 0; n <= N; ++n) {
    StepRecord& rec = record.steps[n];
    rec.n = n;
    rec.t = grid.time(n);
    rec.param_estimate = filter.estimate();
    rec.param_std = filter.spread();
    rec.param_true = config.true_param_at(rec.t);
    rec.state = x;
    rec.observation = M;
    if (n == N) break;

    auto t0 = Clock::now();
    if (config.solver == "samplewise") {
      const ParticleCloud cloud = filter.parameter_cloud();
      SgdSchedule schedule = config.sgd;
      for (int attempt = 0;; ++attempt) {
        const auto r = sgd_optimize(model, grid, n, M, cloud, control,
                                    schedule, solver_rng);
        if (!r.diverged) {
          control = r.control;
          break;
        }
        rec.solver_flag = true;
        if (attempt == config.max_backoff) {
          // keep the warm start, which is known to be finite
          control = ControlTrajectory(
              n, std::vector<Vector>(control.values.begin() +
                                         (n - control.start_index),
                                     control.values.end()));
          break;
        }
        schedule.rate0 *= 0.1;
      }
    } else {
      const StateMesh mesh =
          StateMesh::auto_sized(model, grid, n, M, control, rec.param_estimate,
                                config.mesh_dx, solver_rng);
      SgdSchedule schedule = config.gd;
      for (int attempt = 0;; ++attempt) {
        const auto r = gd_optimize(model, mesh, grid, n, M, rec.param_estimate,
                                   control, schedule, config.mc_P, config.mc_Q,
                                   solver_rng);
        if (!r.diverged) {
          control = r.control;
          break;
        }
        rec.solver_flag = true;
        if (attempt == config.max_backoff) {
          control = ControlTrajectory(
              n, std::vector<Vector>(control.values.begin() +
                                         (n - control.start_index),
                                     control.values.end()));
          break;
        }
        schedule.rate0 *= 0.1;
      }
    }
    rec.control = control.at(n);
    rec.solve_s = seconds_since(t0);

    t0 = Clock::now();
    if (problem.lq) {
      const bool after = config.switch_time >= 0 &&
                         rec.t >= config.switch_time - 1e-9;
      rec.control_ref = lq_analytic_control(after ? *ric_after : *ric_before,
                                            *problem.lq, n, x);
    }
    rec.reference_s += seconds_since(t0);

    t0 = Clock::now();
    record.realized_cost += model.run_cost(rec.t, x, rec.control) * dt;
    const Vector dW = brownian_increments(truth_rng, model.dim_state(), dt);
    const Vector x_next =
        euler_step(model, rec.t, x, rec.control, rec.param_true, dW, dt);
    const Vector M_next = generate_observation(x_next, Sigma, obs_rng);
    rec.plant_s = seconds_since(t0);

    t0 = Clock::now();
    rec.filter_flag =
        filter.step(model, rec.t, M, rec.control, M_next, n, dt, filter_rng);
    rec.filter_s = seconds_since(t0);

    x = x_next;
    M = M_next;
  }
  record.realized_cost += model.term_cost(x);
  record.terminal_distance = problem.drone
                                 ? problem.drone->terminal_distance(x)
                                 : std::numeric_limits<double>::quiet_NaN();
  record.total_s = seconds_since(run_start);
  return record;
}

std::vector<double> rmse(const std::vector<std::vector<Vector>>& series,
                         const std::vector<std::vector<Vector>>& reference) {
  require(series.size() == reference.size() && !series.empty(),
          "rmse: trial count mismatch");
  const size_t len = series[0].size();
  std::vector<double> out(len, 0.0);
  for (size_t i = 0; i < series.size(); ++i) {
    require(series[i].size() == len && reference[i].size() == len,
            "rmse: series length mismatch");
    for (size_t k = 0; k < len; ++k) {
      require(series[i][k].size() == reference[i][k].size(),
              "rmse: vector size mismatch");
      out[k] += (series[i][k] - reference[i][k]).squaredNorm();
    }
  }
  for (double& v : out) v = std::sqrt(v / series.size());
  return out;
}

double mean_rmse(const TrialSummary& summary, int first, int last) {
  require(first >= 0 && last < static_cast<int>(summary.param_rmse.size()) &&
              first <= last,
          "mean_rmse: step range outside the run");
  double s = 0.0;
  for (int k = first; k <= last; ++k) s += summary.param_rmse[k];
  return s / (last - first + 1);
}

TrialSummary run_trials(const ExperimentConfig& config, int n_trials) {
  require(n_trials >= 1, "run_trials: need at least one trial");
  config.validate();
  TrialSummary summary;
  summary.runs.resize(n_trials);

  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n_trials));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n_trials; i = next++) {
      try {
        summary.runs[i] = run_swddc(config, i);
      } catch (const std::exception& e) {
        summary.runs[i].trial = i;
        summary.runs[i].failed = true;
        summary.runs[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<std::vector<Vector>> est, truth, ctl, ref;
  double dist = 0.0;
  double cost = 0.0;
  double total = 0.0;
  for (const auto& r : summary.runs) {
    if (r.failed) continue;
    ++summary.completed;
    std::vector<Vector> e, t, c, cr;
    for (const auto& s : r.steps) {
      e.push_back(s.param_estimate);
      t.push_back(s.param_true);
      if (s.control.size() && s.control_ref.size()) {
        c.push_back(s.control);
        cr.push_back(s.control_ref);
      }
    }
    est.push_back(e);
    truth.push_back(t);
    if (!c.empty()) {
      ctl.push_back(c);
      ref.push_back(cr);
    }
    dist += r.terminal_distance;
    cost += r.realized_cost;
    total += r.total_s;
  }
  if (summary.completed > 0) {
    summary.param_rmse = rmse(est, truth);
    if (!ctl.empty()) summary.control_rmse = rmse(ctl, ref);
    summary.mean_terminal_distance = dist / summary.completed;
    summary.mean_realized_cost = cost / summary.completed;
    summary.mean_total_s = total / summary.completed;
  }
  return summary;
}

void write_outputs(const std::string& dir, const ExperimentConfig& config,
                   const TrialSummary& summary) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);

  auto params = open_csv(root / "params.csv");
  params << "trial,step,t,param_index,estimate,std,truth\n";
  auto controls = open_csv(root / "controls.csv");
  controls << "trial,step,t,control_index,applied,analytic\n";
  auto states = open_csv(root / "states.csv");
  states << "trial,step,t,component,state,observation\n";
  auto timings = open_csv(root / "timings.csv");
  timings << "trial,solve_s,plant_s,filter_s,reference_s,total_s\n";

  for (const auto& r : summary.runs) {
    if (r.failed) continue;
    double solve = 0, plant = 0, filt = 0, refer = 0;
    for (const auto& s : r.steps) {
      const std::string head = std::to_string(r.trial) + "," +
                               std::to_string(s.n) + "," + csv_number(s.t) +
                               ",";
      for (int i = 0; i < s.param_estimate.size(); ++i) {
        params << head << i << "," << csv_number(s.param_estimate[i]) << ","
               << csv_number(s.param_std[i]) << ","
               << csv_number(s.param_true[i]) << "\n";
      }
      for (int i = 0; i < s.control.size(); ++i) {
        controls << head << i << "," << csv_number(s.control[i]) << ","
                 << (s.control_ref.size() ? csv_number(s.control_ref[i]) : "")
                 << "\n";
      }
      for (int i = 0; i < s.state.size(); ++i) {
        states << head << i << "," << csv_number(s.state[i]) << ","
               << csv_number(s.observation[i]) << "\n";
      }
      solve += s.solve_s;
      plant += s.plant_s;
      filt += s.filter_s;
      refer += s.reference_s;
    }
    timings << r.trial << "," << csv_number(solve) << "," << csv_number(plant)
            << "," << csv_number(filt) << "," << csv_number(refer) << ","
            << csv_number(r.total_s) << "\n";
  }

  auto rm = open_csv(root / "rmse.csv");
  rm << "step,t,param_rmse,control_rmse\n";
  const double dt = config.grid().dt();
  for (size_t k = 0; k < summary.param_rmse.size(); ++k) {
    rm << k << "," << csv_number(k * dt) << ","
       << csv_number(summary.param_rmse[k]) << ","
       << (k < summary.control_rmse.size() ? csv_number(summary.control_rmse[k])
                                           : "")
       << "\n";
  }

  auto sm = open_csv(root / "summary.csv");
  sm << "key,value\n";
  sm << "experiment," << config.name << "\n";
  sm << "problem," << config.problem << "\n";
  sm << "filter," << config.filter << "\n";
  sm << "solver," << config.solver << "\n";
  sm << "particles," << config.particles << "\n";
  sm << "trials," << summary.runs.size() << "\n";
  sm << "completed," << summary.completed << "\n";
  double mean_param = 0.0;
  for (double v : summary.param_rmse) mean_param += v;
  if (!summary.param_rmse.empty()) mean_param /= summary.param_rmse.size();
  sm << "mean_param_rmse," << csv_number(mean_param) << "\n";
  sm << "mean_realized_cost," << csv_number(summary.mean_realized_cost) << "\n";
  if (config.problem == "drone") {
    sm << "mean_terminal_distance,"
       << csv_number(summary.mean_terminal_distance) << "\n";
  }
  for (const auto& r : summary.runs) {
    if (r.failed) sm << "trial_" << r.trial << "_error," << r.error << "\n";
  }

  std::ofstream echo(root / "config_used.cfg");
  echo << config_to_text(config);
}

}  // namespace swddc
