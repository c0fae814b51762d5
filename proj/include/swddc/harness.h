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

#ifndef SWDDC_HARNESS_H_
#define SWDDC_HARNESS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swddc/benchmarks.h"
#include "swddc/direct_filter.h"
#include "swddc/rng.h"
#include "swddc/samplewise_control.h"
#include "swddc/sde_core.h"
#include "swddc/types.h"

namespace swddc {

// Problem ids accepted in the "problem" key.
const std::vector<std::string>& problem_ids();

// Experiment description read from a flat "key = value" file. Lines starting
// with '#' are comments; vectors are comma separated. See configs/ for the
// full key list.
struct ExperimentConfig {
  std::string name;
  std::string problem = "lq-case1";

  double horizon = 1.0;
  int n_steps = 50;
  Vector x0;
  Vector true_param;
  // true_param switches to true_param_after at this time (negative: never)
  double switch_time = -1.0;
  Vector true_param_after;
  // observation noise standard deviation per component
  Vector obs_noise_std;
  // overrides the problem's diffusion scale when >= 0
  double diffusion = -1.0;

  std::string filter = "direct";
  int particles = 200;
  Vector prior_lower;
  Vector prior_upper;
  // isotropic jitter variance; negative selects (0.1 * prior range)^2
  double jitter_var = -1.0;
  double jitter_decay = 0.98;

  std::string solver = "samplewise";
  SgdSchedule sgd;
  SgdSchedule gd{500, 0.1, 0.0, 1, 1e6};
  double mesh_dx = 0.4;
  int mc_P = 100;
  int mc_Q = 100;
  int riccati_substeps = 10;
  // a diverged solve is retried from the warm start with rate0 / 10, at most
  // this many times
  int max_backoff = 6;

  int trials = 1;
  std::uint64_t seed = 1;
  // 0 selects the hardware concurrency
  int threads = 0;

  // key/value pairs as read, for echoing next to results
  std::map<std::string, std::string> raw;

  TemporalGrid grid() const { return TemporalGrid(horizon, n_steps); }
  Vector true_param_at(double t) const;
  Matrix obs_noise_cov() const;
  JitterSpec jitter() const;
  PriorBox prior() const;

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
  // Applies problem defaults for keys that were not set.
  void fill_defaults();
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_text(const ExperimentConfig& config);

// Model plus the oracle data the harness needs for reporting.
struct Problem {
  std::shared_ptr<const ControlledModel> model;
  std::optional<LqSpec> lq;
  std::shared_ptr<const DroneModel> drone;
};

Problem make_problem(const ExperimentConfig& config);

// x_true + Sigma^{1/2} xi.
Vector generate_observation(const Vector& x_true, const Matrix& Sigma,
                            RngStream& rng);

struct StepRecord {
  int n = 0;
  double t = 0.0;
  // estimate after assimilating M_{t_n}; prior mean at n = 0
  Vector param_estimate;
  Vector param_std;
  Vector param_true;
  // u_n; empty at n = N
  Vector control;
  // analytic control at the true state (LQ only, empty otherwise)
  Vector control_ref;
  Vector state;
  Vector observation;
  double solve_s = 0.0;
  double plant_s = 0.0;
  double filter_s = 0.0;
  double reference_s = 0.0;
  bool solver_flag = false;
  bool filter_flag = false;
};

struct RunRecord {
  int trial = 0;
  std::vector<StepRecord> steps;
  double realized_cost = 0.0;
  // drone only, NaN otherwise
  double terminal_distance = 0.0;
  double total_s = 0.0;
  bool failed = false;
  std::string error;

  double phase_sum() const;
};

// RNG roles inside one trial.
enum class StreamRole : std::uint64_t {
  kTruth = 0,
  kObservation = 1,
  kFilterInit = 2,
  kFilter = 3,
  kSolver = 4,
};
RngStream trial_stream(std::uint64_t seed, int trial, StreamRole role);

// One closed-loop run: at each step optimize the remaining controls from
// M_{t_n}, apply u_n to the hidden truth, observe, and update the filter.
RunRecord run_swddc(const ExperimentConfig& config, int trial = 0);

struct TrialSummary {
  std::vector<RunRecord> runs;
  // per step, over completed trials
  std::vector<double> param_rmse;
  std::vector<double> control_rmse;
  int completed = 0;
  double mean_terminal_distance = 0.0;
  double mean_realized_cost = 0.0;
  double mean_total_s = 0.0;
};

// Mean of param_rmse over steps [first, last].
double mean_rmse(const TrialSummary& summary, int first, int last);

TrialSummary run_trials(const ExperimentConfig& config, int n_trials);

// Per-index sqrt(mean over trials of |series - reference|^2).
// series[trial][index], reference[trial][index].
std::vector<double> rmse(const std::vector<std::vector<Vector>>& series,
                         const std::vector<std::vector<Vector>>& reference);

// Writes params.csv, controls.csv, states.csv, rmse.csv, timings.csv,
// summary.csv and config_used.cfg into dir (created if missing).
void write_outputs(const std::string& dir, const ExperimentConfig& config,
                   const TrialSummary& summary);

}  // namespace swddc

#endif  // SWDDC_HARNESS_H_
