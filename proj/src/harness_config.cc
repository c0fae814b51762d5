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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "swddc/harness.h"

namespace swddc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': not a number: " + v);
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) {
    throw std::invalid_argument("config key '" + key +
                                "': not an integer: " + v);
  }
  return static_cast<long long>(x);
}

Vector to_vector(const std::string& key, const std::string& v) {
  std::vector<double> xs;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) xs.push_back(to_double(key, trim(item)));
  Vector out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out[i] = xs[i];
  return out;
}

std::string vector_text(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

using Setter = std::function<void(ExperimentConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](auto& c, auto&, auto& v) { c.name = v; }},
      {"problem", [](auto& c, auto&, auto& v) { c.problem = v; }},
      {"horizon", [](auto& c, auto& k, auto& v) { c.horizon = to_double(k, v); }},
      {"n_steps",
       [](auto& c, auto& k, auto& v) { c.n_steps = static_cast<int>(to_int(k, v)); }},
      {"x0", [](auto& c, auto& k, auto& v) { c.x0 = to_vector(k, v); }},
      {"true_param",
       [](auto& c, auto& k, auto& v) { c.true_param = to_vector(k, v); }},
      {"switch_time",
       [](auto& c, auto& k, auto& v) { c.switch_time = to_double(k, v); }},
      {"true_param_after",
       [](auto& c, auto& k, auto& v) { c.true_param_after = to_vector(k, v); }},
      {"obs_noise_std",
       [](auto& c, auto& k, auto& v) { c.obs_noise_std = to_vector(k, v); }},
      {"diffusion",
       [](auto& c, auto& k, auto& v) { c.diffusion = to_double(k, v); }},
      {"filter", [](auto& c, auto&, auto& v) { c.filter = v; }},
      {"particles",
       [](auto& c, auto& k, auto& v) { c.particles = static_cast<int>(to_int(k, v)); }},
      {"prior_lower",
       [](auto& c, auto& k, auto& v) { c.prior_lower = to_vector(k, v); }},
      {"prior_upper",
       [](auto& c, auto& k, auto& v) { c.prior_upper = to_vector(k, v); }},
      {"jitter_var",
       [](auto& c, auto& k, auto& v) { c.jitter_var = to_double(k, v); }},
      {"jitter_decay",
       [](auto& c, auto& k, auto& v) { c.jitter_decay = to_double(k, v); }},
      {"solver", [](auto& c, auto&, auto& v) { c.solver = v; }},
      {"sgd_iterations",
       [](auto& c, auto& k, auto& v) {
         c.sgd.n_iterations = static_cast<int>(to_int(k, v));
       }},
      {"sgd_rate0", [](auto& c, auto& k, auto& v) { c.sgd.rate0 = to_double(k, v); }},
      {"sgd_decay_iterations",
       [](auto& c, auto& k, auto& v) { c.sgd.decay_iterations = to_double(k, v); }},
      {"sgd_batch",
       [](auto& c, auto& k, auto& v) {
         c.sgd.batch_size = static_cast<int>(to_int(k, v));
       }},
      {"gd_iterations",
       [](auto& c, auto& k, auto& v) {
         c.gd.n_iterations = static_cast<int>(to_int(k, v));
       }},
      {"gd_rate0", [](auto& c, auto& k, auto& v) { c.gd.rate0 = to_double(k, v); }},
      {"gd_decay_iterations",
       [](auto& c, auto& k, auto& v) { c.gd.decay_iterations = to_double(k, v); }},
      {"mesh_dx", [](auto& c, auto& k, auto& v) { c.mesh_dx = to_double(k, v); }},
      {"mc_P", [](auto& c, auto& k, auto& v) { c.mc_P = static_cast<int>(to_int(k, v)); }},
      {"mc_Q", [](auto& c, auto& k, auto& v) { c.mc_Q = static_cast<int>(to_int(k, v)); }},
      {"riccati_substeps",
       [](auto& c, auto& k, auto& v) {
         c.riccati_substeps = static_cast<int>(to_int(k, v));
       }},
      {"max_backoff",
       [](auto& c, auto& k, auto& v) {
         c.max_backoff = static_cast<int>(to_int(k, v));
       }},
      {"trials",
       [](auto& c, auto& k, auto& v) { c.trials = static_cast<int>(to_int(k, v)); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         const long long s = to_int(k, v);
         if (s < 0) throw std::invalid_argument("config key 'seed': negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"threads",
       [](auto& c, auto& k, auto& v) { c.threads = static_cast<int>(to_int(k, v)); }},
  };
  return table;
}

Vector constant(int n, double v) { return Vector::Constant(n, v); }

Vector values(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

const std::vector<std::string>& problem_ids() {
  static const std::vector<std::string> ids = {
      "lq-case1", "lq-case1-exp2", "lq-case2", "lq-case3", "drone"};
  return ids;
}

Vector ExperimentConfig::true_param_at(double t) const {
  if (switch_time >= 0 && t >= switch_time - 1e-9) return true_param_after;
  return true_param;
}

Matrix ExperimentConfig::obs_noise_cov() const {
  return obs_noise_std.cwiseAbs2().asDiagonal();
}

JitterSpec ExperimentConfig::jitter() const {
  if (jitter_var < 0) {
    JitterSpec j = JitterSpec::from_prior(prior());
    j.decay_factor = jitter_decay;
    return j;
  }
  return JitterSpec::isotropic(prior_lower.size(), jitter_var, jitter_decay);
}

PriorBox ExperimentConfig::prior() const { return {prior_lower, prior_upper}; }

void ExperimentConfig::fill_defaults() {
  const bool drone = problem == "drone";
  int d = 1;
  int q = 1;
  if (problem == "lq-case2") d = 2;
  if (problem == "lq-case3") {
    d = 4;
    q = 2;
  }
  if (drone) d = 4;

  if (problem == "lq-case1-exp2" && !raw.count("n_steps")) n_steps = 20;
  if (problem == "lq-case3" && !raw.count("n_steps")) n_steps = 40;
  if (x0.size() == 0) {
    if (problem == "lq-case2") x0 = values({2, -2});
    else if (problem == "lq-case3") x0 = values({1, 2, -1, 2});
    else if (drone) x0 = values({0, 0, 5, 0});
    else x0 = values({2});
  }
  if (true_param.size() == 0) {
    true_param = problem == "lq-case3" ? values({1, 2}) : constant(q, 1.0);
  }
  if (true_param_after.size() == 0) true_param_after = true_param;
  if (obs_noise_std.size() == 0) {
    if (drone) obs_noise_std = values({0.01, 0.01, 0.01, 0.001});
    else if (problem == "lq-case1" || problem == "lq-case1-exp2")
      obs_noise_std = constant(d, 0.001);
    else obs_noise_std = constant(d, 0.01);
  }
  if (prior_lower.size() == 0) prior_lower = constant(q, drone ? 0.1 : -2.0);
  if (prior_upper.size() == 0) prior_upper = constant(q, drone ? 5.0 : 8.0);
}

void ExperimentConfig::validate() const {
  const auto& ids = problem_ids();
  require(std::find(ids.begin(), ids.end(), problem) != ids.end(),
          "config key 'problem': unknown problem id '" + problem + "'");
  require(horizon > 0, "config key 'horizon': must be positive");
  require(n_steps >= 1, "config key 'n_steps': must be >= 1");
  const Problem p = make_problem(*this);
  const int d = p.model->dim_state();
  const int q = p.model->dim_param();
  require(x0.size() == d, "config key 'x0': expected " + std::to_string(d) +
                              " components");
  require(true_param.size() == q, "config key 'true_param': expected " +
                                      std::to_string(q) + " components");
  require(true_param_after.size() == q,
          "config key 'true_param_after': expected " + std::to_string(q) +
              " components");
  require(obs_noise_std.size() == d,
          "config key 'obs_noise_std': expected " + std::to_string(d) +
              " components");
  require((obs_noise_std.array() >= 0).all(),
          "config key 'obs_noise_std': must be nonnegative");
  require(prior_lower.size() == q && prior_upper.size() == q,
          "config keys 'prior_lower'/'prior_upper': expected " +
              std::to_string(q) + " components");
  require((prior_upper.array() >= prior_lower.array()).all(),
          "config key 'prior_upper': below prior_lower");
  if (switch_time >= 0) {
    const double k = switch_time / grid().dt();
    require(std::abs(k - std::round(k)) < 1e-9 && switch_time <= horizon,
            "config key 'switch_time': must lie on a grid point");
  }
  require(filter == "direct" || filter == "augpf" || filter == "augenkf",
          "config key 'filter': expected direct, augpf or augenkf");
  require(particles >= 1, "config key 'particles': must be positive");
  require(filter != "augenkf" || particles >= 2,
          "config key 'particles': the ensemble needs at least 2 members");
  require(filter == "direct" || (obs_noise_std.array() > 0).all(),
          "config key 'obs_noise_std': augmented filters need positive noise");
  require(jitter_decay > 0 && jitter_decay <= 1,
          "config key 'jitter_decay': must lie in (0, 1]");
  require(solver == "samplewise" || solver == "fullgrid",
          "config key 'solver': expected samplewise or fullgrid");
  require(solver != "fullgrid" || d <= 2,
          "config key 'solver': fullgrid supports state dimension <= 2");
  sgd.validate();
  gd.validate();
  require(mesh_dx > 0, "config key 'mesh_dx': must be positive");
  require(mc_P >= 1, "config key 'mc_P': must be positive");
  require(mc_Q >= 1, "config key 'mc_Q': must be positive");
  require(riccati_substeps >= 1, "config key 'riccati_substeps': must be >= 1");
  require(max_backoff >= 0, "config key 'max_backoff': must be >= 0");
  require(trials >= 1, "config key 'trials': must be positive");
  require(threads >= 0, "config key 'threads': must be nonnegative");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
    if (c.raw.count(key)) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    }
    it->second(c, key, value);
    c.raw[key] = value;
  }
  c.fill_defaults();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config_text(ss.str());
  if (c.name.empty()) {
    auto base = path.substr(path.find_last_of('/') + 1);
    c.name = base.substr(0, base.find_last_of('.'));
  }
  return c;
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "name = " << c.name << "\n"
     << "problem = " << c.problem << "\n"
     << "horizon = " << c.horizon << "\n"
     << "n_steps = " << c.n_steps << "\n"
     << "x0 = " << vector_text(c.x0) << "\n"
     << "true_param = " << vector_text(c.true_param) << "\n"
     << "switch_time = " << c.switch_time << "\n"
     << "true_param_after = " << vector_text(c.true_param_after) << "\n"
     << "obs_noise_std = " << vector_text(c.obs_noise_std) << "\n"
     << "diffusion = " << c.diffusion << "\n"
     << "filter = " << c.filter << "\n"
     << "particles = " << c.particles << "\n"
     << "prior_lower = " << vector_text(c.prior_lower) << "\n"
     << "prior_upper = " << vector_text(c.prior_upper) << "\n"
     << "jitter_var = " << c.jitter_var << "\n"
     << "jitter_decay = " << c.jitter_decay << "\n"
     << "solver = " << c.solver << "\n"
     << "sgd_iterations = " << c.sgd.n_iterations << "\n"
     << "sgd_rate0 = " << c.sgd.rate0 << "\n"
     << "sgd_decay_iterations = " << c.sgd.decay_iterations << "\n"
     << "sgd_batch = " << c.sgd.batch_size << "\n"
     << "gd_iterations = " << c.gd.n_iterations << "\n"
     << "gd_rate0 = " << c.gd.rate0 << "\n"
     << "gd_decay_iterations = " << c.gd.decay_iterations << "\n"
     << "mesh_dx = " << c.mesh_dx << "\n"
     << "mc_P = " << c.mc_P << "\n"
     << "mc_Q = " << c.mc_Q << "\n"
     << "riccati_substeps = " << c.riccati_substeps << "\n"
     << "max_backoff = " << c.max_backoff << "\n"
     << "trials = " << c.trials << "\n"
     << "seed = " << c.seed << "\n"
     << "threads = " << c.threads << "\n";
  return os.str();
}

Problem make_problem(const ExperimentConfig& c) {
  Problem p;
  if (c.problem == "drone") {
    DroneParams dp = DroneParams::defaults();
    if (c.true_param.size() == 1 && c.true_param[0] > 0) {
      dp.mass = c.true_param[0];
    }
    if (c.diffusion >= 0) dp.sigma = c.diffusion;
    auto model = std::make_shared<DroneModel>(dp);
    p.drone = model;
    p.model = model;
    return p;
  }
  LqSpec spec;
  if (c.problem == "lq-case1") spec = case1_spec();
  else if (c.problem == "lq-case1-exp2") spec = case1_exp2_spec();
  else if (c.problem == "lq-case2") spec = case2_spec();
  else if (c.problem == "lq-case3") spec = case3_spec();
  else throw std::invalid_argument("unknown problem id '" + c.problem + "'");
  if (c.diffusion >= 0) {
    spec.C = c.diffusion * Matrix::Identity(spec.dim_state(), spec.dim_state());
  }
  p.lq = spec;
  p.model = std::make_shared<LqModel>(spec);
  return p;
}

}  // namespace swddc
