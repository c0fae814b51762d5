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

// Command line front end.
//
//   swddc run <config> [--trials N] [--seed S] [--out DIR]
//             [--filter direct|augpf|augenkf] [--solver samplewise|fullgrid]
//             [--particles M]
//   swddc list-experiments
//   swddc validate <config>
//
// Output directory: --out, else $SWDDC_OUT_DIR, else out/<experiment name>.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swddc/harness.h"

namespace {

#ifndef SWDDC_CONFIG_DIR
#define SWDDC_CONFIG_DIR "configs"
#endif

int list_experiments() {
  std::cout << "problems:\n";
  for (const auto& id : swddc::problem_ids()) std::cout << "  " << id << "\n";
  namespace fs = std::filesystem;
  const fs::path dir(SWDDC_CONFIG_DIR);
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".cfg") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::cout << "configs (" << dir.string() << "):\n";
  for (const auto& f : files) {
    try {
      const auto c = swddc::load_config(f.string());
      std::cout << "  " << f.filename().string() << "  problem=" << c.problem
                << " filter=" << c.filter << " particles=" << c.particles
                << " solver=" << c.solver << " trials=" << c.trials << "\n";
    } catch (const std::exception& e) {
      std::cout << "  " << f.filename().string() << "  (invalid: " << e.what()
                << ")\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-wise data driven stochastic optimal control"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string run_config;
  std::optional<int> trials;
  std::optional<long long> seed;
  std::string out_dir;
  std::string filter;
  std::string solver;
  std::optional<int> particles;
  run->add_option("config", run_config, "config file")->required();
  run->add_option("--trials", trials, "number of trials")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "base seed")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--filter", filter, "parameter filter")
      ->check(CLI::IsMember({"direct", "augpf", "augenkf"}));
  run->add_option("--solver", solver, "control solver")
      ->check(CLI::IsMember({"samplewise", "fullgrid"}));
  run->add_option("--particles", particles, "particles or ensemble members")
      ->check(CLI::PositiveNumber);

  app.add_subcommand("list-experiments", "list problems and shipped configs");

  auto* validate = app.add_subcommand("validate", "check a config file");
  std::string validate_config;
  validate->add_option("config", validate_config, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-experiments")) return list_experiments();

    if (app.got_subcommand("validate")) {
      const auto c = swddc::load_config(validate_config);
      c.validate();
      std::cout << "ok: " << validate_config << " (problem " << c.problem
                << ")\n";
      return 0;
    }

    auto c = swddc::load_config(run_config);
    if (trials) c.trials = *trials;
    if (seed) c.seed = static_cast<std::uint64_t>(*seed);
    if (!filter.empty()) c.filter = filter;
    if (!solver.empty()) c.solver = solver;
    if (particles) c.particles = *particles;
    c.validate();

    if (out_dir.empty()) {
      const char* env = std::getenv("SWDDC_OUT_DIR");
      out_dir = env && *env ? env : "out/" + c.name;
    }
    const auto summary = swddc::run_trials(c, c.trials);
    swddc::write_outputs(out_dir, c, summary);

    std::cout << "experiment " << c.name << ": " << summary.completed << "/"
              << c.trials << " trials completed\n";
    if (!summary.param_rmse.empty()) {
      double mean = 0.0;
      for (double v : summary.param_rmse) mean += v;
      std::cout << "mean parameter RMSE " << mean / summary.param_rmse.size()
                << "\n";
    }
    if (c.problem == "drone") {
      std::cout << "mean terminal distance " << summary.mean_terminal_distance
                << "\n";
    }
    std::cout << "outputs written to " << out_dir << "\n";
    return summary.completed == c.trials ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
