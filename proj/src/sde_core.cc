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

#include "swddc/sde_core.h"

#include <cmath>

namespace swddc {

TemporalGrid::TemporalGrid(double horizon, int n_steps)
    : horizon_(horizon), n_steps_(n_steps), dt_(0.0) {
  require(n_steps >= 1, "TemporalGrid: n_steps must be >= 1");
  require(horizon > 0 && std::isfinite(horizon),
          "TemporalGrid: horizon must be positive");
  dt_ = horizon / n_steps;
}

CallbackModel CallbackModel::zero(int d, int m, int q) {
  CallbackModel model;
  model.d = d;
  model.m = m;
  model.q = q;
  model.b = [d](double, const Vector&, const Vector&, const Vector&) {
    return Vector::Zero(d).eval();
  };
  model.b_x = [d](double, const Vector&, const Vector&, const Vector&) {
    return SmallMatrix::Zero(d, d).eval();
  };
  model.b_u = [d, m](double, const Vector&, const Vector&, const Vector&) {
    return SmallMatrix::Zero(d, m).eval();
  };
  model.sigma = [d](double) { return SmallMatrix::Zero(d, d).eval(); };
  model.f = [](double, const Vector&, const Vector&) { return 0.0; };
  model.f_x = [d](double, const Vector&, const Vector&) {
    return Vector::Zero(d).eval();
  };
  model.f_u = [m](double, const Vector&, const Vector&) {
    return Vector::Zero(m).eval();
  };
  model.h = [](const Vector&) { return 0.0; };
  model.h_x = [d](const Vector&) { return Vector::Zero(d).eval(); };
  return model;
}

Vector brownian_increments(RngStream& rng, int d, double dt) {
  require(dt > 0, "brownian_increments: dt must be positive");
  require(d >= 1, "brownian_increments: d must be >= 1");
  return rng.normal_vector(d) * std::sqrt(dt);
}

void check_model_dims(const ControlledModel& model, const Vector& x,
                      const Vector& u, const Vector& alpha) {
  require(x.size() == model.dim_state(), "state dimension mismatch");
  require(u.size() == model.dim_control(), "control dimension mismatch");
  require(alpha.size() == model.dim_param(), "parameter dimension mismatch");
}

Vector euler_step(const ControlledModel& model, double t, const Vector& x,
                  const Vector& u, const Vector& alpha, const Vector& dW,
                  double dt) {
  check_model_dims(model, x, u, alpha);
  require(dW.size() == model.dim_state(), "increment dimension mismatch");
  return x + model.drift(t, x, u, alpha) * dt + model.diffusion(t) * dW;
}

std::vector<Vector> draw_increments(RngStream& rng, int d, double dt,
                                    int count) {
  std::vector<Vector> dW;
  dW.reserve(count);
  for (int k = 0; k < count; ++k) dW.push_back(brownian_increments(rng, d, dt));
  return dW;
}

StatePath simulate_path_with_increments(const ControlledModel& model,
                                        const TemporalGrid& grid,
                                        int start_index, const Vector& x_start,
                                        const ControlTrajectory& control,
                                        const Vector& alpha,
                                        const std::vector<Vector>& dW) {
  const int n_end = grid.n_steps();
  require(start_index >= 0 && start_index <= n_end,
          "simulate_path: start index outside grid");
  require(control.covers(start_index, n_end),
          "simulate_path: control does not cover the remaining horizon");
  require(static_cast<int>(dW.size()) >= n_end - start_index,
          "simulate_path: not enough increments");
  std::vector<Vector> values;
  values.reserve(n_end - start_index + 1);
  values.push_back(x_start);
  for (int k = start_index; k < n_end; ++k) {
    values.push_back(euler_step(model, grid.time(k), values.back(),
                                control.at(k), alpha, dW[k - start_index],
                                grid.dt()));
  }
  return StatePath(start_index, std::move(values));
}

StatePath simulate_path(const ControlledModel& model, const TemporalGrid& grid,
                        int start_index, const Vector& x_start,
                        const ControlTrajectory& control, const Vector& alpha,
                        RngStream& rng) {
  require(control.covers(start_index, grid.n_steps()),
          "simulate_path: control does not cover the remaining horizon");
  const auto dW = draw_increments(rng, model.dim_state(), grid.dt(),
                                  grid.n_steps() - start_index);
  return simulate_path_with_increments(model, grid, start_index, x_start,
                                       control, alpha, dW);
}

double pathwise_cost(const ControlledModel& model, const TemporalGrid& grid,
                     const StatePath& path, const ControlTrajectory& control) {
  const int n_end = grid.n_steps();
  require(path.end_index() == n_end + 1, "pathwise_cost: path must end at N");
  double cost = 0.0;
  for (int k = path.start_index; k < n_end; ++k) {
    cost += model.run_cost(grid.time(k), path.at(k), control.at(k)) * grid.dt();
  }
  return cost + model.term_cost(path.at(n_end));
}

}  // namespace swddc
