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

#include "swddc/samplewise_control.h"

#include <algorithm>

namespace swddc {

double SgdSchedule::rate(int l) const {
  const double l0 =
      decay_iterations > 0 ? decay_iterations : 0.5 * n_iterations;
  return l0 > 0 ? rate0 / (1.0 + l / l0) : rate0;
}

void SgdSchedule::validate() const {
  require(n_iterations >= 0, "SgdSchedule: negative iteration count");
  require(rate0 > 0, "SgdSchedule: rate must be positive");
  require(decay_iterations >= 0, "SgdSchedule: negative decay");
  require(batch_size >= 1, "SgdSchedule: batch size must be >= 1");
  require(blowup_limit > 0, "SgdSchedule: blow-up limit must be positive");
}

AdjointPath adjoint_backward(const ControlledModel& model,
                             const TemporalGrid& grid, const StatePath& path,
                             const ControlTrajectory& control,
                             const Vector& alpha) {
  const int N = grid.n_steps();
  const int n = path.start_index;
  require(path.end_index() == N + 1, "adjoint_backward: path must end at N");
  require(n < N, "adjoint_backward: empty horizon");
  require(control.covers(n, N), "adjoint_backward: control misaligned");
  const double dt = grid.dt();
  std::vector<Vector> y(N - n + 1);
  y[N - n] = model.term_cost_dx(path.at(N));
  for (int k = N - 1; k >= n; --k) {
    const int j = k + 1;
    const Vector& x = path.at(j);
    const Vector& u = control.at(std::min(j, N - 1));
    const double t = grid.time(j);
    const Vector& y_next = y[j - n];
    y[k - n] = y_next + (model.drift_dx(t, x, u, alpha).transpose() * y_next +
                         model.run_cost_dx(t, x, u)) *
                            dt;
  }
  return AdjointPath(n, std::move(y));
}

GradientTrajectory samplewise_gradient(const ControlledModel& model,
                                       const TemporalGrid& grid,
                                       const StatePath& path,
                                       const AdjointPath& adjoint,
                                       const ControlTrajectory& control,
                                       const Vector& alpha) {
  const int N = grid.n_steps();
  const int n = path.start_index;
  require(adjoint.start_index == n && adjoint.end_index() == N + 1 &&
              path.end_index() == N + 1,
          "samplewise_gradient: path and adjoint misaligned");
  require(control.covers(n, N), "samplewise_gradient: control misaligned");
  std::vector<Vector> g;
  g.reserve(N - n);
  for (int k = n; k < N; ++k) {
    const double t = grid.time(k);
    const Vector& x = path.at(k);
    const Vector& u = control.at(k);
    g.push_back(model.drift_du(t, x, u, alpha).transpose() * adjoint.at(k) +
                model.run_cost_du(t, x, u));
  }
  return GradientTrajectory(n, std::move(g));
}

SgdResult sgd_optimize(const ControlledModel& model, const TemporalGrid& grid,
                       int n, const Vector& x_n, const ParticleCloud& cloud,
                       const ControlTrajectory& control_init,
                       const SgdSchedule& schedule, RngStream& rng) {
  schedule.validate();
  const int N = grid.n_steps();
  require(n >= 0 && n < N, "sgd_optimize: n outside grid");
  require(cloud.size() >= 1, "sgd_optimize: empty particle cloud");
  require(control_init.covers(n, N), "sgd_optimize: control does not cover");

  SgdResult result;
  // work on the remaining horizon only
  std::vector<Vector> tail(control_init.values.begin() +
                               (n - control_init.start_index),
                           control_init.values.begin() +
                               (N - control_init.start_index));
  result.control = ControlTrajectory(n, std::move(tail));
  ControlTrajectory& u = result.control;

  std::vector<Vector> g_sum(N - n);
  for (int l = 0; l < schedule.n_iterations; ++l) {
    for (auto& g : g_sum) g.setZero(model.dim_control());
    for (int b = 0; b < schedule.batch_size; ++b) {
      const Vector& zeta = cloud.particles[rng.index(cloud.size())];
      const StatePath path = simulate_path(model, grid, n, x_n, u, zeta, rng);
      const AdjointPath y = adjoint_backward(model, grid, path, u, zeta);
      const GradientTrajectory g =
          samplewise_gradient(model, grid, path, y, u, zeta);
      for (int k = 0; k < N - n; ++k) g_sum[k] += g.values[k];
    }
    // candidate iterate is built in g_sum and only accepted if finite
    const double step = schedule.rate(l) / schedule.batch_size;
    bool finite = true;
    for (int k = 0; k < N - n; ++k) {
      g_sum[k] = u.values[k] - step * g_sum[k];
      finite = finite && g_sum[k].allFinite() &&
               g_sum[k].cwiseAbs().maxCoeff() <= schedule.blowup_limit;
    }
    if (!finite) {
      result.diverged = true;
      break;
    }
    std::swap(u.values, g_sum);
    result.iterations = l + 1;
  }
  return result;
}

}  // namespace swddc
