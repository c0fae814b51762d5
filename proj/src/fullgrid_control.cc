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

#include "swddc/fullgrid_control.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iostream>

namespace swddc {

namespace {

constexpr double kClampWarnFraction = 0.05;

// Printed once per process; gd_optimize rebuilds tables thousands of times.
std::atomic<bool> g_clamp_warned{false};

void warn_if_clamped(const ClampStats& s, const char* where) {
  if (s.fraction() > kClampWarnFraction && !g_clamp_warned.exchange(true)) {
    std::cerr << "warning: " << where << ": " << 100.0 * s.fraction()
              << "% of samples left the mesh; mesh too small\n";
  }
}

}  // namespace

StateMesh::StateMesh(const Vector& lower, const Vector& upper, double spacing)
    : lower_(lower), spacing_(spacing) {
  require(spacing > 0, "StateMesh: spacing must be positive");
  require(lower.size() == upper.size() && lower.size() >= 1,
          "StateMesh: bound dimension mismatch");
  total_ = 1;
  for (int i = 0; i < lower.size(); ++i) {
    require(upper[i] >= lower[i], "StateMesh: upper below lower");
    const int c =
        static_cast<int>(std::ceil((upper[i] - lower[i]) / spacing - 1e-9)) +
        1;
    counts_.push_back(std::max(c, 2));
    strides_.push_back(total_);
    total_ *= counts_.back();
  }
}

StateMesh StateMesh::auto_sized(const ControlledModel& model,
                                const TemporalGrid& grid, int start_index,
                                const Vector& x_start,
                                const ControlTrajectory& control,
                                const Vector& alpha, double spacing,
                                RngStream& rng, int n_pilot) {
  Vector lo = x_start;
  Vector hi = x_start;
  for (int p = 0; p < n_pilot; ++p) {
    const StatePath path =
        simulate_path(model, grid, start_index, x_start, control, alpha, rng);
    for (const auto& x : path.values) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  }
  const Vector margin = 0.2 * (hi - lo);
  return StateMesh(lo - margin, hi + margin, spacing);
}

Vector StateMesh::upper() const {
  Vector u(dim());
  for (int i = 0; i < dim(); ++i) u[i] = lower_[i] + (counts_[i] - 1) * spacing_;
  return u;
}

Vector StateMesh::node(int flat_index) const {
  Vector x(dim());
  for (int i = 0; i < dim(); ++i) {
    x[i] = lower_[i] + ((flat_index / strides_[i]) % counts_[i]) * spacing_;
  }
  return x;
}

Vector StateMesh::interpolate(const std::vector<Vector>& values,
                              const Vector& x, bool* clamped) const {
  require(static_cast<int>(values.size()) == total_,
          "StateMesh::interpolate: value count mismatch");
  const int d = dim();
  bool was_clamped = false;
  std::array<int, kMaxDim> base;
  std::array<double, kMaxDim> frac;
  for (int i = 0; i < d; ++i) {
    double s = (x[i] - lower_[i]) / spacing_;
    const double top = counts_[i] - 1;
    if (s < 0 || s > top || !std::isfinite(s)) {
      was_clamped = true;
      s = std::isfinite(s) ? std::clamp(s, 0.0, top) : (s > 0 ? top : 0.0);
    }
    int b = std::min(static_cast<int>(s), counts_[i] - 2);
    base[i] = b;
    frac[i] = s - b;
  }
  if (clamped) *clamped = was_clamped;
  Vector out = Vector::Zero(values[0].size());
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    int flat = 0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> i) & 1;
      w *= up ? frac[i] : 1.0 - frac[i];
      flat += (base[i] + up) * strides_[i];
    }
    if (w != 0.0) out += w * values[flat];
  }
  return out;
}

ValueTable mc_backward_value(const ControlledModel& model,
                             const StateMesh& mesh, const TemporalGrid& grid,
                             int start_index,
                             const ControlTrajectory& control,
                             const Vector& alpha, int n_mc_P, RngStream& rng) {
  const int N = grid.n_steps();
  require(n_mc_P >= 1, "mc_backward_value: P must be >= 1");
  require(start_index >= 0 && start_index < N,
          "mc_backward_value: start index outside grid");
  require(control.covers(start_index, N),
          "mc_backward_value: control does not cover");
  require(mesh.dim() == model.dim_state(), "mc_backward_value: mesh dim");
  const int d = model.dim_state();
  const double dt = grid.dt();
  const int n_nodes = mesh.node_count();

  ValueTable table;
  table.start_index = start_index;
  table.values.resize(N - start_index + 1);
  auto& terminal = table.values.back();
  terminal.reserve(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    terminal.push_back(model.term_cost_dx(mesh.node(i)));
  }

  for (int k = N - 1; k >= start_index; --k) {
    const auto& next = table.at(k + 1);
    auto& current = table.values[k - start_index];
    current.resize(n_nodes);
    const double t = grid.time(k);
    const double t_next = grid.time(k + 1);
    const Vector& u = control.at(k);
    const Vector& u_next = control.at(std::min(k + 1, N - 1));
    for (int i = 0; i < n_nodes; ++i) {
      const Vector x = mesh.node(i);
      Vector acc = Vector::Zero(d);
      for (int p = 0; p < n_mc_P; ++p) {
        const Vector x1 = euler_step(model, t, x, u, alpha,
                                     brownian_increments(rng, d, dt), dt);
        bool clamped = false;
        const Vector y1 = mesh.interpolate(next, x1, &clamped);
        ++table.clamps.evaluations;
        table.clamps.clamped += clamped;
        acc += y1 + (model.drift_dx(t_next, x1, u_next, alpha).transpose() * y1 +
                     model.run_cost_dx(t_next, x1, u_next)) *
                        dt;
      }
      current[i] = acc / n_mc_P;
    }
  }
  warn_if_clamped(table.clamps, "mc_backward_value");
  return table;
}

McGradient mc_gradient(const ControlledModel& model, const ValueTable& table,
                       const StateMesh& mesh, const TemporalGrid& grid,
                       const Vector& x_start, const ControlTrajectory& control,
                       const Vector& alpha, int n_mc_Q, RngStream& rng) {
  const int N = grid.n_steps();
  const int n = table.start_index;
  require(n_mc_Q >= 1, "mc_gradient: Q must be >= 1");
  require(static_cast<int>(table.values.size()) == N - n + 1,
          "mc_gradient: table does not reach the horizon");
  require(control.covers(n, N), "mc_gradient: control does not cover");
  const int m = model.dim_control();
  std::vector<Vector> sum(N - n, Vector::Zero(m));
  std::vector<Vector> sum_sq(N - n, Vector::Zero(m));

  McGradient out;
  for (int q = 0; q < n_mc_Q; ++q) {
    const StatePath path =
        simulate_path(model, grid, n, x_start, control, alpha, rng);
    for (int k = n; k < N; ++k) {
      const double t = grid.time(k);
      const Vector& x = path.at(k);
      const Vector& u = control.at(k);
      bool clamped = false;
      const Vector y = mesh.interpolate(table.at(k), x, &clamped);
      ++out.clamps.evaluations;
      out.clamps.clamped += clamped;
      const Vector g = model.drift_du(t, x, u, alpha).transpose() * y +
                       model.run_cost_du(t, x, u);
      sum[k - n] += g;
      sum_sq[k - n] += g.cwiseAbs2();
    }
  }
  out.gradient.start_index = n;
  out.std_error.start_index = n;
  for (int k = 0; k < N - n; ++k) {
    const Vector mean = sum[k] / n_mc_Q;
    Vector se = Vector::Zero(m);
    if (n_mc_Q > 1) {
      const Vector var =
          ((sum_sq[k] - n_mc_Q * mean.cwiseAbs2()) / (n_mc_Q - 1)).cwiseMax(0.0);
      se = (var / n_mc_Q).cwiseSqrt();
    }
    out.gradient.values.push_back(mean);
    out.std_error.values.push_back(se);
  }
  warn_if_clamped(out.clamps, "mc_gradient");
  return out;
}

GdResult gd_optimize(const ControlledModel& model, const StateMesh& mesh,
                     const TemporalGrid& grid, int n, const Vector& x_n,
                     const Vector& alpha_hat,
                     const ControlTrajectory& control_init,
                     const SgdSchedule& schedule, int n_mc_P, int n_mc_Q,
                     RngStream& rng) {
  schedule.validate();
  const int N = grid.n_steps();
  require(n >= 0 && n < N, "gd_optimize: n outside grid");
  require(control_init.covers(n, N), "gd_optimize: control does not cover");
  GdResult result;
  result.control = ControlTrajectory(
      n, std::vector<Vector>(
             control_init.values.begin() + (n - control_init.start_index),
             control_init.values.begin() + (N - control_init.start_index)));
  ControlTrajectory& u = result.control;
  for (int l = 0; l < schedule.n_iterations; ++l) {
    const ValueTable table = mc_backward_value(model, mesh, grid, n, u,
                                               alpha_hat, n_mc_P, rng);
    const McGradient g = mc_gradient(model, table, mesh, grid, x_n, u,
                                     alpha_hat, n_mc_Q, rng);
    result.clamps.add(table.clamps);
    result.clamps.add(g.clamps);
    const double step = schedule.rate(l);
    std::vector<Vector> next(N - n);
    bool finite = true;
    for (int k = 0; k < N - n; ++k) {
      next[k] = u.values[k] - step * g.gradient.values[k];
      finite = finite && next[k].allFinite() &&
               next[k].cwiseAbs().maxCoeff() <= schedule.blowup_limit;
    }
    if (!finite) {
      result.diverged = true;
      break;
    }
    u.values = std::move(next);
    result.iterations = l + 1;
  }
  return result;
}

}  // namespace swddc
