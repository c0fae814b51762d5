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

#ifndef SWDDC_SDE_CORE_H_
#define SWDDC_SDE_CORE_H_

#include <functional>
#include <vector>

#include "swddc/rng.h"
#include "swddc/types.h"

namespace swddc {

// Uniform partition of [0, T] into n_steps intervals.
class TemporalGrid {
 public:
  TemporalGrid(double horizon, int n_steps);

  double horizon() const { return horizon_; }
  int n_steps() const { return n_steps_; }
  double dt() const { return dt_; }
  double time(int n) const { return n * dt_; }

 private:
  double horizon_;
  int n_steps_;
  double dt_;
};

// Controlled SDE dX = b(t, X, u, alpha) dt + sigma(t) dW with cost
// J = E[ int f(t, X, u) dt + h(X_T) ].
//
// Derivatives follow the Jacobian convention: drift_dx is d x d with
// entry (i, j) = d b_i / d x_j, drift_du is d x m. Gradients of scalar
// costs are returned as column vectors.
class ControlledModel {
 public:
  virtual ~ControlledModel() = default;

  virtual int dim_state() const = 0;
  virtual int dim_control() const = 0;
  virtual int dim_param() const = 0;

  virtual Vector drift(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const = 0;
  virtual SmallMatrix drift_dx(double t, const Vector& x, const Vector& u,
                          const Vector& alpha) const = 0;
  virtual SmallMatrix drift_du(double t, const Vector& x, const Vector& u,
                          const Vector& alpha) const = 0;
  virtual SmallMatrix diffusion(double t) const = 0;

  virtual double run_cost(double t, const Vector& x, const Vector& u) const = 0;
  virtual Vector run_cost_dx(double t, const Vector& x,
                             const Vector& u) const = 0;
  virtual Vector run_cost_du(double t, const Vector& x,
                             const Vector& u) const = 0;
  virtual double term_cost(const Vector& x) const = 0;
  virtual Vector term_cost_dx(const Vector& x) const = 0;
};

// ControlledModel assembled from callables. Useful for small test problems.
class CallbackModel : public ControlledModel {
 public:
  using VecFn = std::function<Vector(double, const Vector&, const Vector&,
                                     const Vector&)>;
  using MatFn = std::function<SmallMatrix(double, const Vector&, const Vector&,
                                     const Vector&)>;
  using CostFn = std::function<double(double, const Vector&, const Vector&)>;
  using CostGradFn =
      std::function<Vector(double, const Vector&, const Vector&)>;

  int d = 1;
  int m = 1;
  int q = 1;
  VecFn b;
  MatFn b_x;
  MatFn b_u;
  std::function<SmallMatrix(double)> sigma;
  CostFn f;
  CostGradFn f_x;
  CostGradFn f_u;
  std::function<double(const Vector&)> h;
  std::function<Vector(const Vector&)> h_x;

  // Model with every callback identically zero (h = 0, sigma = 0).
  static CallbackModel zero(int d, int m, int q);

  int dim_state() const override { return d; }
  int dim_control() const override { return m; }
  int dim_param() const override { return q; }
  Vector drift(double t, const Vector& x, const Vector& u,
               const Vector& alpha) const override {
    return b(t, x, u, alpha);
  }
  SmallMatrix drift_dx(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const override {
    return b_x(t, x, u, alpha);
  }
  SmallMatrix drift_du(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const override {
    return b_u(t, x, u, alpha);
  }
  SmallMatrix diffusion(double t) const override { return sigma(t); }
  double run_cost(double t, const Vector& x, const Vector& u) const override {
    return f(t, x, u);
  }
  Vector run_cost_dx(double t, const Vector& x,
                     const Vector& u) const override {
    return f_x(t, x, u);
  }
  Vector run_cost_du(double t, const Vector& x,
                     const Vector& u) const override {
    return f_u(t, x, u);
  }
  double term_cost(const Vector& x) const override { return h(x); }
  Vector term_cost_dx(const Vector& x) const override { return h_x(x); }
};

// d independent N(0, dt) draws.
Vector brownian_increments(RngStream& rng, int d, double dt);

// One Euler-Maruyama step: x + b(t, x, u, alpha) dt + sigma(t) dW.
Vector euler_step(const ControlledModel& model, double t, const Vector& x,
                  const Vector& u, const Vector& alpha, const Vector& dW,
                  double dt);

// Pre-drawn Brownian increments for steps start..N-1.
std::vector<Vector> draw_increments(RngStream& rng, int d, double dt,
                                    int count);

// Forward path X_start..X_N under the piecewise-constant control.
StatePath simulate_path(const ControlledModel& model, const TemporalGrid& grid,
                        int start_index, const Vector& x_start,
                        const ControlTrajectory& control, const Vector& alpha,
                        RngStream& rng);

// Same as simulate_path but with the increments supplied by the caller
// (dW[k] drives the step from start_index + k).
StatePath simulate_path_with_increments(const ControlledModel& model,
                                        const TemporalGrid& grid,
                                        int start_index, const Vector& x_start,
                                        const ControlTrajectory& control,
                                        const Vector& alpha,
                                        const std::vector<Vector>& dW);

// Left-point discretized pathwise cost sum f(t_k, X_k, u_k) dt + h(X_N).
double pathwise_cost(const ControlledModel& model, const TemporalGrid& grid,
                     const StatePath& path, const ControlTrajectory& control);

void check_model_dims(const ControlledModel& model, const Vector& x,
                      const Vector& u, const Vector& alpha);

}  // namespace swddc

#endif  // SWDDC_SDE_CORE_H_
