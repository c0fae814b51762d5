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

#ifndef SWDDC_BENCHMARKS_H_
#define SWDDC_BENCHMARKS_H_

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swddc/rng.h"
#include "swddc/sde_core.h"
#include "swddc/types.h"

namespace swddc {

// Unknown parameter alpha[param_index] enters A(t) at (row, col) scaled by
// coef(t).
struct ParamSlot {
  int param_index = 0;
  int row = 0;
  int col = 0;
  std::function<double(double)> coef = [](double) { return 1.0; };
};

// dX = (A(t) X + B u) dt + C dW,
// J = E[ int 1/2 (X'QX + u'Ru) dt + 1/2 X_T' F X_T ].
// A(t) = a_base(t) + sum over slots of alpha_p coef(t) e_row e_col'.
struct LqSpec {
  std::function<SmallMatrix(double)> a_base;
  std::vector<ParamSlot> slots;
  int n_params = 1;
  SmallMatrix B;
  SmallMatrix C;
  SmallMatrix Q;
  SmallMatrix R;
  SmallMatrix F;

  int dim_state() const { return B.rows(); }
  int dim_control() const { return B.cols(); }
  SmallMatrix A(double t, const Vector& alpha) const;
  void validate() const;
};

class LqModel : public ControlledModel {
 public:
  explicit LqModel(LqSpec spec);

  const LqSpec& spec() const { return spec_; }

  int dim_state() const override { return spec_.dim_state(); }
  int dim_control() const override { return spec_.dim_control(); }
  int dim_param() const override { return spec_.n_params; }
  Vector drift(double t, const Vector& x, const Vector& u,
               const Vector& alpha) const override;
  SmallMatrix drift_dx(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const override;
  SmallMatrix drift_du(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const override;
  SmallMatrix diffusion(double) const override { return spec_.C; }
  double run_cost(double t, const Vector& x, const Vector& u) const override;
  Vector run_cost_dx(double t, const Vector& x,
                     const Vector& u) const override;
  Vector run_cost_du(double t, const Vector& x,
                     const Vector& u) const override;
  double term_cost(const Vector& x) const override;
  Vector term_cost_dx(const Vector& x) const override;

 private:
  LqSpec spec_;
};

LqModel lq_model(const LqSpec& spec);

class FiniteEscape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P(t_n) for n = 0..N.
struct RiccatiSolution {
  std::vector<Matrix> P;
};

// Integrates dP/dt = -PA - A'P + P B R^-1 B' P - Q, P(T) = F backward with
// classical RK4 using dt / substeps internal steps.
RiccatiSolution riccati_solve(const LqSpec& spec, const Vector& alpha_true,
                              const TemporalGrid& grid, int substeps = 10);

// -R^-1 B' P(t_n) x
Vector lq_analytic_control(const RiccatiSolution& riccati, const LqSpec& spec,
                           int n, const Vector& x);

struct DroneParams {
  double mass = 1.0;
  double gravity = 9.8;
  double resistance = 0.1;
  double sigma = 0.2;
  Vector target = Vector::Zero(3);
  double terminal_weight = 10.0;

  static DroneParams defaults();
};

// State (X, Y, Z, theta), control (steering, lift), alpha = (mass).
// DroneParams::mass is the true mass; the model reads mass from alpha.
class DroneModel : public ControlledModel {
 public:
  explicit DroneModel(DroneParams params);

  const DroneParams& params() const { return params_; }

  int dim_state() const override { return 4; }
  int dim_control() const override { return 2; }
  int dim_param() const override { return 1; }
  Vector drift(double t, const Vector& x, const Vector& u,
               const Vector& alpha) const override;
  SmallMatrix drift_dx(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const override;
  SmallMatrix drift_du(double t, const Vector& x, const Vector& u,
                       const Vector& alpha) const override;
  SmallMatrix diffusion(double t) const override;
  double run_cost(double t, const Vector& x, const Vector& u) const override;
  Vector run_cost_dx(double t, const Vector& x,
                     const Vector& u) const override;
  Vector run_cost_du(double t, const Vector& x,
                     const Vector& u) const override;
  double term_cost(const Vector& x) const override;
  Vector term_cost_dx(const Vector& x) const override;

  double terminal_distance(const Vector& x) const;

 private:
  DroneParams params_;
};

DroneModel drone_model(const DroneParams& params);

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo mean of the left-point discretized pathwise cost.
CostEstimate evaluate_cost(const ControlledModel& model,
                           const TemporalGrid& grid, int n, const Vector& x_n,
                           const ControlTrajectory& control,
                           const Vector& alpha_true, int n_mc, RngStream& rng);

// Coefficients of the LQ benchmark family.
LqSpec case1_spec();       // A = alpha
LqSpec case1_exp2_spec();  // A = 2 alpha sin t
LqSpec case2_spec();       // A = diag(alpha sin t, cos t)
LqSpec case3_spec();       // A = diag(sin t, cos t, alpha, beta)

}  // namespace swddc

#endif  // SWDDC_BENCHMARKS_H_
