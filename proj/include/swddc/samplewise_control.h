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

#ifndef SWDDC_SAMPLEWISE_CONTROL_H_
#define SWDDC_SAMPLEWISE_CONTROL_H_

#include "swddc/direct_filter.h"
#include "swddc/rng.h"
#include "swddc/sde_core.h"
#include "swddc/types.h"

namespace swddc {

// Step sizes rho_l = rate0 / (1 + l / decay_iterations).
struct SgdSchedule {
  int n_iterations = 2000;
  double rate0 = 0.1;
  // 0 selects n_iterations / 2
  double decay_iterations = 0.0;
  int batch_size = 1;
  // an iterate with a component above this magnitude counts as divergence
  double blowup_limit = 1e6;

  double rate(int l) const;
  void validate() const;
};

// Backward adjoint along one path with right-point coefficients:
//   Y_N = h_x(X_N)
//   Y_k = Y_{k+1} + (b_x^T Y_{k+1} + f_x) dt, evaluated at (t_{k+1}, X_{k+1},
//   u_{min(k+1, N-1)}).
AdjointPath adjoint_backward(const ControlledModel& model,
                             const TemporalGrid& grid, const StatePath& path,
                             const ControlTrajectory& control,
                             const Vector& alpha);

// g_k = b_u(t_k, X_k, u_k, alpha)^T Y_k + f_u(t_k, X_k, u_k).
GradientTrajectory samplewise_gradient(const ControlledModel& model,
                                       const TemporalGrid& grid,
                                       const StatePath& path,
                                       const AdjointPath& adjoint,
                                       const ControlTrajectory& control,
                                       const Vector& alpha);

struct SgdResult {
  ControlTrajectory control;
  // a non-finite or blown-up iterate stopped the iteration early; control
  // holds the last accepted iterate
  bool diverged = false;
  int iterations = 0;
};

// Stochastic gradient descent over the controls u_n..u_{N-1}. Each
// iteration draws batch_size particles uniformly from the cloud, simulates
// one path per particle from x_n and steps along the averaged sample-wise
// gradient.
SgdResult sgd_optimize(const ControlledModel& model, const TemporalGrid& grid,
                       int n, const Vector& x_n, const ParticleCloud& cloud,
                       const ControlTrajectory& control_init,
                       const SgdSchedule& schedule, RngStream& rng);

}  // namespace swddc

#endif  // SWDDC_SAMPLEWISE_CONTROL_H_
