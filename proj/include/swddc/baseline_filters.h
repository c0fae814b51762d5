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

#ifndef SWDDC_BASELINE_FILTERS_H_
#define SWDDC_BASELINE_FILTERS_H_

#include <vector>

#include "swddc/direct_filter.h"
#include "swddc/rng.h"
#include "swddc/sde_core.h"
#include "swddc/types.h"

namespace swddc {

// Weighted samples of the stacked vector S = [X; alpha].
struct AugmentedCloud {
  std::vector<Vector> particles;
  std::vector<double> weights;
  int dim_state = 0;

  int size() const { return static_cast<int>(particles.size()); }
};

// Unweighted members of S = [X; alpha].
struct Ensemble {
  std::vector<Vector> members;
  int dim_state = 0;

  int size() const { return static_cast<int>(members.size()); }
};

// State block ~ N(M0, Sigma), parameter block uniform in the prior box.
AugmentedCloud init_augmented_cloud(const Vector& M0, const Matrix& Sigma,
                                    const PriorBox& box, int n_particles,
                                    RngStream& rng);
Ensemble init_ensemble(const Vector& M0, const Matrix& Sigma,
                       const PriorBox& box, int n_members, RngStream& rng);

// Mean of the parameter block.
Vector parameter_mean(const AugmentedCloud& cloud);
Vector parameter_mean(const Ensemble& ensemble);
Vector parameter_std(const AugmentedCloud& cloud);
Vector parameter_std(const Ensemble& ensemble);

struct AugPfStepResult {
  AugmentedCloud cloud;
  Vector estimate;
  bool degenerate = false;
};

// Jitter the parameter block, Euler step the state block, weight by the
// Gaussian density N(M_next; X, Sigma), resample systematically.
AugPfStepResult augpf_step(const AugmentedCloud& cloud,
                           const ControlledModel& model, double t_n,
                           const Vector& u_n, const Vector& M_next,
                           const Matrix& Sigma, const JitterSpec& jitter,
                           int step_index, double dt, RngStream& rng);

struct EnKfStepResult {
  Ensemble ensemble;
  Vector estimate;
  // innovation covariance needed regularization
  bool regularized = false;
};

// Perturbed-observation analysis of the forecast ensemble.
// K = P_xy (P_yy + Sigma)^-1 with H = [I_d 0].
Ensemble enkf_analysis(const Ensemble& forecast, const Vector& M_next,
                       const Matrix& Sigma, RngStream& rng,
                       bool* regularized = nullptr);

EnKfStepResult augenkf_step(const Ensemble& ensemble,
                            const ControlledModel& model, double t_n,
                            const Vector& u_n, const Vector& M_next,
                            const Matrix& Sigma, const JitterSpec& jitter,
                            int step_index, double dt, RngStream& rng);

}  // namespace swddc

#endif  // SWDDC_BASELINE_FILTERS_H_
