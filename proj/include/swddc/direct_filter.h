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

#ifndef SWDDC_DIRECT_FILTER_H_
#define SWDDC_DIRECT_FILTER_H_

#include <stdexcept>
#include <vector>

#include "swddc/rng.h"
#include "swddc/sde_core.h"
#include "swddc/types.h"

namespace swddc {

// All likelihoods vanished (or were non-finite) in a Bayesian update.
class DegenerateLikelihood : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weighted samples in parameter space.
struct ParticleCloud {
  std::vector<Vector> particles;
  std::vector<double> weights;

  ParticleCloud() = default;
  // equally weighted
  explicit ParticleCloud(std::vector<Vector> p);

  int size() const { return static_cast<int>(particles.size()); }
  int dim() const { return particles.empty() ? 0 : particles[0].size(); }
};

// Axis-aligned box used for initial uniform draws.
struct PriorBox {
  Vector lower;
  Vector upper;

  int dim() const { return lower.size(); }
  Vector range() const { return upper - lower; }
};

ParticleCloud sample_prior(const PriorBox& box, int n_particles,
                           RngStream& rng);

// Artificial parameter noise gamma_n ~ N(0, covariance * decay^n).
struct JitterSpec {
  Matrix covariance;
  double decay_factor = 1.0;

  Matrix effective(int step_index) const;
  // (0.1 * range)^2 I with decay 0.98
  static JitterSpec from_prior(const PriorBox& box);
  static JitterSpec isotropic(int q, double variance, double decay);
};

struct ObservationSeq {
  std::vector<Vector> values;
  Matrix noise_cov;
};

// Symmetric square root of a positive semidefinite matrix. Small negative
// eigenvalues from rounding are clipped to zero.
Matrix psd_sqrt(const Matrix& cov);

ParticleCloud predict(const ParticleCloud& cloud, const JitterSpec& jitter,
                      int step_index, RngStream& rng);

// Exponent of the pseudo-observation likelihood:
// -|M_next - x_est - b(t_n, x_est, u_n, zeta) dt|^2 / (|sigma(t_n)|^2 dt +
// |Sigma|^2), with spectral norms.
double log_likelihood_weight(const ControlledModel& model, double t_n,
                             const Vector& x_est, const Vector& u_n,
                             const Vector& zeta, const Vector& M_next,
                             const Matrix& Sigma, double dt);

double likelihood_weight(const ControlledModel& model, double t_n,
                         const Vector& x_est, const Vector& u_n,
                         const Vector& zeta, const Vector& M_next,
                         const Matrix& Sigma, double dt);

// Normalizes raw weights. Throws DegenerateLikelihood if they sum to zero.
ParticleCloud bayes_update(const ParticleCloud& cloud,
                           const std::vector<double>& raw_weights);

// Normalizes exp(log_weights) after subtracting the maximum, so the update
// only degenerates if every log weight is -inf or NaN.
ParticleCloud bayes_update_log(const ParticleCloud& cloud,
                               const std::vector<double>& log_weights);

// Indices selected by systematic resampling of normalized weights.
std::vector<int> systematic_indices(const std::vector<double>& weights,
                                    RngStream& rng);

ParticleCloud systematic_resample(const ParticleCloud& cloud, RngStream& rng);

Vector posterior_mean(const ParticleCloud& cloud);
// Per-component weighted standard deviation.
Vector posterior_std(const ParticleCloud& cloud);

struct FilterStepResult {
  ParticleCloud cloud;
  Vector estimate;
  // likelihoods degenerated and the predicted cloud was kept as is
  bool degenerate = false;
};

// predict -> likelihood -> bayes update -> systematic resample -> mean.
// x_est is the observation M_{t_n}, used as the state estimate.
FilterStepResult df_step(const ParticleCloud& cloud,
                         const ControlledModel& model, double t_n,
                         const Vector& x_est, const Vector& u_n,
                         const Vector& M_next, const Matrix& Sigma,
                         const JitterSpec& jitter, int step_index, double dt,
                         RngStream& rng);

}  // namespace swddc

#endif  // SWDDC_DIRECT_FILTER_H_
