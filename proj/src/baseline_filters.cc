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

#include "swddc/baseline_filters.h"

#include <cmath>
#include <iostream>

namespace swddc {

namespace {

std::vector<Vector> stacked_draws(const Vector& M0, const Matrix& Sigma,
                                  const PriorBox& box, int n, RngStream& rng) {
  require(n >= 1, "augmented init: need at least one member");
  require(Sigma.rows() == M0.size(), "augmented init: Sigma mismatch");
  const int d = M0.size();
  const int q = box.dim();
  const Matrix root = psd_sqrt(Sigma);
  std::vector<Vector> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector s(d + q);
    s.head(d) = M0 + root * rng.normal_vector(d);
    for (int j = 0; j < q; ++j) {
      s[d + j] = box.lower[j] + (box.upper[j] - box.lower[j]) * rng.uniform();
    }
    out.push_back(s);
  }
  return out;
}

Vector block_mean(const std::vector<Vector>& s, const std::vector<double>* w,
                  int offset) {
  const int q = s[0].size() - offset;
  Vector mean = Vector::Zero(q);
  for (size_t i = 0; i < s.size(); ++i) {
    mean += (w ? (*w)[i] : 1.0 / s.size()) * s[i].tail(q);
  }
  return mean;
}

Vector block_std(const std::vector<Vector>& s, const std::vector<double>* w,
                 int offset) {
  const Vector mean = block_mean(s, w, offset);
  Vector var = Vector::Zero(mean.size());
  for (size_t i = 0; i < s.size(); ++i) {
    var += (w ? (*w)[i] : 1.0 / s.size()) *
           (s[i].tail(mean.size()) - mean).cwiseAbs2();
  }
  return var.cwiseSqrt();
}

// Jitter the parameter block and Euler step the state block of one member.
Vector forecast_member(const Vector& s, const ControlledModel& model,
                       double t_n, const Vector& u_n, const Matrix& jitter_root,
                       double dt, RngStream& rng) {
  const int d = model.dim_state();
  const int q = model.dim_param();
  Vector out(d + q);
  const Vector alpha = s.tail(q) + jitter_root * rng.normal_vector(q);
  const Vector dW = brownian_increments(rng, d, dt);
  out.head(d) = euler_step(model, t_n, s.head(d), u_n, alpha, dW, dt);
  out.tail(q) = alpha;
  return out;
}

}  // namespace

AugmentedCloud init_augmented_cloud(const Vector& M0, const Matrix& Sigma,
                                    const PriorBox& box, int n_particles,
                                    RngStream& rng) {
  AugmentedCloud cloud;
  cloud.particles = stacked_draws(M0, Sigma, box, n_particles, rng);
  cloud.weights.assign(n_particles, 1.0 / n_particles);
  cloud.dim_state = M0.size();
  return cloud;
}

Ensemble init_ensemble(const Vector& M0, const Matrix& Sigma,
                       const PriorBox& box, int n_members, RngStream& rng) {
  require(n_members >= 2, "init_ensemble: need at least two members");
  Ensemble e;
  e.members = stacked_draws(M0, Sigma, box, n_members, rng);
  e.dim_state = M0.size();
  return e;
}

Vector parameter_mean(const AugmentedCloud& cloud) {
  return block_mean(cloud.particles, &cloud.weights, cloud.dim_state);
}
Vector parameter_mean(const Ensemble& ensemble) {
  return block_mean(ensemble.members, nullptr, ensemble.dim_state);
}
Vector parameter_std(const AugmentedCloud& cloud) {
  return block_std(cloud.particles, &cloud.weights, cloud.dim_state);
}
Vector parameter_std(const Ensemble& ensemble) {
  return block_std(ensemble.members, nullptr, ensemble.dim_state);
}

AugPfStepResult augpf_step(const AugmentedCloud& cloud,
                           const ControlledModel& model, double t_n,
                           const Vector& u_n, const Vector& M_next,
                           const Matrix& Sigma, const JitterSpec& jitter,
                           int step_index, double dt, RngStream& rng) {
  const int d = model.dim_state();
  require(cloud.dim_state == d, "augpf_step: state dimension mismatch");
  require(M_next.size() == d && Sigma.rows() == d,
          "augpf_step: observation dimension mismatch");
  const Matrix jitter_root = psd_sqrt(jitter.effective(step_index));
  Eigen::LDLT<Matrix> ldlt(Sigma);
  require(ldlt.info() == Eigen::Success && ldlt.isPositive() &&
              ldlt.vectorD().minCoeff() > 0,
          "augpf_step: observation covariance must be positive definite");

  AugPfStepResult result;
  std::vector<Vector> forecast(cloud.size());
  std::vector<double> log_w(cloud.size());
  for (int i = 0; i < cloud.size(); ++i) {
    forecast[i] =
        forecast_member(cloud.particles[i], model, t_n, u_n, jitter_root, dt,
                        rng);
    const Vector r = M_next - forecast[i].head(d);
    log_w[i] = std::log(cloud.weights[i]) - 0.5 * r.dot(ldlt.solve(r));
  }
  ParticleCloud flat(forecast);
  std::vector<int> idx;
  try {
    idx = systematic_indices(bayes_update_log(flat, log_w).weights, rng);
  } catch (const DegenerateLikelihood&) {
    result.degenerate = true;
    idx.resize(forecast.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  }
  result.cloud.dim_state = d;
  result.cloud.particles.reserve(idx.size());
  for (int i : idx) result.cloud.particles.push_back(forecast[i]);
  result.cloud.weights.assign(idx.size(), 1.0 / idx.size());
  result.estimate = parameter_mean(result.cloud);
  return result;
}

Ensemble enkf_analysis(const Ensemble& forecast, const Vector& M_next,
                       const Matrix& Sigma, RngStream& rng,
                       bool* regularized) {
  const int n = forecast.size();
  const int d = forecast.dim_state;
  require(n >= 2, "enkf_analysis: ensemble size must be >= 2");
  const int dim = forecast.members[0].size();

  Vector mean = Vector::Zero(dim);
  for (const auto& s : forecast.members) mean += s;
  mean /= n;
  Matrix A(dim, n);
  for (int i = 0; i < n; ++i) A.col(i) = forecast.members[i] - mean;
  // P_xy = cov(S, H S), P_yy = cov(H S)
  const Matrix P_xy = A * A.topRows(d).transpose() / (n - 1);
  Matrix S = P_xy.topRows(d) + Sigma;

  bool reg = false;
  Eigen::LDLT<Matrix> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().cwiseAbs().minCoeff() <=
          1e-14 * std::max(1.0, ldlt.vectorD().cwiseAbs().maxCoeff())) {
    const double eps = 1e-10 * std::max(S.trace(), 1e-300);
    S += eps * Matrix::Identity(d, d);
    ldlt.compute(S);
    reg = true;
    std::cerr << "warning: singular innovation covariance, added " << eps
              << " * I\n";
  }
  if (regularized) *regularized = reg;
  const Matrix K = ldlt.solve(P_xy.transpose()).transpose();

  const Matrix obs_root = psd_sqrt(Sigma);
  Ensemble out;
  out.dim_state = d;
  out.members.reserve(n);
  for (const auto& s : forecast.members) {
    const Vector y = M_next + obs_root * rng.normal_vector(d);
    out.members.push_back(s + K * (y - s.head(d)));
  }
  return out;
}

EnKfStepResult augenkf_step(const Ensemble& ensemble,
                            const ControlledModel& model, double t_n,
                            const Vector& u_n, const Vector& M_next,
                            const Matrix& Sigma, const JitterSpec& jitter,
                            int step_index, double dt, RngStream& rng) {
  require(ensemble.size() >= 2, "augenkf_step: ensemble size must be >= 2");
  require(ensemble.dim_state == model.dim_state(),
          "augenkf_step: state dimension mismatch");
  const Matrix jitter_root = psd_sqrt(jitter.effective(step_index));
  Ensemble forecast;
  forecast.dim_state = ensemble.dim_state;
  forecast.members.reserve(ensemble.size());
  for (const auto& s : ensemble.members) {
    forecast.members.push_back(
        forecast_member(s, model, t_n, u_n, jitter_root, dt, rng));
  }
  EnKfStepResult result;
  result.ensemble =
      enkf_analysis(forecast, M_next, Sigma, rng, &result.regularized);
  result.estimate = parameter_mean(result.ensemble);
  return result;
}

}  // namespace swddc
