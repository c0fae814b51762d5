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

#include "swddc/direct_filter.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace swddc {

namespace {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

ParticleCloud::ParticleCloud(std::vector<Vector> p)
    : particles(std::move(p)),
      weights(particles.size(), 1.0 / std::max<size_t>(1, particles.size())) {}

ParticleCloud sample_prior(const PriorBox& box, int n_particles,
                           RngStream& rng) {
  require(n_particles >= 1, "sample_prior: need at least one particle");
  require(box.lower.size() == box.upper.size(), "sample_prior: box mismatch");
  std::vector<Vector> p;
  p.reserve(n_particles);
  for (int i = 0; i < n_particles; ++i) {
    Vector z(box.dim());
    for (int j = 0; j < box.dim(); ++j) {
      z[j] = box.lower[j] + (box.upper[j] - box.lower[j]) * rng.uniform();
    }
    p.push_back(z);
  }
  return ParticleCloud(std::move(p));
}

Matrix JitterSpec::effective(int step_index) const {
  return covariance * std::pow(decay_factor, step_index);
}

JitterSpec JitterSpec::from_prior(const PriorBox& box) {
  const Vector s = 0.1 * box.range();
  return {Matrix(s.cwiseProduct(s).asDiagonal()), 0.98};
}

JitterSpec JitterSpec::isotropic(int q, double variance, double decay) {
  return {Matrix::Identity(q, q) * variance, decay};
}

Matrix psd_sqrt(const Matrix& cov) {
  require(cov.rows() == cov.cols(), "psd_sqrt: matrix must be square");
  if (cov.isZero(0.0)) return Matrix::Zero(cov.rows(), cov.cols());
  if (cov.isDiagonal(0.0)) {
    return Matrix(cov.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()));
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() *
         es.eigenvectors().transpose();
}

ParticleCloud predict(const ParticleCloud& cloud, const JitterSpec& jitter,
                      int step_index, RngStream& rng) {
  const int q = cloud.dim();
  require(jitter.covariance.rows() == q && jitter.covariance.cols() == q,
          "predict: jitter covariance dimension mismatch");
  const Matrix root = psd_sqrt(jitter.effective(step_index));
  ParticleCloud out = cloud;
  for (auto& z : out.particles) z += root * rng.normal_vector(q);
  return out;
}

namespace {

double likelihood_denominator(const ControlledModel& model, double t_n,
                              const Matrix& Sigma, double dt) {
  require(dt > 0, "likelihood_weight: dt must be positive");
  const double s = spectral_norm(model.diffusion(t_n));
  const double n = spectral_norm(Sigma);
  const double denom = s * s * dt + n * n;
  require(denom > 0, "likelihood_weight: zero diffusion and zero noise");
  return denom;
}

double log_weight_given_denominator(const ControlledModel& model, double t_n,
                                    const Vector& x_est, const Vector& u_n,
                                    const Vector& zeta, const Vector& M_next,
                                    double denom, double dt) {
  require(M_next.size() == x_est.size(), "likelihood_weight: size mismatch");
  const Vector x_pred = x_est + model.drift(t_n, x_est, u_n, zeta) * dt;
  return -(M_next - x_pred).squaredNorm() / denom;
}

}  // namespace

double log_likelihood_weight(const ControlledModel& model, double t_n,
                             const Vector& x_est, const Vector& u_n,
                             const Vector& zeta, const Vector& M_next,
                             const Matrix& Sigma, double dt) {
  return log_weight_given_denominator(
      model, t_n, x_est, u_n, zeta, M_next,
      likelihood_denominator(model, t_n, Sigma, dt), dt);
}

double likelihood_weight(const ControlledModel& model, double t_n,
                         const Vector& x_est, const Vector& u_n,
                         const Vector& zeta, const Vector& M_next,
                         const Matrix& Sigma, double dt) {
  return std::exp(log_likelihood_weight(model, t_n, x_est, u_n, zeta, M_next,
                                        Sigma, dt));
}

ParticleCloud bayes_update(const ParticleCloud& cloud,
                           const std::vector<double>& raw_weights) {
  require(raw_weights.size() == cloud.particles.size(),
          "bayes_update: weight count mismatch");
  double total = 0.0;
  for (double w : raw_weights) {
    require(w >= 0, "bayes_update: negative weight");
    total += w;
  }
  if (!(total > 0) || !std::isfinite(total)) {
    throw DegenerateLikelihood("bayes_update: all likelihoods vanished");
  }
  ParticleCloud out;
  out.particles = cloud.particles;
  out.weights.resize(raw_weights.size());
  for (size_t i = 0; i < raw_weights.size(); ++i) {
    out.weights[i] = raw_weights[i] / total;
  }
  return out;
}

ParticleCloud bayes_update_log(const ParticleCloud& cloud,
                               const std::vector<double>& log_weights) {
  require(log_weights.size() == cloud.particles.size(),
          "bayes_update_log: weight count mismatch");
  double top = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (!std::isnan(lw)) top = std::max(top, lw);
  }
  if (!std::isfinite(top)) {
    throw DegenerateLikelihood("bayes_update_log: no finite log weight");
  }
  std::vector<double> raw(log_weights.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    raw[i] = std::isnan(log_weights[i]) ? 0.0 : std::exp(log_weights[i] - top);
  }
  return bayes_update(cloud, raw);
}

std::vector<int> systematic_indices(const std::vector<double>& weights,
                                    RngStream& rng) {
  const int n = static_cast<int>(weights.size());
  require(n >= 1, "systematic_resample: empty cloud");
  const double u0 = rng.uniform();
  std::vector<int> idx(n);
  double cumulative = weights[0];
  int j = 0;
  for (int i = 0; i < n; ++i) {
    const double pos = (u0 + i) / n;
    while (pos >= cumulative && j < n - 1) cumulative += weights[++j];
    idx[i] = j;
  }
  return idx;
}

ParticleCloud systematic_resample(const ParticleCloud& cloud, RngStream& rng) {
  const auto idx = systematic_indices(cloud.weights, rng);
  std::vector<Vector> p;
  p.reserve(idx.size());
  for (int i : idx) p.push_back(cloud.particles[i]);
  return ParticleCloud(std::move(p));
}

Vector posterior_mean(const ParticleCloud& cloud) {
  require(cloud.size() >= 1, "posterior_mean: empty cloud");
  Vector mean = Vector::Zero(cloud.dim());
  for (int i = 0; i < cloud.size(); ++i) {
    mean += cloud.weights[i] * cloud.particles[i];
  }
  return mean;
}

Vector posterior_std(const ParticleCloud& cloud) {
  const Vector mean = posterior_mean(cloud);
  Vector var = Vector::Zero(cloud.dim());
  for (int i = 0; i < cloud.size(); ++i) {
    var += cloud.weights[i] * (cloud.particles[i] - mean).cwiseAbs2();
  }
  return var.cwiseSqrt();
}

FilterStepResult df_step(const ParticleCloud& cloud,
                         const ControlledModel& model, double t_n,
                         const Vector& x_est, const Vector& u_n,
                         const Vector& M_next, const Matrix& Sigma,
                         const JitterSpec& jitter, int step_index, double dt,
                         RngStream& rng) {
  FilterStepResult result;
  ParticleCloud predicted = predict(cloud, jitter, step_index, rng);
  const double denom = likelihood_denominator(model, t_n, Sigma, dt);
  std::vector<double> log_w(predicted.size());
  for (int i = 0; i < predicted.size(); ++i) {
    log_w[i] = log_weight_given_denominator(
        model, t_n, x_est, u_n, predicted.particles[i], M_next, denom, dt);
  }
  try {
    result.cloud = systematic_resample(bayes_update_log(predicted, log_w), rng);
  } catch (const DegenerateLikelihood&) {
    result.degenerate = true;
    result.cloud = ParticleCloud(predicted.particles);
  }
  result.estimate = posterior_mean(result.cloud);
  return result;
}

}  // namespace swddc
