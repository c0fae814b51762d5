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

#include <gtest/gtest.h>
#include "swddc/benchmarks.h"
#include "test_util.h"

namespace swddc {
namespace {

using testing::mat1;
using testing::vec;

TEST(AugmentedInitTest, ShapesAndWeights) {
  RngStream rng(1, 0);
  const PriorBox box{vec({-2.0}), vec({8.0})};
  const AugmentedCloud c =
      init_augmented_cloud(vec({2.0, -2.0}), 0.01 * Matrix::Identity(2, 2),
                           box, 300, rng);
  ASSERT_EQ(c.size(), 300);
  EXPECT_EQ(c.dim_state, 2);
  double sum = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c.particles[i].size(), 3);
    EXPECT_GE(c.particles[i][2], -2.0);
    EXPECT_LT(c.particles[i][2], 8.0);
    sum += c.weights[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  RngStream rng2(1, 0);
  EXPECT_THROW(init_ensemble(vec({1.0}), mat1(1.0), box, 1, rng2),
               std::invalid_argument);
}

TEST(AugPfStepTest, FixedPointWithExactParticles) {
  DroneParams p = DroneParams::defaults();
  p.sigma = 0.0;
  const DroneModel model(p);
  const Vector x = vec({0.0, 0.0, 5.0, 0.0});
  const Vector u = vec({0.1, 9.8});
  const double dt = 0.02;
  AugmentedCloud c;
  c.dim_state = 4;
  for (int i = 0; i < 20; ++i) {
    Vector s(5);
    s << x, 1.0;
    c.particles.push_back(s);
  }
  c.weights.assign(20, 1.0 / 20);
  const Vector m_next = euler_step(model, 0.0, x, u, vec({1.0}),
                                   Vector::Zero(4), dt);
  RngStream rng(2, 0);
  const auto r = augpf_step(c, model, 0.0, u, m_next,
                            1e-8 * Matrix::Identity(4, 4),
                            JitterSpec::isotropic(1, 0.0, 1.0), 0, dt, rng);
  EXPECT_DOUBLE_EQ(r.estimate[0], 1.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(AugPfStepTest, WeightsNormalizedAndEqualAfterResampling) {
  const LqModel model(case2_spec());
  RngStream rng(3, 0);
  const PriorBox box{vec({-2.0}), vec({8.0})};
  const Matrix sigma = 0.01 * Matrix::Identity(2, 2);
  AugmentedCloud c = init_augmented_cloud(vec({2.0, -2.0}), sigma, box, 500, rng);
  for (int n = 0; n < 5; ++n) {
    const auto r = augpf_step(c, model, 0.02 * n, vec({0.0}),
                              vec({2.0 + 0.01 * n, -2.0}), sigma,
                              JitterSpec::from_prior(box), n, 0.02, rng);
    c = r.cloud;
    double sum = 0.0;
    for (double w : c.weights) {
      EXPECT_EQ(w, 1.0 / 500);
      sum += w;
    }
    EXPECT_LT(std::abs(sum - 1.0), 1e-12);
    EXPECT_EQ(c.size(), 500);
  }
}

TEST(AugPfStepTest, NoInformationKeepsParameterMeanInExpectation) {
  const LqModel model(case1_spec());
  const PriorBox box{vec({-2.0}), vec({8.0})};
  const Matrix huge = mat1(1e12);
  std::vector<double> shifts;
  for (int rep = 0; rep < 400; ++rep) {
    RngStream rng(40, rep);
    const AugmentedCloud c = init_augmented_cloud(vec({2.0}), mat1(1e-6), box, 50, rng);
    const double before = parameter_mean(c)[0];
    const auto r = augpf_step(c, model, 0.0, vec({0.0}), vec({2.0}), huge,
                              JitterSpec::isotropic(1, 0.0, 1.0), 0, 0.02, rng);
    shifts.push_back(r.estimate[0] - before);
  }
  const auto ms = testing::mean_se(shifts);
  // equal weights resample to the same multiset, so the shift may be exactly 0
  EXPECT_LE(std::abs(ms.mean), 3.0 * ms.se);
}

TEST(EnkfAnalysisTest, ZeroGainLimitKeepsForecast) {
  RngStream rng(5, 0);
  Ensemble e = init_ensemble(vec({1.0, 2.0}), 0.1 * Matrix::Identity(2, 2),
                             PriorBox{vec({0.0}), vec({4.0})}, 100, rng);
  const Ensemble out =
      enkf_analysis(e, vec({10.0, -10.0}), 1e14 * Matrix::Identity(2, 2), rng);
  for (int i = 0; i < e.size(); ++i) {
    EXPECT_LT((out.members[i] - e.members[i]).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(EnkfAnalysisTest, SingularInnovationIsRegularized) {
  Ensemble e;
  e.dim_state = 1;
  for (int i = 0; i < 10; ++i) e.members.push_back(vec({1.0, 0.1 * i}));
  RngStream rng(5, 1);
  bool regularized = false;
  const Ensemble out = enkf_analysis(e, vec({1.5}), mat1(0.0), rng, &regularized);
  EXPECT_TRUE(regularized);
  for (const auto& m : out.members) EXPECT_TRUE(m.allFinite());
}

TEST(EnkfAnalysisTest, MatchesKalmanUpdateOfEnsembleMoments) {
  // The analysis of a large ensemble carries the Kalman posterior of its own
  // forecast moments.
  const int n = 10000;
  const double obs_var = 0.04;
  Matrix prior_cov(2, 2);
  prior_cov << 0.5, 0.2, 0.2, 0.3;
  const Matrix root = psd_sqrt(prior_cov);
  RngStream rng(77, 0);
  Ensemble e;
  e.dim_state = 1;
  for (int i = 0; i < n; ++i) {
    const Vector z = root * rng.normal_vector(2);
    e.members.push_back(vec({1.0, 3.0}) + z);
  }
  Vector mean = Vector::Zero(2);
  for (const auto& m : e.members) mean += m;
  mean /= n;
  Matrix cov = Matrix::Zero(2, 2);
  for (const auto& m : e.members) cov += (m - mean) * (m - mean).transpose();
  cov /= n - 1;
  const double y = 1.4;
  const Vector gain = cov.col(0) / (cov(0, 0) + obs_var);
  const Vector kf_mean = mean + gain * (y - mean[0]);
  const double kf_var_alpha = cov(1, 1) - gain[1] * cov(0, 1);

  const Ensemble out = enkf_analysis(e, vec({y}), mat1(obs_var), rng);
  std::vector<double> alpha(n);
  for (int i = 0; i < n; ++i) alpha[i] = out.members[i][1];
  const auto ms = testing::mean_se(alpha);
  EXPECT_LT(std::abs(ms.mean - kf_mean[1]), 3.0 * ms.se);
  const double sd = ms.se * std::sqrt(static_cast<double>(n));
  // sample variance has relative standard error sqrt(2 / n)
  EXPECT_LT(std::abs(sd * sd - kf_var_alpha),
            3.0 * kf_var_alpha * std::sqrt(2.0 / n));
}

TEST(AugEnkfStepTest, RejectsTinyEnsemble) {
  const LqModel model(case1_spec());
  Ensemble e;
  e.dim_state = 1;
  e.members.push_back(vec({1.0, 1.0}));
  RngStream rng(1, 0);
  EXPECT_THROW(augenkf_step(e, model, 0.0, vec({0.0}), vec({1.0}), mat1(1.0),
                            JitterSpec::isotropic(1, 0.0, 1.0), 0, 0.02, rng),
               std::invalid_argument);
}

TEST(AugEnkfStepTest, NoInformationKeepsParameterBlock) {
  const LqModel model(case1_spec());
  RngStream rng(9, 0);
  Ensemble e = init_ensemble(vec({2.0}), mat1(1e-4),
                             PriorBox{vec({-2.0}), vec({8.0})}, 200, rng);
  const Vector before = parameter_mean(e);
  const auto r = augenkf_step(e, model, 0.0, vec({0.0}), vec({2.0}),
                              mat1(1e14), JitterSpec::isotropic(1, 0.0, 1.0),
                              0, 0.02, rng);
  EXPECT_NEAR(r.estimate[0], before[0], 1e-6);
  EXPECT_FALSE(r.regularized);
}

TEST(AugEnkfStepTest, SeededRepeat) {
  const LqModel model(case2_spec());
  auto run = [&]() {
    RngStream rng(10, 0);
    Ensemble e = init_ensemble(vec({2.0, -2.0}), 0.01 * Matrix::Identity(2, 2),
                               PriorBox{vec({-2.0}), vec({8.0})}, 50, rng);
    for (int n = 0; n < 4; ++n) {
      e = augenkf_step(e, model, 0.02 * n, vec({0.0}), vec({2.0, -2.0}),
                       0.01 * Matrix::Identity(2, 2),
                       JitterSpec::isotropic(1, 0.01, 0.98), n, 0.02, rng)
              .ensemble;
    }
    return e.members;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace swddc
