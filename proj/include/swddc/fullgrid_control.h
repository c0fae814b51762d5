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

#ifndef SWDDC_FULLGRID_CONTROL_H_
#define SWDDC_FULLGRID_CONTROL_H_

#include <cstdint>
#include <vector>

#include "swddc/rng.h"
#include "swddc/samplewise_control.h"
#include "swddc/sde_core.h"
#include "swddc/types.h"

namespace swddc {

// Uniform lattice on [lower, upper] with spacing dx in every direction.
// The upper bound is rounded outwards to the next lattice point.
class StateMesh {
 public:
  StateMesh(const Vector& lower, const Vector& upper, double spacing);

  // Bounds from pilot paths of the uncontrolled-by-feedback system:
  // [min - 0.2 * span, max + 0.2 * span] per component.
  static StateMesh auto_sized(const ControlledModel& model,
                              const TemporalGrid& grid, int start_index,
                              const Vector& x_start,
                              const ControlTrajectory& control,
                              const Vector& alpha, double spacing,
                              RngStream& rng, int n_pilot = 1000);

  int dim() const { return lower_.size(); }
  double spacing() const { return spacing_; }
  const Vector& lower() const { return lower_; }
  Vector upper() const;
  int nodes_along(int axis) const { return counts_[axis]; }
  int node_count() const { return total_; }
  Vector node(int flat_index) const;

  // Multilinear interpolation of per-node vectors. Points outside the mesh
  // are clamped to the boundary; *clamped reports whether that happened.
  Vector interpolate(const std::vector<Vector>& values, const Vector& x,
                     bool* clamped = nullptr) const;

 private:
  Vector lower_;
  double spacing_;
  std::vector<int> counts_;
  std::vector<int> strides_;
  int total_ = 0;
};

struct ClampStats {
  std::int64_t evaluations = 0;
  std::int64_t clamped = 0;

  double fraction() const {
    return evaluations ? static_cast<double>(clamped) / evaluations : 0.0;
  }
  void add(const ClampStats& o) {
    evaluations += o.evaluations;
    clamped += o.clamped;
  }
};

// Y values per time index (start..N) and mesh node.
struct ValueTable {
  int start_index = 0;
  std::vector<std::vector<Vector>> values;
  ClampStats clamps;

  const std::vector<Vector>& at(int n) const {
    return values.at(n - start_index);
  }
};

// Monte-Carlo backward approximation of Y on the mesh. For each node x at
// t_k, P one-step Euler samples X' are drawn and
//   Y_k(x) = mean[ Y_{k+1}(X') + (b_x^T Y_{k+1}(X') + f_x) dt ]
// with coefficients at (t_{k+1}, X', u_{min(k+1, N-1)}).
ValueTable mc_backward_value(const ControlledModel& model,
                             const StateMesh& mesh, const TemporalGrid& grid,
                             int start_index,
                             const ControlTrajectory& control,
                             const Vector& alpha, int n_mc_P, RngStream& rng);

struct McGradient {
  GradientTrajectory gradient;
  // standard error of each component of the mean
  GradientTrajectory std_error;
  ClampStats clamps;
};

// Averages b_u^T Y(X_k) + f_u over Q forward paths from x_start, with Y
// interpolated from the table.
McGradient mc_gradient(const ControlledModel& model, const ValueTable& table,
                       const StateMesh& mesh, const TemporalGrid& grid,
                       const Vector& x_start, const ControlTrajectory& control,
                       const Vector& alpha, int n_mc_Q, RngStream& rng);

struct GdResult {
  ControlTrajectory control;
  bool diverged = false;
  int iterations = 0;
  ClampStats clamps;
};

// Full gradient descent with the mesh gradient; the table is rebuilt at
// every iteration.
GdResult gd_optimize(const ControlledModel& model, const StateMesh& mesh,
                     const TemporalGrid& grid, int n, const Vector& x_n,
                     const Vector& alpha_hat,
                     const ControlTrajectory& control_init,
                     const SgdSchedule& schedule, int n_mc_P, int n_mc_Q,
                     RngStream& rng);

}  // namespace swddc

#endif  // SWDDC_FULLGRID_CONTROL_H_
