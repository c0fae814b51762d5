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

#ifndef SWDDC_TYPES_H_
#define SWDDC_TYPES_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swddc {

// Largest state, control or parameter dimension (including stacked
// state-parameter vectors). Vectors and model Jacobians live on the stack.
inline constexpr int kMaxDim = 8;

using Vector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                  Eigen::ColMajor, kMaxDim, kMaxDim>;
using Matrix = Eigen::MatrixXd;

// Sequence of vectors indexed by absolute time-grid index, starting at
// start_index. The tag keeps state paths, adjoints, controls and gradients
// from being mixed up.
template <typename Tag>
struct GridSeries {
  int start_index = 0;
  std::vector<Vector> values;

  GridSeries() = default;
  GridSeries(int start, std::vector<Vector> v)
      : start_index(start), values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
  // one past the last stored index
  int end_index() const { return start_index + size(); }
  bool covers(int first, int last_exclusive) const {
    return first >= start_index && last_exclusive <= end_index();
  }
  const Vector& at(int n) const { return values.at(n - start_index); }
  Vector& at(int n) { return values.at(n - start_index); }
};

struct StatePathTag {};
struct AdjointPathTag {};
struct ControlTag {};
struct GradientTag {};

// X at grid indices n..N_T.
using StatePath = GridSeries<StatePathTag>;
// Y at grid indices n..N_T.
using AdjointPath = GridSeries<AdjointPathTag>;
// Piecewise-constant control on [t_k, t_{k+1}), k = n..N_T-1.
using ControlTrajectory = GridSeries<ControlTag>;
// Gradient of the cost with respect to each control value.
using GradientTrajectory = GridSeries<GradientTag>;

// Constant control trajectory over indices start..end-1.
inline ControlTrajectory constant_control(int start, int end,
                                          const Vector& value) {
  return ControlTrajectory(start, std::vector<Vector>(end - start, value));
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace swddc

#endif  // SWDDC_TYPES_H_
