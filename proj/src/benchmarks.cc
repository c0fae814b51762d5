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

#include "swddc/benchmarks.h"

#include <cmath>

namespace swddc {

SmallMatrix LqSpec::A(double t, const Vector& alpha) const {
  SmallMatrix a =
      a_base ? a_base(t) : SmallMatrix::Zero(dim_state(), dim_state());
  for (const auto& s : slots) a(s.row, s.col) += alpha[s.param_index] * s.coef(t);
  return a;
}

void LqSpec::validate() const {
  const int d = dim_state();
  const int m = dim_control();
  require(d >= 1 && m >= 1, "LqSpec: empty B");
  require(C.rows() == d && C.cols() == d, "LqSpec: C must be d x d");
  require(Q.rows() == d && Q.cols() == d, "LqSpec: Q must be d x d");
  require(F.rows() == d && F.cols() == d, "LqSpec: F must be d x d");
  require(R.rows() == m && R.cols() == m, "LqSpec: R must be m x m");
  require(n_params >= 0, "LqSpec: negative parameter count");
  for (const auto& s : slots) {
    require(s.param_index >= 0 && s.param_index < n_params,
            "LqSpec: slot parameter index out of range");
    require(s.row >= 0 && s.row < d && s.col >= 0 && s.col < d,
            "LqSpec: slot location outside A");
  }
  if (a_base) {
    const SmallMatrix a = a_base(0.0);
    require(a.rows() == d && a.cols() == d, "LqSpec: A must be d x d");
  }
  require(R.llt().info() == Eigen::Success, "LqSpec: R must be positive definite");
}

LqModel::LqModel(LqSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Vector LqModel::drift(double t, const Vector& x, const Vector& u,
                      const Vector& alpha) const {
  return spec_.A(t, alpha) * x + spec_.B * u;
}

SmallMatrix LqModel::drift_dx(double t, const Vector&, const Vector&,
                              const Vector& alpha) const {
  return spec_.A(t, alpha);
}

SmallMatrix LqModel::drift_du(double, const Vector&, const Vector&,
                              const Vector&) const {
  return spec_.B;
}

double LqModel::run_cost(double, const Vector& x, const Vector& u) const {
  return 0.5 * (x.dot(spec_.Q * x) + u.dot(spec_.R * u));
}

Vector LqModel::run_cost_dx(double, const Vector& x, const Vector&) const {
  return spec_.Q * x;
}

Vector LqModel::run_cost_du(double, const Vector&, const Vector& u) const {
  return spec_.R * u;
}

double LqModel::term_cost(const Vector& x) const {
  return 0.5 * x.dot(spec_.F * x);
}

Vector LqModel::term_cost_dx(const Vector& x) const { return spec_.F * x; }

LqModel lq_model(const LqSpec& spec) { return LqModel(spec); }

RiccatiSolution riccati_solve(const LqSpec& spec, const Vector& alpha_true,
                              const TemporalGrid& grid, int substeps) {
  spec.validate();
  require(substeps >= 1, "riccati_solve: substeps must be >= 1");
  require(alpha_true.size() == spec.n_params,
          "riccati_solve: parameter dimension mismatch");
  const Matrix S = spec.B * spec.R.llt().solve(spec.B.transpose());
  auto rhs = [&](double t, const Matrix& P) -> Matrix {
    const Matrix A = spec.A(t, alpha_true);
    return -P * A - A.transpose() * P + P * S * P - spec.Q;
  };
  const int N = grid.n_steps();
  RiccatiSolution sol;
  sol.P.resize(N + 1);
  Matrix P = spec.F;
  sol.P[N] = P;
  // backward in time: step h = -dt / substeps
  const double h = -grid.dt() / substeps;
  for (int n = N; n > 0; --n) {
    for (int s = 0; s < substeps; ++s) {
      const double t = grid.time(n) + s * h;
      const Matrix k1 = rhs(t, P);
      const Matrix k2 = rhs(t + 0.5 * h, P + 0.5 * h * k1);
      const Matrix k3 = rhs(t + 0.5 * h, P + 0.5 * h * k2);
      const Matrix k4 = rhs(t + h, P + h * k3);
      P += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!P.allFinite() || P.norm() > 1e12) {
      throw FiniteEscape("riccati_solve: solution escaped before t = 0");
    }
    sol.P[n - 1] = P;
  }
  return sol;
}

Vector lq_analytic_control(const RiccatiSolution& riccati, const LqSpec& spec,
                           int n, const Vector& x) {
  require(n >= 0 && n < static_cast<int>(riccati.P.size()),
          "lq_analytic_control: index outside grid");
  return -spec.R.llt().solve(spec.B.transpose() * (riccati.P[n] * x));
}

DroneParams DroneParams::defaults() {
  DroneParams p;
  p.target = Vector(3);
  p.target << 6.0, 7.0, 8.0;
  return p;
}

DroneModel::DroneModel(DroneParams params) : params_(std::move(params)) {
  require(params_.mass > 0, "DroneParams: mass must be positive");
  require(params_.sigma >= 0, "DroneParams: sigma must be nonnegative");
  require(params_.target.size() == 3, "DroneParams: target must be 3D");
}

Vector DroneModel::drift(double, const Vector& x, const Vector& u,
                         const Vector& alpha) const {
  const double m = alpha[0];
  Vector b(4);
  b << std::sin(x[3]), std::cos(x[3]), u[1] - m * params_.gravity,
      u[0] - params_.resistance * m;
  return b;
}

SmallMatrix DroneModel::drift_dx(double, const Vector& x, const Vector&,
                                 const Vector&) const {
  SmallMatrix j = SmallMatrix::Zero(4, 4);
  j(0, 3) = std::cos(x[3]);
  j(1, 3) = -std::sin(x[3]);
  return j;
}

SmallMatrix DroneModel::drift_du(double, const Vector&, const Vector&,
                                 const Vector&) const {
  SmallMatrix j = SmallMatrix::Zero(4, 2);
  j(2, 1) = 1.0;
  j(3, 0) = 1.0;
  return j;
}

SmallMatrix DroneModel::diffusion(double) const {
  const double s = params_.sigma;
  SmallMatrix sig = SmallMatrix::Zero(4, 4);
  sig.diagonal() << s, s, s, s * s;
  return sig;
}

double DroneModel::run_cost(double, const Vector&, const Vector& u) const {
  return 0.5 * u.squaredNorm();
}

Vector DroneModel::run_cost_dx(double, const Vector&, const Vector&) const {
  return Vector::Zero(4);
}

Vector DroneModel::run_cost_du(double, const Vector&, const Vector& u) const {
  return u;
}

double DroneModel::term_cost(const Vector& x) const {
  return params_.terminal_weight * (x.head(3) - params_.target).squaredNorm();
}

Vector DroneModel::term_cost_dx(const Vector& x) const {
  Vector g = Vector::Zero(4);
  g.head(3) = 2.0 * params_.terminal_weight * (x.head(3) - params_.target);
  return g;
}

double DroneModel::terminal_distance(const Vector& x) const {
  return (x.head(3) - params_.target).norm();
}

DroneModel drone_model(const DroneParams& params) { return DroneModel(params); }

CostEstimate evaluate_cost(const ControlledModel& model,
                           const TemporalGrid& grid, int n, const Vector& x_n,
                           const ControlTrajectory& control,
                           const Vector& alpha_true, int n_mc, RngStream& rng) {
  require(n_mc >= 1, "evaluate_cost: n_mc must be >= 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const StatePath path =
        simulate_path(model, grid, n, x_n, control, alpha_true, rng);
    const double c = pathwise_cost(model, grid, path, control);
    sum += c;
    sum_sq += c * c;
  }
  CostEstimate est;
  est.mean = sum / n_mc;
  if (n_mc > 1) {
    const double var =
        std::max(0.0, (sum_sq - n_mc * est.mean * est.mean) / (n_mc - 1));
    est.std_error = std::sqrt(var / n_mc);
  }
  return est;
}

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

LqSpec case1_spec() {
  LqSpec s;
  s.a_base = [](double) { return SmallMatrix::Zero(1, 1).eval(); };
  s.slots = {ParamSlot{0, 0, 0, [](double) { return 1.0; }}};
  s.n_params = 1;
  s.B = scalar(0.5);
  s.C = scalar(0.01);
  s.Q = scalar(1.0);
  s.R = scalar(0.1);
  s.F = scalar(1.0);
  return s;
}

LqSpec case1_exp2_spec() {
  LqSpec s = case1_spec();
  s.slots = {ParamSlot{0, 0, 0, [](double t) { return 2.0 * std::sin(t); }}};
  return s;
}

LqSpec case2_spec() {
  LqSpec s;
  s.a_base = [](double t) {
    SmallMatrix a = SmallMatrix::Zero(2, 2);
    a(1, 1) = std::cos(t);
    return a;
  };
  s.slots = {ParamSlot{0, 0, 0, [](double t) { return std::sin(t); }}};
  s.n_params = 1;
  s.B = Matrix(2, 1);
  s.B << 0.5, 0.5;
  s.C = 0.1 * Matrix::Identity(2, 2);
  s.Q = Matrix::Identity(2, 2);
  s.R = Matrix::Identity(1, 1);
  s.F = Matrix::Identity(2, 2);
  return s;
}

LqSpec case3_spec() {
  LqSpec s;
  s.a_base = [](double t) {
    SmallMatrix a = SmallMatrix::Zero(4, 4);
    a(0, 0) = std::sin(t);
    a(1, 1) = std::cos(t);
    return a;
  };
  s.slots = {ParamSlot{0, 2, 2, [](double) { return 1.0; }},
             ParamSlot{1, 3, 3, [](double) { return 1.0; }}};
  s.n_params = 2;
  s.B = Matrix(4, 2);
  s.B << 0.5, 0, 0.5, 0, 1, 0, 1, 0;
  s.C = 0.1 * Matrix::Identity(4, 4);
  s.Q = Matrix::Identity(4, 4);
  s.R = Matrix::Identity(2, 2);
  s.F = Matrix::Identity(4, 4);
  return s;
}

}  // namespace swddc
