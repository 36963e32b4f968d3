// Copyright 2026 The vqe-smo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>

#include <Eigen/Dense>

namespace vqesmo::gp {

/// Hyperparameters of the VQE kernel plus the Gaussian likelihood variance.
/// All three live in standardized target units (see TargetScaling).
struct KernelParams {
  double sigma0_sq = 1.0;  // prior variance
  double gamma_sq = 1.0;   // smoothness, >= 1
  double noise_var = 0.0;  // likelihood variance

  void validate() const;
  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// Smallest likelihood variance used in any solve.
inline constexpr double kNoiseFloor = 1e-10;

/// k(a, b) = sigma0^2 prod_d (gamma^2 + cos(a_d - b_d)) / (1 + gamma^2)
double vqe_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                  const KernelParams& p);

/// Kernel matrix between the rows of `a` and the rows of `b`.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p);

/// Affine map between raw energies and the zero-mean standardized targets the
/// GP is trained on: standardized = (raw - offset) / scale.
struct TargetScaling {
  double offset = 0.0;
  double scale = 1.0;
};

/// Exact GP regression state. Inputs are stored one point per row.
class GpModel {
 public:
  GpModel() = default;

  int num_points() const { return static_cast<int>(inputs_.rows()); }
  int dimension() const { return static_cast<int>(inputs_.cols()); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  /// Training targets in raw units.
  Eigen::VectorXd targets() const;
  const KernelParams& params() const { return params_; }
  const TargetScaling& scaling() const { return scaling_; }
  const Eigen::MatrixXd& cholesky() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

  /// Diagonal regularization actually used (noise variance after flooring,
  /// plus any jitter added to recover from a failed factorization).
  double diagonal_shift() const { return shift_; }
  /// Likelihood variance in raw energy units.
  double raw_noise_variance() const { return shift_ * scaling_.scale * scaling_.scale; }

  double log_marginal_likelihood() const;

 private:
  friend GpModel fit(const Eigen::MatrixXd&, const Eigen::VectorXd&, const KernelParams&, const TargetScaling&);
  friend GpModel extend(const GpModel&, const Eigen::MatrixXd&, const Eigen::VectorXd&);

  Eigen::MatrixXd inputs_;
  Eigen::VectorXd std_targets_;
  KernelParams params_;
  TargetScaling scaling_;
  double shift_ = kNoiseFloor;
  Eigen::MatrixXd chol_;  // lower triangular, chol chol^T = K + shift I
  Eigen::VectorXd alpha_;
};

/// Predictive distribution over a set of test points, in raw units.
struct Posterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Factorizes K + sigma^2 I. On failure retries once with jitter
/// 1e-8 * sigma0^2 on the diagonal, then throws ComputeError.
GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const KernelParams& params,
            const TargetScaling& scaling = {});

/// Same model as a refit on the concatenated data, via a block Cholesky update.
GpModel extend(const GpModel& model, const Eigen::MatrixXd& new_inputs, const Eigen::VectorXd& new_targets);

/// mean = K'^T (K + s I)^{-1} y,  cov = K'' - K'^T (K + s I)^{-1} K'.
/// The covariance is symmetrized and its diagonal clipped at zero.
Posterior posterior(const GpModel& model, const Eigen::MatrixXd& test_inputs);

/// Mean only; cheaper than posterior() when no covariance is needed.
Eigen::VectorXd posterior_mean(const GpModel& model, const Eigen::MatrixXd& test_inputs);

/// Candidate with the largest log marginal likelihood. Ties go to the smaller
/// gamma_sq, then the smaller sigma0_sq. Candidates whose factorization fails
/// are skipped; if all fail, throws ComputeError.
KernelParams select_hyperparams(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                std::span<const KernelParams> candidates, const TargetScaling& scaling = {});

}  // namespace vqesmo::gp
