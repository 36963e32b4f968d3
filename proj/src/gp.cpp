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

#include "vqesmo/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "vqesmo/error.hpp"

namespace vqesmo::gp {
namespace {

std::optional<Eigen::MatrixXd> try_cholesky(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd l = llt.matrixL();
  if (!l.diagonal().allFinite() || (l.diagonal().array() <= 0.0).any()) return std::nullopt;
  return l;
}

Eigen::VectorXd solve_with_cholesky(const Eigen::MatrixXd& l, const Eigen::VectorXd& b) {
  Eigen::VectorXd x = l.triangularView<Eigen::Lower>().solve(b);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

void check_scaling(const TargetScaling& s) {
  if (!std::isfinite(s.offset) || !std::isfinite(s.scale) || s.scale <= 0.0)
    throw ValidationError("target scaling needs a finite offset and a positive scale");
}

}  // namespace

void KernelParams::validate() const {
  if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw ValidationError("kernel sigma0_sq must be > 0");
  if (!(gamma_sq >= 1.0) || !std::isfinite(gamma_sq)) throw ValidationError("kernel gamma_sq must be >= 1");
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) throw ValidationError("kernel noise_var must be >= 0");
}

double vqe_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                  const KernelParams& p) {
  if (a.size() != b.size()) throw ValidationError("vqe_kernel: input length mismatch");
  const double norm = 1.0 / (1.0 + p.gamma_sq);
  double k = p.sigma0_sq;
  for (Eigen::Index d = 0; d < a.size(); ++d) k *= (p.gamma_sq + std::cos(a[d] - b[d])) * norm;
  return k;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p) {
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols())
    throw ValidationError("kernel_matrix: input dimension mismatch");
  // cos(x - y) = cos x cos y + sin x sin y, so trig is evaluated once per entry of the inputs.
  const Eigen::ArrayXXd ca = a.array().cos(), sa = a.array().sin();
  const Eigen::ArrayXXd cb = b.array().cos(), sb = b.array().sin();
  const double norm = 1.0 / (1.0 + p.gamma_sq);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double v = p.sigma0_sq;
      for (Eigen::Index d = 0; d < a.cols(); ++d)
        v *= (p.gamma_sq + ca(i, d) * cb(j, d) + sa(i, d) * sb(j, d)) * norm;
      k(i, j) = v;
    }
  }
  return k;
}

Eigen::VectorXd GpModel::targets() const {
  return (std_targets_.array() * scaling_.scale + scaling_.offset).matrix();
}

double GpModel::log_marginal_likelihood() const {
  const auto n = static_cast<double>(std_targets_.size());
  if (std_targets_.size() == 0) return 0.0;
  return -0.5 * std_targets_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const KernelParams& params,
            const TargetScaling& scaling) {
  params.validate();
  check_scaling(scaling);
  if (inputs.rows() != targets.size()) throw ValidationError("gp::fit: inputs and targets differ in length");
  if (!targets.allFinite()) throw ValidationError("gp::fit: targets must be finite");

  GpModel m;
  m.inputs_ = inputs;
  m.params_ = params;
  m.scaling_ = scaling;
  m.std_targets_ = ((targets.array() - scaling.offset) / scaling.scale).matrix();
  m.shift_ = std::max(params.noise_var, kNoiseFloor);

  const Eigen::MatrixXd k = kernel_matrix(inputs, inputs, params);
  const auto n = inputs.rows();
  auto l = try_cholesky(k + m.shift_ * Eigen::MatrixXd::Identity(n, n));
  if (!l) {
    m.shift_ += 1e-8 * params.sigma0_sq;
    l = try_cholesky(k + m.shift_ * Eigen::MatrixXd::Identity(n, n));
    if (!l) throw ComputeError("gp::fit: kernel matrix is not positive definite even after jitter");
  }
  m.chol_ = std::move(*l);
  m.alpha_ = n > 0 ? solve_with_cholesky(m.chol_, m.std_targets_) : Eigen::VectorXd();
  return m;
}

GpModel extend(const GpModel& model, const Eigen::MatrixXd& new_inputs, const Eigen::VectorXd& new_targets) {
  if (new_inputs.rows() != new_targets.size()) throw ValidationError("gp::extend: inputs and targets differ in length");
  const auto n = model.inputs_.rows();
  const auto k = new_inputs.rows();

  Eigen::MatrixXd inputs(n + k, n > 0 ? model.inputs_.cols() : new_inputs.cols());
  if (n > 0) inputs.topRows(n) = model.inputs_;
  inputs.bottomRows(k) = new_inputs;
  Eigen::VectorXd targets(n + k);
  targets.head(n) = model.targets();
  targets.tail(k) = new_targets;
  if (n == 0 || k == 0) return fit(inputs, targets, model.params_, model.scaling_);
  if (new_inputs.cols() != model.inputs_.cols()) throw ValidationError("gp::extend: input dimension mismatch");

  // [L 0; B^T C] with B = L^{-1} K(old, new), C C^T = K(new, new) + s I - B^T B.
  const Eigen::MatrixXd cross = kernel_matrix(model.inputs_, new_inputs, model.params_);
  const Eigen::MatrixXd b = model.chol_.triangularView<Eigen::Lower>().solve(cross);
  Eigen::MatrixXd schur = kernel_matrix(new_inputs, new_inputs, model.params_) - b.transpose() * b;
  schur.diagonal().array() += model.shift_;
  auto c = try_cholesky(schur);
  if (!c) {
    // Fall back to a fresh factorization, which owns the jitter policy.
    KernelParams p = model.params_;
    p.noise_var = model.shift_;
    return fit(inputs, targets, p, model.scaling_);
  }

  GpModel m;
  m.inputs_ = std::move(inputs);
  m.params_ = model.params_;
  m.scaling_ = model.scaling_;
  m.shift_ = model.shift_;
  m.std_targets_ = ((targets.array() - m.scaling_.offset) / m.scaling_.scale).matrix();
  m.chol_ = Eigen::MatrixXd::Zero(n + k, n + k);
  m.chol_.topLeftCorner(n, n) = model.chol_;
  m.chol_.bottomLeftCorner(k, n) = b.transpose();
  m.chol_.bottomRightCorner(k, k) = *c;
  m.alpha_ = solve_with_cholesky(m.chol_, m.std_targets_);
  return m;
}

Eigen::VectorXd posterior_mean(const GpModel& model, const Eigen::MatrixXd& test_inputs) {
  const auto& s = model.scaling();
  if (model.num_points() == 0) return Eigen::VectorXd::Constant(test_inputs.rows(), s.offset);
  const Eigen::MatrixXd cross = kernel_matrix(model.inputs(), test_inputs, model.params());
  return ((cross.transpose() * model.alpha()).array() * s.scale + s.offset).matrix();
}

Posterior posterior(const GpModel& model, const Eigen::MatrixXd& test_inputs) {
  const auto& s = model.scaling();
  Posterior post;
  Eigen::MatrixXd cov = kernel_matrix(test_inputs, test_inputs, model.params());
  if (model.num_points() == 0) {
    post.mean = Eigen::VectorXd::Constant(test_inputs.rows(), s.offset);
  } else {
    const Eigen::MatrixXd cross = kernel_matrix(model.inputs(), test_inputs, model.params());
    const Eigen::MatrixXd v = model.cholesky().triangularView<Eigen::Lower>().solve(cross);
    post.mean = ((cross.transpose() * model.alpha()).array() * s.scale + s.offset).matrix();
    cov.noalias() -= v.transpose() * v;
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
  cov.diagonal() = cov.diagonal().cwiseMax(0.0);
  post.cov = cov * (s.scale * s.scale);
  return post;
}

KernelParams select_hyperparams(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                std::span<const KernelParams> candidates, const TargetScaling& scaling) {
  if (candidates.empty()) throw ValidationError("select_hyperparams: candidate grid is empty");
  std::optional<KernelParams> best;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    double lml = 0.0;
    try {
      lml = fit(inputs, targets, c, scaling).log_marginal_likelihood();
    } catch (const ComputeError&) {
      continue;
    }
    if (!std::isfinite(lml)) continue;
    const bool better =
        !best || lml > best_lml ||
        (lml == best_lml && (c.gamma_sq < best->gamma_sq ||
                             (c.gamma_sq == best->gamma_sq && c.sigma0_sq < best->sigma0_sq)));
    if (better) {
      best = c;
      best_lml = lml;
    }
  }
  if (!best) throw ComputeError("select_hyperparams: every candidate failed to factorize");
  return *best;
}

}  // namespace vqesmo::gp
