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

#include "vqesmo/optimize.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "vqesmo/error.hpp"

namespace vqesmo::opt {

double CosineFit::operator()(double angle) const { return amplitude * std::cos(angle - phase) + offset; }

CosineFit cosine_fit(const std::array<std::pair<double, double>, 3>& points) {
  Eigen::Matrix3d a;
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    const auto& [angle, value] = points[static_cast<std::size_t>(i)];
    a(i, 0) = std::cos(angle);
    a(i, 1) = std::sin(angle);
    a(i, 2) = 1.0;
    v[i] = value;
  }
  if (std::abs(a.determinant()) < 1e-12)
    throw ValidationError("cosine_fit: sample angles must be pairwise distinct modulo 2pi");
  const Eigen::Vector3d c = a.partialPivLu().solve(v);
  CosineFit fit;
  fit.amplitude = std::hypot(c[0], c[1]);
  fit.phase = wrap_angle(std::atan2(c[1], c[0]));
  fit.offset = c[2];
  return fit;
}

double argmin_cosine(const CosineFit& fit, double current_angle) {
  if (fit.amplitude <= 1e-12) return current_angle;
  return wrap_angle(fit.phase + std::numbers::pi);
}

std::string to_string(Algorithm a) { return a == Algorithm::Nft ? "nft" : "emicore"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "nft") return Algorithm::Nft;
  if (s == "emicore") return Algorithm::Emicore;
  throw ValidationError("algorithm must be nft or emicore, got '" + s + "'");
}

namespace {

void require_budget(const OptimizerState& state, int needed) {
  if (state.measurements_used + needed > state.budget)
    throw ValidationError("measurement budget exhausted (" + std::to_string(state.measurements_used) + " of " +
                          std::to_string(state.budget) + " used)");
}

Eigen::MatrixXd stack_rows(const std::vector<ParamVector>& points) {
  if (points.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = points[i].angles().transpose();
  return m;
}

Eigen::MatrixXd subspace_points(const ParamVector& theta_hat, int direction, const Eigen::VectorXd& angles) {
  Eigen::MatrixXd pts(angles.size(), theta_hat.size());
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    pts.row(i) = theta_hat.angles().transpose();
    pts(i, direction) = angles[i];
  }
  return pts;
}

// Symmetric square root of a PSD matrix with eigenvalues below 1e-12 dropped.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd root = eig.eigenvalues();
  for (Eigen::Index i = 0; i < root.size(); ++i) root[i] = root[i] < 1e-12 ? 0.0 : std::sqrt(root[i]);
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

OptimizerState nft_step(OptimizerState state, const MeasureFn& measure, double shift) {
  require_budget(state, 2);
  const int d = state.direction;
  const double center = state.theta_hat[d];
  const auto lo = measure(state.theta_hat.with(d, center - shift));
  const auto hi = measure(state.theta_hat.with(d, center + shift));
  state.measurements_used += 2;

  const auto fit = cosine_fit({{{center - shift, lo.value}, {center, state.believed_energy}, {center + shift, hi.value}}});
  const double next = argmin_cosine(fit, center);
  state.theta_hat = state.theta_hat.with(d, next);
  state.believed_energy = fit(next);
  state.advance_direction();
  ++state.step;
  return state;
}

CoReGrid build_core(const gp::GpModel& model, const ParamVector& theta_hat, int direction, int grid_size,
                    double kappa_sq) {
  if (grid_size < 3) throw ValidationError("CoRe grid needs at least 3 points");
  if (direction < 0 || direction >= theta_hat.size()) throw ValidationError("CoRe direction out of range");
  CoReGrid grid;
  grid.direction = direction;
  grid.kappa_sq = kappa_sq;
  grid.angles.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) grid.angles[i] = kTwoPi * i / grid_size;
  grid.points = subspace_points(theta_hat, direction, grid.angles);
  const auto post = gp::posterior(model, grid.points);
  grid.variances = post.cov.diagonal();
  grid.member.resize(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) grid.member[static_cast<std::size_t>(i)] = grid.variances[i] <= kappa_sq;
  return grid;
}

AcquisitionContext::AcquisitionContext(const gp::GpModel& model, const CoReGrid& grid,
                                       const Eigen::MatrixXd& extra_points, int num_samples,
                                       double believed_energy, Rng& rng)
    : base_member_(grid.member),
      grid_size_(static_cast<int>(grid.points.rows())),
      kappa_sq_(grid.kappa_sq),
      noise_var_(model.raw_noise_variance()),
      believed_energy_(believed_energy) {
  if (num_samples < 1) throw ValidationError("acquisition needs at least one posterior sample");
  Eigen::MatrixXd pts(grid.points.rows() + extra_points.rows(), grid.points.cols());
  pts.topRows(grid.points.rows()) = grid.points;
  if (extra_points.rows() > 0) pts.bottomRows(extra_points.rows()) = extra_points;
  auto post = gp::posterior(model, pts);
  mean_ = std::move(post.mean);
  cov_ = std::move(post.cov);

  const Eigen::MatrixXd root = psd_sqrt(cov_);
  const auto m = mean_.size();
  Eigen::MatrixXd z(num_samples, m);
  for (int s = 0; s < num_samples; ++s)
    for (Eigen::Index i = 0; i < m; ++i) z(s, i) = rng.normal();
  samples_ = (z * root).rowwise() + mean_.transpose();
}

double AcquisitionContext::score(int i, int j) const {
  const int n = num_points();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw ValidationError("acquisition: invalid pair indices");

  Eigen::Matrix2d pair_cov;
  pair_cov << cov_(i, i) + noise_var_, cov_(i, j), cov_(j, i), cov_(j, j) + noise_var_;
  const Eigen::Matrix2d inv = pair_cov.inverse();

  // Variance after conditioning on noisy observations at i and j. The
  // reduction is a PSD quadratic form; clamping keeps the augmented region a
  // superset of the base region under rounding.
  auto augmented_variance = [&](int g) {
    const Eigen::Vector2d c(cov_(g, i), cov_(g, j));
    return cov_(g, g) - std::max(0.0, c.dot(inv * c));
  };

  std::vector<int> base;
  std::vector<int> augmented;
  for (int g = 0; g < grid_size_; ++g) {
    if (base_member_[static_cast<std::size_t>(g)]) base.push_back(g);
    if (base_member_[static_cast<std::size_t>(g)] || augmented_variance(g) <= kappa_sq_) augmented.push_back(g);
  }
  for (int p : {i, j})
    if (p >= grid_size_ && augmented_variance(p) <= kappa_sq_) augmented.push_back(p);
  if (augmented.empty()) augmented = {i, j};

  double total = 0.0;
  for (Eigen::Index s = 0; s < samples_.rows(); ++s) {
    double base_min = believed_energy_;
    if (!base.empty()) {
      base_min = std::numeric_limits<double>::infinity();
      for (int g : base) base_min = std::min(base_min, samples_(s, g));
    }
    double aug_min = std::numeric_limits<double>::infinity();
    for (int g : augmented) aug_min = std::min(aug_min, samples_(s, g));
    total += std::max(0.0, base_min - aug_min);
  }
  return total / static_cast<double>(samples_.rows()) / 2.0;
}

double emicore_acquisition(const gp::GpModel& model, const CandidatePair& pair, const CoReGrid& grid,
                           int num_samples, double believed_energy, Rng& rng) {
  Eigen::MatrixXd extra(2, pair.first.size());
  extra.row(0) = pair.first.angles().transpose();
  extra.row(1) = pair.second.angles().transpose();
  const AcquisitionContext ctx(model, grid, extra, num_samples, believed_energy, rng);
  const int g = static_cast<int>(grid.points.rows());
  return ctx.score(g, g + 1);
}

CandidatePair select_pair(const gp::GpModel& model, const ParamVector& theta_hat, int direction, int grid_size,
                          double kappa_sq, int num_samples, double believed_energy, Rng& rng) {
  const auto grid = build_core(model, theta_hat, direction, grid_size, kappa_sq);
  const AcquisitionContext ctx(model, grid, Eigen::MatrixXd(), num_samples, believed_energy, rng);
  CandidatePair best;
  best.acquisition = -1.0;
  for (int i = 0; i < grid_size; ++i) {
    for (int j = i + 1; j < grid_size; ++j) {
      const double a = ctx.score(i, j);
      if (a > best.acquisition) {
        best.acquisition = a;
        best.first_index = i;
        best.second_index = j;
      }
    }
  }
  best.first = theta_hat.with(direction, grid.angles[best.first_index]);
  best.second = theta_hat.with(direction, grid.angles[best.second_index]);
  return best;
}

std::pair<OptimizerState, gp::GpModel> emicore_step(OptimizerState state, const gp::GpModel& model,
                                                    const MeasureFn& measure, const EmicoreSettings& settings,
                                                    Rng& rng) {
  require_budget(state, 2);
  const int d = state.direction;
  const auto pair = select_pair(model, state.theta_hat, d, settings.grid_size, settings.kappa_sq,
                                settings.num_samples, state.believed_energy, rng);
  const auto first = measure(pair.first);
  const auto second = measure(pair.second);
  state.measurements_used += 2;

  Eigen::MatrixXd new_inputs(2, state.theta_hat.size());
  new_inputs.row(0) = pair.first.angles().transpose();
  new_inputs.row(1) = pair.second.angles().transpose();
  auto updated = gp::extend(model, new_inputs, Eigen::Vector2d(first.value, second.value));

  const double center = state.theta_hat[d];
  const Eigen::Vector3d angles(center, center + kTwoPi / 3.0, center + 2.0 * kTwoPi / 3.0);
  const Eigen::VectorXd mu = gp::posterior_mean(updated, subspace_points(state.theta_hat, d, angles));
  const auto fit = cosine_fit({{{angles[0], mu[0]}, {angles[1], mu[1]}, {angles[2], mu[2]}}});
  state.theta_hat = state.theta_hat.with(d, argmin_cosine(fit, center));
  state.believed_energy = gp::posterior_mean(updated, state.theta_hat.angles().transpose())[0];
  state.advance_direction();
  ++state.step;
  return {std::move(state), std::move(updated)};
}

void RunConfig::validate() const {
  if (budget < 2) throw ValidationError("budget must be >= 2");
  if (!(nft_shift > 0.0) || !std::isfinite(nft_shift)) throw ValidationError("optimizer.alpha must be positive");
  if (warmup_steps < -1) throw ValidationError("optimizer.warmup_steps must be >= 0 (or -1 for one sweep)");
  if (grid_size < 3) throw ValidationError("optimizer.grid_size must be >= 3");
  if (num_samples < 1) throw ValidationError("optimizer.samples must be >= 1");
  if (!(kappa_factor >= 0.0)) throw ValidationError("optimizer.kappa_factor must be >= 0");
  if (gamma_sq_grid.empty() || sigma0_sq_grid.empty())
    throw ValidationError("optimizer kernel grids must be non-empty");
  for (double g : gamma_sq_grid)
    if (!(g >= 1.0)) throw ValidationError("optimizer.gamma_sq_grid entries must be >= 1");
  for (double s : sigma0_sq_grid)
    if (!(s > 0.0)) throw ValidationError("optimizer.sigma0_sq_grid entries must be > 0");
  if (stabilization_period < 0) throw ValidationError("optimizer.stabilization_period must be >= 0");
}

namespace {

// GP built from every warm-up measurement: targets standardized by their
// sample mean and spread, likelihood variance from the reported standard
// errors, kernel chosen on the configured grid by marginal likelihood.
gp::GpModel initial_model(const std::vector<ParamVector>& points, const std::vector<double>& values,
                          const std::vector<double>& variances, const RunConfig& config) {
  const Eigen::MatrixXd x = stack_rows(points);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  gp::TargetScaling scaling;
  scaling.offset = y.mean();
  const double spread = std::sqrt((y.array() - scaling.offset).square().mean());
  scaling.scale = spread > 1e-12 ? spread : 1.0;

  double noise = 0.0;
  for (double v : variances) noise += v;
  noise /= static_cast<double>(variances.size());
  const double noise_std = noise / (scaling.scale * scaling.scale);

  std::vector<gp::KernelParams> candidates;
  for (double g : config.gamma_sq_grid)
    for (double s : config.sigma0_sq_grid) candidates.push_back({s, g, noise_std});
  const auto params = gp::select_hyperparams(x, y, candidates, scaling);
  return gp::fit(x, y, params, scaling);
}

}  // namespace

RunResult run(Algorithm algorithm, const Problem& problem, const RunConfig& config, std::uint64_t seed,
              const RecordSink& on_record) {
  config.validate();
  const auto& ansatz = problem.ansatz;
  const auto& h = problem.hamiltonian;
  if (ansatz.num_qubits() != h.num_qubits()) throw ValidationError("ansatz/Hamiltonian qubit mismatch");
  const int dim = ansatz.num_params();
  const int warmup = config.warmup_steps < 0 ? dim : config.warmup_steps;
  const auto start = std::chrono::steady_clock::now();

  Rng init_rng = Rng::stream(seed, kInitStream);
  Rng measure_rng = Rng::stream(seed, kMeasureStream);
  Rng acquisition_rng = Rng::stream(seed, kAcquisitionStream);

  RunResult result;
  std::vector<ParamVector> points;
  std::vector<double> values;
  std::vector<double> variances;
  const MeasureFn measure = [&](const ParamVector& theta) {
    auto e = vqesmo::measure(ansatz, theta, h, problem.shots, problem.noise, problem.mitigation, measure_rng);
    points.push_back(theta);
    values.push_back(e.value);
    variances.push_back(e.std_error * e.std_error);
    result.shots_used += e.shots_used;
    return e;
  };

  OptimizerState state;
  state.theta_hat = ParamVector::uniform(dim, init_rng);
  state.budget = config.budget;
  state.believed_energy = measure(state.theta_hat).value;

  auto record = [&] {
    RunRecord r;
    r.seed = seed;
    r.algorithm = algorithm;
    r.step = state.step;
    r.measurements_used = state.measurements_used;
    r.believed_energy = state.believed_energy;
    const auto psi = prepare_state(ansatz, state.theta_hat);
    r.true_energy = expectation(psi, h);
    r.fidelity = fidelity(psi, problem.ground);
    if (config.record_wall_time)
      r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    state.history.push_back(r);
    if (on_record) on_record(r);
  };

  std::optional<gp::GpModel> model;
  EmicoreSettings settings{config.grid_size, config.num_samples, 0.0};
  while (state.measurements_used + 2 <= state.budget) {
    if (algorithm == Algorithm::Nft || state.step < warmup) {
      state = nft_step(std::move(state), measure, config.nft_shift);
      if (algorithm == Algorithm::Nft && config.stabilization_period > 0 &&
          state.step % config.stabilization_period == 0 && state.measurements_used + 1 <= state.budget) {
        state.believed_energy = measure(state.theta_hat).value;
        ++state.measurements_used;
      }
    } else {
      if (!model) {
        model = initial_model(points, values, variances, config);
        settings.kappa_sq = model->raw_noise_variance() * (1.0 + config.kappa_factor);
        result.selected_kernel = model->params();
      }
      auto [next_state, next_model] = emicore_step(std::move(state), *model, measure, settings, acquisition_rng);
      state = std::move(next_state);
      model = std::move(next_model);
    }
    record();
  }

  result.records = std::move(state.history);
  result.final_theta = state.theta_hat;
  result.measurements_used = state.measurements_used;
  return result;
}

}  // namespace vqesmo::opt
