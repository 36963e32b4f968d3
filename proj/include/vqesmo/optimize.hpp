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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vqesmo/gp.hpp"
#include "vqesmo/hamiltonian.hpp"
#include "vqesmo/measurement.hpp"
#include "vqesmo/rng.hpp"
#include "vqesmo/simulator.hpp"

namespace vqesmo::opt {

inline constexpr double kDefaultNftShift = std::numbers::pi / 3.0;

/// amplitude * cos(angle - phase) + offset, amplitude >= 0, phase in [0, 2pi).
struct CosineFit {
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;

  double operator()(double angle) const;
};

/// Exact sinusoid through three (angle, value) points. Throws ValidationError
/// when the angles do not determine the fit (coincident modulo 2pi).
CosineFit cosine_fit(const std::array<std::pair<double, double>, 3>& points);

/// phase + pi, or `current_angle` when the fit is flat (amplitude <= 1e-12).
double argmin_cosine(const CosineFit& fit, double current_angle);

enum class Algorithm { Nft, Emicore };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

/// One row of an optimization trace.
struct RunRecord {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Nft;
  int step = 0;
  int measurements_used = 0;
  double believed_energy = 0.0;
  double true_energy = 0.0;
  double fidelity = 0.0;
  std::optional<double> wall_ms;
};

struct OptimizerState {
  ParamVector theta_hat;
  double believed_energy = 0.0;
  int direction = 0;  // 0-based coordinate updated next
  int step = 0;
  int measurements_used = 0;
  int budget = 0;
  std::vector<RunRecord> history;

  void advance_direction() { direction = (direction + 1) % theta_hat.size(); }
};

using MeasureFn = std::function<EnergyEstimate(const ParamVector&)>;

/// Fixed-shift NFT update along state.direction: measures theta_hat -/+ shift,
/// fits a sinusoid through those and the believed center value, and jumps to
/// its minimum. Advances direction and step; does not touch history.
OptimizerState nft_step(OptimizerState state, const MeasureFn& measure, double shift = kDefaultNftShift);

/// Confident region on an equally spaced grid along one coordinate.
struct CoReGrid {
  int direction = 0;
  Eigen::VectorXd angles;     // 2 pi i / G
  Eigen::MatrixXd points;     // theta_hat with coordinate `direction` set to angles[i], one per row
  Eigen::VectorXd variances;  // posterior variance at each grid point
  std::vector<bool> member;   // variance <= kappa_sq
  double kappa_sq = 0.0;
};

CoReGrid build_core(const gp::GpModel& model, const ParamVector& theta_hat, int direction, int grid_size,
                    double kappa_sq);

struct CandidatePair {
  ParamVector first;
  ParamVector second;
  double acquisition = 0.0;
  int first_index = -1;  // grid indices when the pair was drawn from the grid
  int second_index = -1;
};

/// Joint posterior over the grid (and optional extra points), with a shared
/// set of posterior samples. Scoring many pairs against one context reuses
/// the samples, which is what makes the pair comparison consistent.
class AcquisitionContext {
 public:
  AcquisitionContext(const gp::GpModel& model, const CoReGrid& grid, const Eigen::MatrixXd& extra_points,
                     int num_samples, double believed_energy, Rng& rng);

  /// EMICoRe score of measuring points i and j (indices into grid points
  /// followed by extra points).
  double score(int i, int j) const;

  int num_points() const { return static_cast<int>(mean_.size()); }
  const Eigen::MatrixXd& samples() const { return samples_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd samples_;  // one joint draw per row
  std::vector<bool> base_member_;
  int grid_size_;
  double kappa_sq_;
  double noise_var_;
  double believed_energy_;
};

/// Monte-Carlo EMICoRe acquisition for measuring the two points of `pair`.
double emicore_acquisition(const gp::GpModel& model, const CandidatePair& pair, const CoReGrid& grid,
                           int num_samples, double believed_energy, Rng& rng);

/// Best pair among all G(G-1)/2 distinct grid pairs, scored on one shared
/// sample set. Ties go to the smaller first index, then the smaller second.
CandidatePair select_pair(const gp::GpModel& model, const ParamVector& theta_hat, int direction, int grid_size,
                          double kappa_sq, int num_samples, double believed_energy, Rng& rng);

struct EmicoreSettings {
  int grid_size = 16;
  int num_samples = 100;
  double kappa_sq = 0.0;  // raw energy units
};

/// EMICoRe update: choose a pair by acquisition, measure it, extend the GP,
/// fit a sinusoid through the posterior mean at three equidistant angles, and
/// move to its minimum. believed_energy becomes the posterior mean there.
std::pair<OptimizerState, gp::GpModel> emicore_step(OptimizerState state, const gp::GpModel& model,
                                                    const MeasureFn& measure, const EmicoreSettings& settings,
                                                    Rng& rng);

/// Everything fixed about the problem being optimized.
struct Problem {
  Hamiltonian hamiltonian;
  Ansatz ansatz;
  GroundTruth ground;
  ShotCount shots = ShotCount::exact_expectation();
  NoiseModel noise;
  MitigationConfig mitigation;

  Problem(Hamiltonian h, Ansatz a, GroundTruth g) : hamiltonian(std::move(h)), ansatz(a), ground(std::move(g)) {}
};

struct RunConfig {
  int budget = 600;
  double nft_shift = kDefaultNftShift;
  int warmup_steps = -1;  // -1: one sweep over all parameters
  int grid_size = 16;
  int num_samples = 100;
  double kappa_factor = 0.1;  // kappa^2 = noise variance * (1 + kappa_factor)
  std::vector<double> gamma_sq_grid = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> sigma0_sq_grid = {1.0};
  int stabilization_period = 0;  // NFT re-measures theta_hat every this many steps; 0 disables
  bool record_wall_time = false;

  void validate() const;
};

/// Full optimization from a seeded random start. The starting point is
/// measured once to seed the believed energy; that measurement is not charged
/// to the budget, so an even budget runs exactly budget / 2 steps. Every
/// budget charge is a call to measure().
struct RunResult {
  std::vector<RunRecord> records;
  ParamVector final_theta;
  int measurements_used = 0;
  std::int64_t shots_used = 0;
  std::optional<gp::KernelParams> selected_kernel;  // EMICoRe only
};

using RecordSink = std::function<void(const RunRecord&)>;

RunResult run(Algorithm algorithm, const Problem& problem, const RunConfig& config, std::uint64_t seed,
              const RecordSink& on_record = {});

}  // namespace vqesmo::opt
