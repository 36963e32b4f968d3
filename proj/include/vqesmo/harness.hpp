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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqesmo/hamiltonian.hpp"
#include "vqesmo/measurement.hpp"
#include "vqesmo/noise.hpp"
#include "vqesmo/optimize.hpp"

namespace vqesmo::harness {

/// One benchmark experiment: problem, algorithm, budget and the seeds to run.
struct ExperimentConfig {
  int qubits = 5;
  int layers = 3;
  std::array<double, 3> coupling = {-1.0, 0.0, 0.0};
  std::array<double, 3> field = {0.0, 0.0, -1.0};
  std::optional<Hamiltonian> custom_hamiltonian;  // replaces the Heisenberg chain when set

  opt::Algorithm algorithm = opt::Algorithm::Emicore;
  int budget = 600;
  int shots = 1024;
  bool exact_expectation = false;
  NoiseModel noise;
  MitigationConfig mitigation;
  opt::RunConfig optimizer;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "results";

  Hamiltonian hamiltonian() const;
  ShotCount shot_count() const;
  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Strict parse: unknown fields are errors. Defaults are filled in and the
/// result validated.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Effective configuration with every default spelled out.
nlohmann::json to_json(const ExperimentConfig& config);

opt::Problem make_problem(const ExperimentConfig& config);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<opt::RunRecord> records;
  int measurements_used = 0;
  std::int64_t shots_used = 0;
  std::optional<gp::KernelParams> selected_kernel;
};

/// Runs every seed, in parallel up to `threads` workers (0: VQE_SMO_THREADS or
/// the hardware concurrency). When `seed_csv_dir` is set, each seed streams
/// its rows to seed_<seed>.csv there as they are produced. A seed that throws
/// is reported as failed without affecting the others.
std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config, int threads = 0,
                                        const std::optional<std::filesystem::path>& seed_csv_dir = std::nullopt);

int default_thread_count();

struct Percentiles {
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
};

struct Checkpoint {
  int measurements = 0;
  Percentiles energy;
  Percentiles fidelity;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateCurve {
  std::vector<Checkpoint> checkpoints;
  MeanStd final_energy;
  MeanStd final_fidelity;
  int num_seeds = 0;
};

/// Linear interpolation between order statistics at position p * (n - 1).
double percentile(std::vector<double> values, double p);

/// Checkpoints at every even measurement count up to the longest trace; a
/// seed contributes its latest record at or before each checkpoint. The final
/// summary uses each seed's last record, with the sample standard deviation.
AggregateCurve aggregate(const std::vector<std::vector<opt::RunRecord>>& per_seed);

nlohmann::json to_json(const AggregateCurve& curve);

inline constexpr const char* kCsvHeader = "seed,algorithm,measurements,believed_energy,true_energy,fidelity,wall_ms";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const opt::RunRecord& r);
/// Rows grouped by seed, in order of first appearance.
std::vector<std::vector<opt::RunRecord>> read_csv(std::istream& in);

/// Writes records.csv, seed_<seed>.csv, and aggregate.json (with the effective
/// config embedded) under config.output_dir. Returns the aggregate JSON.
nlohmann::json run_and_write(const ExperimentConfig& config, int threads = 0);

/// Command-line entry point. Exit codes: 0 success, 1 validation error,
/// 2 runtime failure.
int cli(int argc, char** argv);

}  // namespace vqesmo::harness
