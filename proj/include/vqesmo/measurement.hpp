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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqesmo/hamiltonian.hpp"
#include "vqesmo/noise.hpp"
#include "vqesmo/rng.hpp"
#include "vqesmo/simulator.hpp"

namespace vqesmo {

/// Shots per measurement group, or the infinite-shot limit. The exact mode has
/// to be requested by name so no benchmark path can fall into it silently.
class ShotCount {
 public:
  static ShotCount finite(int per_group);
  static ShotCount exact_expectation() { return ShotCount(0); }

  bool is_exact() const { return per_group_ == 0; }
  int per_group() const { return per_group_; }

 private:
  explicit ShotCount(int n) : per_group_(n) {}
  int per_group_;
};

/// Noisy energy estimate E~ = E* + eps for one parameter vector.
struct EnergyEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t shots_used = 0;
  int groups = 0;
};

enum class MitigationMode { None, Trex, Zne };

std::string to_string(MitigationMode mode);
MitigationMode parse_mitigation_mode(const std::string& s);

struct MitigationConfig {
  MitigationMode mode = MitigationMode::None;
  std::vector<double> zne_scales = {1.0, 2.0, 3.0};
  int zne_order = 1;
  int trex_randomizations = 0;  // 0: a fresh twirl mask for every shot

  void validate() const;
};

nlohmann::json to_json(const MitigationConfig& config);
MitigationConfig mitigation_from_json(const nlohmann::json& j);

/// TREX refuses to divide by an attenuation factor below this.
inline constexpr double kMinTrexAttenuation = 0.05;

/// Unmitigated estimate: sample every measurement group, read term
/// expectations off the bit parities, and propagate the per-shot spread of
/// each group's energy into the standard error.
EnergyEstimate measure_energy(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h,
                              ShotCount shots, const NoiseModel& noise, Rng& rng);

/// Twirled readout error extinction. Each shot is bracketed by a random X
/// mask, and every term is rescaled by its attenuation factor, which is
/// calibrated on |0...0> and |1...1> with shots_per_group shots each.
EnergyEstimate measure_energy_trex(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h,
                                   ShotCount shots, const NoiseModel& noise, Rng& rng, int randomizations = 0);

/// Zero-noise extrapolation over config.zne_scales with a polynomial of
/// degree config.zne_order, evaluated at zero noise.
EnergyEstimate measure_energy_zne(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h,
                                  ShotCount shots, const NoiseModel& noise, const MitigationConfig& config,
                                  Rng& rng);

/// Dispatches on config.mode.
EnergyEstimate measure(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h, ShotCount shots,
                       const NoiseModel& noise, const MitigationConfig& config, Rng& rng);

/// Weights w with p(0) = sum_i w_i y_i for the least-squares polynomial of
/// degree `order` through (scales_i, y_i).
std::vector<double> extrapolation_weights(const std::vector<double>& scales, int order);

}  // namespace vqesmo
