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

#include <json.hpp>

namespace vqesmo {

/// Parameterized hardware noise. Gate channels are depolarizing, readout is an
/// asymmetric classical bit flip.
struct NoiseModel {
  double p1 = 0.0;                   // per rotation gate, on its target
  double p2 = 0.0;                   // per CX, on the (control, target) pair
  double readout_01 = 0.0;           // P(read 1 | true 0)
  double readout_10 = 0.0;           // P(read 0 | true 1)
  double global_depolarizing = 0.0;  // applied once after the circuit
  double scale = 1.0;                // amplification factor applied so far

  /// Throws ValidationError when a probability lies outside [0, 1].
  void validate() const;

  bool has_gate_noise() const { return p1 > 0.0 || p2 > 0.0 || global_depolarizing > 0.0; }
  bool has_readout_noise() const { return readout_01 > 0.0 || readout_10 > 0.0; }
  bool is_noiseless() const { return !has_gate_noise() && !has_readout_noise(); }

  static NoiseModel none() { return {}; }

  /// Benchmark preset: p1 = 1e-3, p2 = 1e-2, symmetric readout 2e-2, g = 0.
  static NoiseModel benchmark_preset();

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Multiplies the gate and global depolarizing rates by `factor` (>= 1).
/// Readout rates are left alone: they belong to TREX, not ZNE.
NoiseModel scaled(const NoiseModel& noise, double factor);

// {"p1": 0.001, "p2": 0.01, "readout01": 0.02, "readout10": 0.02, "global": 0.0}
nlohmann::json to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const nlohmann::json& j);

}  // namespace vqesmo
