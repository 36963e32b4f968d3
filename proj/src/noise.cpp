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

#include "vqesmo/noise.hpp"

#include <cmath>
#include <string>

#include "vqesmo/error.hpp"

namespace vqesmo {
namespace {

void check_probability(double p, const char* name) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0)
    throw ValidationError(std::string("noise.") + name + " must be a probability in [0, 1], got " +
                          std::to_string(p));
}

}  // namespace

void NoiseModel::validate() const {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  check_probability(readout_01, "readout01");
  check_probability(readout_10, "readout10");
  check_probability(global_depolarizing, "global");
  if (!std::isfinite(scale) || scale <= 0.0) throw ValidationError("noise.scale must be positive");
}

NoiseModel NoiseModel::benchmark_preset() {
  NoiseModel n;
  n.p1 = 0.001;
  n.p2 = 0.01;
  n.readout_01 = 0.02;
  n.readout_10 = 0.02;
  return n;
}

NoiseModel scaled(const NoiseModel& noise, double factor) {
  if (!std::isfinite(factor) || factor < 1.0)
    throw ValidationError("noise scale factor must be >= 1, got " + std::to_string(factor));
  NoiseModel out = noise;
  out.p1 *= factor;
  out.p2 *= factor;
  out.global_depolarizing *= factor;
  out.scale *= factor;
  out.validate();
  return out;
}

nlohmann::json to_json(const NoiseModel& noise) {
  return {{"p1", noise.p1},
          {"p2", noise.p2},
          {"readout01", noise.readout_01},
          {"readout10", noise.readout_10},
          {"global", noise.global_depolarizing}};
}

NoiseModel noise_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("noise: expected a JSON object");
  NoiseModel n;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ValidationError("noise." + key + ": expected a number");
    const double v = value.get<double>();
    if (key == "p1") {
      n.p1 = v;
    } else if (key == "p2") {
      n.p2 = v;
    } else if (key == "readout01") {
      n.readout_01 = v;
    } else if (key == "readout10") {
      n.readout_10 = v;
    } else if (key == "global") {
      n.global_depolarizing = v;
    } else {
      throw ValidationError("noise: unknown field '" + key + "'");
    }
  }
  n.validate();
  return n;
}

}  // namespace vqesmo
