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

#include "vqesmo/measurement.hpp"

#include <bit>
#include <cmath>

#include "vqesmo/error.hpp"

namespace vqesmo {
namespace {

double parity_sign(std::uint64_t bits, std::uint64_t support) {
  return (std::popcount(bits & support) & 1) ? -1.0 : 1.0;
}

QuantumState prepare(const Ansatz& ansatz, const ParamVector& theta, const NoiseModel& noise) {
  if (noise.has_gate_noise()) return prepare_density(ansatz, theta, noise);
  return prepare_state(ansatz, theta);
}

void check_inputs(const Ansatz& ansatz, const Hamiltonian& h, const NoiseModel& noise) {
  if (ansatz.num_qubits() != h.num_qubits()) throw ValidationError("ansatz/Hamiltonian qubit mismatch");
  noise.validate();
}

// Sum over groups of (mean, variance of the mean) for per-outcome group values.
struct GroupAccumulator {
  double value = 0.0;
  double variance = 0.0;

  // `counts` is a histogram over outcomes, `outcome_value` the group energy
  // read off one outcome.
  template <typename F>
  void add_histogram(const std::vector<int>& counts, int shots, F&& outcome_value) {
    double mean = 0.0;
    for (std::size_t r = 0; r < counts.size(); ++r)
      if (counts[r]) mean += counts[r] * outcome_value(static_cast<std::uint64_t>(r));
    mean /= shots;
    double ss = 0.0;
    for (std::size_t r = 0; r < counts.size(); ++r) {
      if (!counts[r]) continue;
      const double dv = outcome_value(static_cast<std::uint64_t>(r)) - mean;
      ss += counts[r] * dv * dv;
    }
    value += mean;
    if (shots > 1) variance += ss / (shots - 1) / shots;
  }
};

std::vector<int> histogram(const std::vector<std::uint64_t>& outcomes, std::size_t dim) {
  std::vector<int> counts(dim, 0);
  for (auto o : outcomes) ++counts[o];
  return counts;
}

Eigen::VectorXd point_distribution(std::size_t dim, std::uint64_t index) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  p[static_cast<Eigen::Index>(index)] = 1.0;
  return p;
}

}  // namespace

ShotCount ShotCount::finite(int per_group) {
  if (per_group < 1) throw ValidationError("shots per group must be >= 1");
  return ShotCount(per_group);
}

std::string to_string(MitigationMode mode) {
  switch (mode) {
    case MitigationMode::None:
      return "none";
    case MitigationMode::Trex:
      return "trex";
    case MitigationMode::Zne:
      return "zne";
  }
  return "none";
}

MitigationMode parse_mitigation_mode(const std::string& s) {
  if (s == "none") return MitigationMode::None;
  if (s == "trex") return MitigationMode::Trex;
  if (s == "zne") return MitigationMode::Zne;
  throw ValidationError("mitigation mode must be one of none|trex|zne, got '" + s + "'");
}

void MitigationConfig::validate() const {
  if (zne_scales.empty() || zne_scales.front() != 1.0)
    throw ValidationError("mitigation.zne_scales must start at 1");
  for (std::size_t i = 1; i < zne_scales.size(); ++i)
    if (!(zne_scales[i] > zne_scales[i - 1]))
      throw ValidationError("mitigation.zne_scales must be strictly increasing");
  if (zne_order < 1 || static_cast<std::size_t>(zne_order) >= zne_scales.size())
    throw ValidationError("mitigation.zne_order must be >= 1 and smaller than the number of scales");
  if (trex_randomizations < 0) throw ValidationError("mitigation.trex_randomizations must be >= 0");
}

nlohmann::json to_json(const MitigationConfig& config) {
  return {{"mode", to_string(config.mode)},
          {"zne_scales", config.zne_scales},
          {"zne_order", config.zne_order},
          {"trex_randomizations", config.trex_randomizations}};
}

MitigationConfig mitigation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("mitigation: expected a JSON object");
  MitigationConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") {
      if (!value.is_string()) throw ValidationError("mitigation.mode: expected a string");
      c.mode = parse_mitigation_mode(value.get<std::string>());
    } else if (key == "zne_scales") {
      if (!value.is_array()) throw ValidationError("mitigation.zne_scales: expected an array of numbers");
      c.zne_scales.clear();
      for (const auto& s : value) {
        if (!s.is_number()) throw ValidationError("mitigation.zne_scales: expected numbers");
        c.zne_scales.push_back(s.get<double>());
      }
    } else if (key == "zne_order") {
      if (!value.is_number_integer()) throw ValidationError("mitigation.zne_order: expected an integer");
      c.zne_order = value.get<int>();
    } else if (key == "trex_randomizations") {
      if (!value.is_number_integer()) throw ValidationError("mitigation.trex_randomizations: expected an integer");
      c.trex_randomizations = value.get<int>();
    } else {
      throw ValidationError("mitigation: unknown field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

EnergyEstimate measure_energy(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h,
                              ShotCount shots, const NoiseModel& noise, Rng& rng) {
  check_inputs(ansatz, h, noise);
  const int n = h.num_qubits();
  const auto groups = group_terms(h);
  const auto state = prepare(ansatz, theta, noise);
  const auto& terms = h.terms();

  EnergyEstimate est;
  est.groups = static_cast<int>(groups.size());
  GroupAccumulator acc;
  for (const auto& g : groups) {
    const auto probs = basis_distribution(state, g.basis);
    auto outcome_value = [&](std::uint64_t r) {
      double v = 0.0;
      for (auto idx : g.member_terms) v += terms[idx].coeff * parity_sign(r, terms[idx].support());
      return v;
    };
    if (shots.is_exact()) {
      const auto read = apply_readout_channel(probs, n, noise.readout_01, noise.readout_10);
      for (Eigen::Index r = 0; r < read.size(); ++r) acc.value += read[r] * outcome_value(static_cast<std::uint64_t>(r));
    } else {
      const auto outcomes = sample_outcomes(probs, n, shots.per_group(), noise, rng);
      acc.add_histogram(histogram(outcomes, h.dimension()), shots.per_group(), outcome_value);
      est.shots_used += shots.per_group();
    }
  }
  est.value = acc.value;
  est.std_error = std::sqrt(acc.variance);
  return est;
}

EnergyEstimate measure_energy_trex(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h,
                                   ShotCount shots, const NoiseModel& noise, Rng& rng, int randomizations) {
  check_inputs(ansatz, h, noise);
  if (randomizations < 0) throw ValidationError("trex randomizations must be >= 0");
  const int n = h.num_qubits();
  const auto dim = h.dimension();
  const std::uint64_t all_ones = dim - 1;
  const auto& terms = h.terms();
  const auto groups = group_terms(h);

  NoiseModel gate_only = noise;
  gate_only.readout_01 = 0.0;
  gate_only.readout_10 = 0.0;

  EnergyEstimate est;
  est.groups = static_cast<int>(groups.size());

  // Twirled readout of a pre-readout outcome.
  std::vector<std::uint64_t> masks;
  if (!shots.is_exact() && randomizations > 0) {
    for (int i = 0; i < randomizations; ++i) masks.push_back(rng.next() & all_ones);
  }
  std::size_t shot_index = 0;
  auto twirled_readout = [&](std::uint64_t b) {
    const std::uint64_t m = masks.empty() ? (rng.next() & all_ones) : masks[shot_index++ % masks.size()];
    return apply_readout_flips(b ^ m, n, noise, rng) ^ m;
  };
  // Averaged over masks the twirled channel is a symmetric flip on every qubit.
  const double p_sym = 0.5 * (noise.readout_01 + noise.readout_10);

  // Attenuation factor per term from the two calibration states.
  std::vector<double> attenuation(terms.size(), 1.0);
  if (shots.is_exact()) {
    const auto zeros = apply_readout_channel(point_distribution(dim, 0), n, p_sym, p_sym);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      double f = 0.0;
      for (Eigen::Index r = 0; r < zeros.size(); ++r)
        f += zeros[r] * parity_sign(static_cast<std::uint64_t>(r), terms[t].support());
      attenuation[t] = f;
    }
  } else {
    std::vector<double> sums(terms.size(), 0.0);
    for (std::uint64_t prepared : {std::uint64_t{0}, all_ones}) {
      const auto outcomes = sample_outcomes(point_distribution(dim, prepared), n, shots.per_group(),
                                            NoiseModel::none(), rng);
      for (auto b : outcomes) {
        const auto r = twirled_readout(b);
        for (std::size_t t = 0; t < terms.size(); ++t)
          sums[t] += parity_sign(r, terms[t].support()) * parity_sign(prepared, terms[t].support());
      }
      est.shots_used += shots.per_group();
    }
    for (std::size_t t = 0; t < terms.size(); ++t) attenuation[t] = sums[t] / (2.0 * shots.per_group());
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (terms[t].support() == 0) {
      attenuation[t] = 1.0;
    } else if (attenuation[t] < kMinTrexAttenuation) {
      throw ComputeError("TREX attenuation factor " + std::to_string(attenuation[t]) + " for term " +
                         terms[t].label(n) + " is below " + std::to_string(kMinTrexAttenuation));
    }
  }

  const auto state = prepare(ansatz, theta, gate_only);
  GroupAccumulator acc;
  for (const auto& g : groups) {
    const auto probs = basis_distribution(state, g.basis);
    auto outcome_value = [&](std::uint64_t r) {
      double v = 0.0;
      for (auto idx : g.member_terms)
        v += terms[idx].coeff * parity_sign(r, terms[idx].support()) / attenuation[idx];
      return v;
    };
    if (shots.is_exact()) {
      const auto read = apply_readout_channel(probs, n, p_sym, p_sym);
      for (Eigen::Index r = 0; r < read.size(); ++r) acc.value += read[r] * outcome_value(static_cast<std::uint64_t>(r));
    } else {
      const auto outcomes = sample_outcomes(probs, n, shots.per_group(), NoiseModel::none(), rng);
      std::vector<int> counts(dim, 0);
      for (auto b : outcomes) ++counts[twirled_readout(b)];
      acc.add_histogram(counts, shots.per_group(), outcome_value);
      est.shots_used += shots.per_group();
    }
  }
  est.value = acc.value;
  est.std_error = std::sqrt(acc.variance);
  return est;
}

std::vector<double> extrapolation_weights(const std::vector<double>& scales, int order) {
  const auto k = static_cast<Eigen::Index>(scales.size());
  if (order < 0 || order >= k) throw ValidationError("extrapolation order must be below the number of scales");
  Eigen::MatrixXd v(k, order + 1);
  for (Eigen::Index i = 0; i < k; ++i)
    for (int p = 0; p <= order; ++p) v(i, p) = std::pow(scales[static_cast<std::size_t>(i)], p);
  // Row 0 of the least-squares solution operator (V^T V)^{-1} V^T.
  const Eigen::MatrixXd solve = v.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(k, k));
  std::vector<double> w(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = solve(0, i);
  return w;
}

EnergyEstimate measure_energy_zne(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h,
                                  ShotCount shots, const NoiseModel& noise, const MitigationConfig& config,
                                  Rng& rng) {
  config.validate();
  if (noise.scale != 1.0) throw ValidationError("ZNE expects an unscaled noise model");
  const auto weights = extrapolation_weights(config.zne_scales, config.zne_order);
  EnergyEstimate est;
  double variance = 0.0;
  for (std::size_t i = 0; i < config.zne_scales.size(); ++i) {
    const auto e = measure_energy(ansatz, theta, h, shots, scaled(noise, config.zne_scales[i]), rng);
    est.value += weights[i] * e.value;
    variance += weights[i] * weights[i] * e.std_error * e.std_error;
    est.shots_used += e.shots_used;
    est.groups = e.groups;
  }
  est.std_error = std::sqrt(variance);
  return est;
}

EnergyEstimate measure(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h, ShotCount shots,
                       const NoiseModel& noise, const MitigationConfig& config, Rng& rng) {
  switch (config.mode) {
    case MitigationMode::None:
      return measure_energy(ansatz, theta, h, shots, noise, rng);
    case MitigationMode::Trex:
      return measure_energy_trex(ansatz, theta, h, shots, noise, rng, config.trex_randomizations);
    case MitigationMode::Zne:
      return measure_energy_zne(ansatz, theta, h, shots, noise, config, rng);
  }
  throw ValidationError("unknown mitigation mode");
}

}  // namespace vqesmo
