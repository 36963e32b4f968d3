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
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vqesmo/hamiltonian.hpp"
#include "vqesmo/noise.hpp"
#include "vqesmo/rng.hpp"

namespace vqesmo {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any finite angle into [0, 2*pi).
double wrap_angle(double angle);

/// Circuit parameters, each wrapped into [0, 2*pi).
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(Eigen::VectorXd angles);

  static ParamVector zeros(int size) { return ParamVector(Eigen::VectorXd::Zero(size)); }
  static ParamVector uniform(int size, Rng& rng);

  int size() const { return static_cast<int>(angles_.size()); }
  double operator[](int d) const { return angles_[d]; }
  const Eigen::VectorXd& angles() const { return angles_; }

  /// Copy with coordinate `d` replaced by `angle`.
  ParamVector with(int d, double angle) const;

  friend bool operator==(const ParamVector& a, const ParamVector& b) { return a.angles_ == b.angles_; }

 private:
  Eigen::VectorXd angles_;
};

enum class GateKind : std::uint8_t { RY, RZ, CX };

struct Gate {
  GateKind kind;
  int target;
  int control = -1;  // CX only
  int param = -1;    // rotations only
};

/// EfficientSU2 layout: L + 1 blocks of (RY on every qubit, RZ on every
/// qubit), separated by a full CX layer over all pairs i < j (control i).
/// No entangler follows the last block.
class Ansatz {
 public:
  Ansatz(int num_qubits, int num_layers);

  int num_qubits() const { return num_qubits_; }
  int num_layers() const { return num_layers_; }
  int num_params() const { return 2 * (num_layers_ + 1) * num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }

 private:
  int num_qubits_;
  int num_layers_;
  std::vector<Gate> gates_;
};

inline Ansatz build_ansatz(int num_qubits, int num_layers) { return Ansatz(num_qubits, num_layers); }

struct StateVector {
  Eigen::VectorXcd amplitudes;
  int num_qubits() const;
};

struct DensityMatrix {
  Eigen::MatrixXcd entries;
  int num_qubits() const;
};

using QuantumState = std::variant<StateVector, DensityMatrix>;

inline constexpr int kMaxDensityQubits = 10;

/// |psi(theta)> = U(theta)|0...0> with R_P(t) = exp(-i t P / 2).
StateVector prepare_state(const Ansatz& ansatz, const ParamVector& theta);

/// Noisy circuit: depolarizing p1 after each rotation, p2 after each CX, then
/// the global channel rho -> (1-g) rho + g I / 2^Q.
DensityMatrix prepare_density(const Ansatz& ansatz, const ParamVector& theta, const NoiseModel& noise);

/// Re <psi|H|psi>, evaluated term by term.
double expectation(const StateVector& state, const Hamiltonian& h);
/// Tr(rho H).
double expectation(const DensityMatrix& rho, const Hamiltonian& h);

/// Noiseless energy E*(theta).
double exact_energy(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h);

double fidelity(const StateVector& state, const GroundTruth& ground);
double fidelity(const DensityMatrix& rho, const GroundTruth& ground);

/// Outcome distribution after rotating every qubit into `basis` (H for X,
/// S^dagger then H for Y). Tiny negative entries are clipped and the vector
/// renormalized; anything below -1e-9 is an error.
Eigen::VectorXd basis_distribution(const QuantumState& state, const std::vector<Pauli>& basis);

/// Applies the readout channel bit by bit to an outcome distribution.
Eigen::VectorXd apply_readout_channel(const Eigen::VectorXd& probs, int num_qubits, double p01, double p10);

/// Draws `shots` outcomes (basis indices) from `probs` and passes each one
/// through the readout channel of `noise`.
std::vector<std::uint64_t> sample_outcomes(const Eigen::VectorXd& probs, int num_qubits, int shots,
                                           const NoiseModel& noise, Rng& rng);

/// Flips each bit of `bits` with the readout probabilities of `noise`.
std::uint64_t apply_readout_flips(std::uint64_t bits, int num_qubits, const NoiseModel& noise, Rng& rng);

/// Bitstring histogram, one character per qubit in big-endian order.
std::map<std::string, int> sample_counts(const QuantumState& state, const MeasurementGroup& group, int shots,
                                         const NoiseModel& noise, Rng& rng);

std::string bitstring(std::uint64_t bits, int num_qubits);

/// Total number of shots drawn by sample_outcomes on the calling thread.
std::uint64_t shots_sampled_on_this_thread();

}  // namespace vqesmo
