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
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace vqesmo {

using Complex = std::complex<double>;

// Qubit ordering is big-endian throughout: qubit 0 (written first in a label
// such as "XZI") is the most significant bit of a basis-state index.

enum class Pauli : std::uint8_t { I, X, Y, Z };

char pauli_char(Pauli p);

/// Bit of basis-state index that belongs to `qubit` in a `num_qubits` register.
constexpr std::uint64_t qubit_bit(int qubit, int num_qubits) {
  return std::uint64_t{1} << (num_qubits - 1 - qubit);
}

/// Weighted Pauli string h * P encoded as two bit masks aligned with basis
/// indices. X on a qubit sets its x bit, Z its z bit, Y both.
struct PauliTerm {
  double coeff = 0.0;
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;

  std::uint64_t support() const { return x_mask | z_mask; }
  Pauli at(int qubit, int num_qubits) const;
  std::string label(int num_qubits) const;

  /// Parses one character per qubit from {I, X, Y, Z}.
  static PauliTerm from_label(double coeff, std::string_view label);

  /// Phase picked up by basis state |b> under P: P|b> = phase(b) |b ^ x_mask>.
  Complex phase(std::uint64_t basis) const;
};

/// H = sum_a h_a P_a. Construction merges repeated strings (summing their
/// coefficients) and drops zero terms; at least one term must survive.
class Hamiltonian {
 public:
  Hamiltonian(int num_qubits, std::vector<PauliTerm> terms);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return std::size_t{1} << num_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Tr(H) / 2^Q, i.e. the coefficient of the identity string.
  double mean_eigenvalue() const;

  /// y = H x without building the dense matrix.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

 private:
  int num_qubits_;
  std::vector<PauliTerm> terms_;
};

/// Open-boundary Heisenberg chain
///   H = -[ sum_j (Jx XX + Jy YY + Jz ZZ)_{j,j+1} + sum_j (hx X + hy Y + hz Z)_j ]
/// with the overall minus sign folded into the stored coefficients.
Hamiltonian build_heisenberg(int num_qubits, const std::array<double, 3>& coupling,
                             const std::array<double, 3>& field);

/// Transverse-field Ising chain at criticality: (Jx, hz) = (-1, -1).
Hamiltonian build_critical_ising(int num_qubits);

inline constexpr int kMaxDenseQubits = 14;
inline constexpr int kMaxFullDiagonalizationQubits = 10;

Eigen::MatrixXcd to_dense(const Hamiltonian& h);

struct GroundTruth {
  double energy = 0.0;
  Eigen::VectorXcd state;
};

struct LanczosOptions {
  int max_iterations = 400;
  double tolerance = 1e-10;
  std::uint64_t seed = 12345;
};

/// Minimal eigenpair. Uses a full Hermitian eigensolve up to
/// kMaxFullDiagonalizationQubits and Lanczos above.
GroundTruth ground_state(const Hamiltonian& h);
GroundTruth ground_state_dense(const Hamiltonian& h);
GroundTruth ground_state_lanczos(const Hamiltonian& h, const LanczosOptions& options = {});

/// Qubit-wise commuting set of terms measured together in one basis.
struct MeasurementGroup {
  std::vector<Pauli> basis;  // X, Y or Z per qubit
  std::vector<std::size_t> member_terms;
};

/// Greedy first-fit partition in stored term order. Qubits no member term
/// constrains are measured in Z.
std::vector<MeasurementGroup> group_terms(const Hamiltonian& h);

// {"qubits": 5, "terms": [{"coeff": 1.0, "paulis": "XXIII"}, ...]}
nlohmann::json to_json(const Hamiltonian& h);
Hamiltonian hamiltonian_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GroundTruth& g);

}  // namespace vqesmo
