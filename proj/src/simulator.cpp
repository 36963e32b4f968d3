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

#include "vqesmo/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "vqesmo/error.hpp"

namespace vqesmo {
namespace {

using Mat2 = Eigen::Matrix2cd;

thread_local std::uint64_t g_shots_sampled = 0;

int qubits_for_dimension(Eigen::Index dim) {
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

Mat2 ry_matrix(double t) {
  const double c = std::cos(0.5 * t);
  const double s = std::sin(0.5 * t);
  Mat2 u;
  u << c, -s, s, c;
  return u;
}

Mat2 rz_matrix(double t) {
  Mat2 u;
  u << std::polar(1.0, -0.5 * t), 0.0, 0.0, std::polar(1.0, 0.5 * t);
  return u;
}

Mat2 basis_change(Pauli p) {
  const double r = 1.0 / std::sqrt(2.0);
  Mat2 u;
  switch (p) {
    case Pauli::X:  // H
      u << r, r, r, -r;
      break;
    case Pauli::Y:  // H S^dagger
      u << r, Complex(0, -r), r, Complex(0, r);
      break;
    default:
      u = Mat2::Identity();
  }
  return u;
}

// Applies a single-qubit unitary to every column of `m` (i.e. m <- U m).
template <typename Derived>
void apply_1q(Eigen::MatrixBase<Derived>& m, const Mat2& u, std::uint64_t bit) {
  const auto dim = static_cast<std::uint64_t>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::uint64_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const auto i0 = static_cast<Eigen::Index>(i);
      const auto i1 = static_cast<Eigen::Index>(i | bit);
      const Complex a0 = m(i0, c);
      const Complex a1 = m(i1, c);
      m(i0, c) = u(0, 0) * a0 + u(0, 1) * a1;
      m(i1, c) = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
}

template <typename Derived>
void apply_cx(Eigen::MatrixBase<Derived>& m, std::uint64_t control, std::uint64_t target) {
  const auto dim = static_cast<std::uint64_t>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::uint64_t i = 0; i < dim; ++i) {
      if ((i & control) && !(i & target)) {
        std::swap(m(static_cast<Eigen::Index>(i), c), m(static_cast<Eigen::Index>(i | target), c));
      }
    }
  }
}

// rho <- U rho U^dagger, computed as U (U rho)^dagger for Hermitian rho.
template <typename Op>
void conjugate(Eigen::MatrixXcd& rho, Op&& op) {
  op(rho);
  rho.adjointInPlace();
  op(rho);
}

// rho <- (1 - p) rho + p / 4^k sum_P P rho P over Paulis P on `qubit_bits`.
void depolarize(Eigen::MatrixXcd& rho, const std::vector<std::uint64_t>& qubit_bits, double p) {
  if (p <= 0.0) return;
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  const std::size_t k = qubit_bits.size();
  const std::size_t num_paulis = std::size_t{1} << (2 * k);
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (std::size_t code = 0; code < num_paulis; ++code) {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (std::size_t q = 0; q < k; ++q) {
      const auto digit = (code >> (2 * q)) & 3U;  // 0=I 1=X 2=Y 3=Z
      if (digit == 1 || digit == 2) x |= qubit_bits[q];
      if (digit == 2 || digit == 3) z |= qubit_bits[q];
    }
    // (P rho P)[a, b] = (-1)^{|a&z| + |b&z|} rho[a^x, b^x]
    for (std::uint64_t b = 0; b < dim; ++b) {
      const int sb = std::popcount(b & z);
      for (std::uint64_t a = 0; a < dim; ++a) {
        const double sign = ((std::popcount(a & z) + sb) & 1) ? -1.0 : 1.0;
        avg(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            sign * rho(static_cast<Eigen::Index>(a ^ x), static_cast<Eigen::Index>(b ^ x));
      }
    }
  }
  rho = (1.0 - p) * rho + (p / static_cast<double>(num_paulis)) * avg;
}

Eigen::VectorXd clip_distribution(Eigen::VectorXd probs) {
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] < -1e-9) throw ComputeError("outcome distribution has a negative entry " + std::to_string(probs[i]));
    if (probs[i] < 0.0) probs[i] = 0.0;
  }
  const double total = probs.sum();
  if (!(total > 0.0)) throw ComputeError("outcome distribution has zero mass");
  return probs / total;
}

}  // namespace

double wrap_angle(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

ParamVector::ParamVector(Eigen::VectorXd angles) : angles_(std::move(angles)) {
  for (Eigen::Index i = 0; i < angles_.size(); ++i) {
    if (!std::isfinite(angles_[i])) throw ValidationError("parameter angles must be finite");
    angles_[i] = wrap_angle(angles_[i]);
  }
}

ParamVector ParamVector::uniform(int size, Rng& rng) {
  Eigen::VectorXd a(size);
  for (int i = 0; i < size; ++i) a[i] = kTwoPi * rng.uniform();
  return ParamVector(std::move(a));
}

ParamVector ParamVector::with(int d, double angle) const {
  ParamVector out = *this;
  out.angles_[d] = wrap_angle(angle);
  return out;
}

Ansatz::Ansatz(int num_qubits, int num_layers) : num_qubits_(num_qubits), num_layers_(num_layers) {
  if (num_qubits < 1 || num_qubits > 30) throw ValidationError("ansatz qubit count must be in [1, 30]");
  if (num_layers < 0) throw ValidationError("ansatz layer count must be nonnegative");
  // Gates run RY layer then RZ layer; parameters are numbered qubit-major.
  for (int block = 0; block <= num_layers; ++block) {
    const int base = 2 * num_qubits * block;
    for (int q = 0; q < num_qubits; ++q) gates_.push_back({GateKind::RY, q, -1, base + 2 * q});
    for (int q = 0; q < num_qubits; ++q) gates_.push_back({GateKind::RZ, q, -1, base + 2 * q + 1});
    if (block == num_layers) break;
    for (int i = 0; i < num_qubits; ++i)
      for (int j = i + 1; j < num_qubits; ++j) gates_.push_back({GateKind::CX, j, i, -1});
  }
}

int StateVector::num_qubits() const { return qubits_for_dimension(amplitudes.size()); }
int DensityMatrix::num_qubits() const { return qubits_for_dimension(entries.rows()); }

StateVector prepare_state(const Ansatz& ansatz, const ParamVector& theta) {
  if (theta.size() != ansatz.num_params())
    throw ValidationError("parameter vector has " + std::to_string(theta.size()) + " entries, ansatz needs " +
                          std::to_string(ansatz.num_params()));
  const int n = ansatz.num_qubits();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  psi[0] = 1.0;
  for (const auto& g : ansatz.gates()) {
    switch (g.kind) {
      case GateKind::RY:
        apply_1q(psi, ry_matrix(theta[g.param]), qubit_bit(g.target, n));
        break;
      case GateKind::RZ:
        apply_1q(psi, rz_matrix(theta[g.param]), qubit_bit(g.target, n));
        break;
      case GateKind::CX:
        apply_cx(psi, qubit_bit(g.control, n), qubit_bit(g.target, n));
        break;
    }
  }
  return {std::move(psi)};
}

DensityMatrix prepare_density(const Ansatz& ansatz, const ParamVector& theta, const NoiseModel& noise) {
  noise.validate();
  const int n = ansatz.num_qubits();
  if (n > kMaxDensityQubits)
    throw ValidationError("density-matrix simulation limited to " + std::to_string(kMaxDensityQubits) + " qubits");
  if (theta.size() != ansatz.num_params())
    throw ValidationError("parameter vector has " + std::to_string(theta.size()) + " entries, ansatz needs " +
                          std::to_string(ansatz.num_params()));
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (const auto& g : ansatz.gates()) {
    const auto target = qubit_bit(g.target, n);
    switch (g.kind) {
      case GateKind::RY:
      case GateKind::RZ: {
        const Mat2 u = g.kind == GateKind::RY ? ry_matrix(theta[g.param]) : rz_matrix(theta[g.param]);
        conjugate(rho, [&](Eigen::MatrixXcd& m) { apply_1q(m, u, target); });
        depolarize(rho, {target}, noise.p1);
        break;
      }
      case GateKind::CX: {
        const auto control = qubit_bit(g.control, n);
        conjugate(rho, [&](Eigen::MatrixXcd& m) { apply_cx(m, control, target); });
        depolarize(rho, {control, target}, noise.p2);
        break;
      }
    }
  }
  if (noise.global_depolarizing > 0.0) {
    const double g = noise.global_depolarizing;
    rho *= (1.0 - g);
    rho.diagonal().array() += g / static_cast<double>(dim);
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {std::move(rho)};
}

double expectation(const StateVector& state, const Hamiltonian& h) {
  const auto& psi = state.amplitudes;
  if (static_cast<std::size_t>(psi.size()) != h.dimension()) throw ValidationError("state/Hamiltonian size mismatch");
  double e = 0.0;
  for (const auto& t : h.terms()) {
    Complex acc = 0.0;
    for (std::uint64_t b = 0; b < h.dimension(); ++b)
      acc += std::conj(psi[static_cast<Eigen::Index>(b ^ t.x_mask)]) * t.phase(b) * psi[static_cast<Eigen::Index>(b)];
    e += t.coeff * acc.real();
  }
  return e;
}

double expectation(const DensityMatrix& rho, const Hamiltonian& h) {
  const auto& m = rho.entries;
  if (static_cast<std::size_t>(m.rows()) != h.dimension()) throw ValidationError("state/Hamiltonian size mismatch");
  double e = 0.0;
  for (const auto& t : h.terms()) {
    // Tr(rho P) = sum_b phase(b) rho[b ^ x, b]
    Complex acc = 0.0;
    for (std::uint64_t b = 0; b < h.dimension(); ++b)
      acc += t.phase(b) * m(static_cast<Eigen::Index>(b ^ t.x_mask), static_cast<Eigen::Index>(b));
    e += t.coeff * acc.real();
  }
  return e;
}

double exact_energy(const Ansatz& ansatz, const ParamVector& theta, const Hamiltonian& h) {
  if (ansatz.num_qubits() != h.num_qubits()) throw ValidationError("ansatz/Hamiltonian qubit mismatch");
  return expectation(prepare_state(ansatz, theta), h);
}

double fidelity(const StateVector& state, const GroundTruth& ground) {
  if (state.amplitudes.size() != ground.state.size()) throw ValidationError("fidelity: dimension mismatch");
  return std::clamp(std::norm(ground.state.dot(state.amplitudes)), 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const GroundTruth& ground) {
  if (rho.entries.rows() != ground.state.size()) throw ValidationError("fidelity: dimension mismatch");
  return std::clamp(ground.state.dot(rho.entries * ground.state).real(), 0.0, 1.0);
}

Eigen::VectorXd basis_distribution(const QuantumState& state, const std::vector<Pauli>& basis) {
  return std::visit(
      [&](const auto& s) -> Eigen::VectorXd {
        const int n = s.num_qubits();
        if (static_cast<int>(basis.size()) != n) throw ValidationError("measurement basis size mismatch");
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, StateVector>) {
          Eigen::VectorXcd psi = s.amplitudes;
          for (int q = 0; q < n; ++q)
            if (basis[static_cast<std::size_t>(q)] != Pauli::Z)
              apply_1q(psi, basis_change(basis[static_cast<std::size_t>(q)]), qubit_bit(q, n));
          return clip_distribution(psi.cwiseAbs2());
        } else {
          Eigen::MatrixXcd rho = s.entries;
          for (int q = 0; q < n; ++q) {
            if (basis[static_cast<std::size_t>(q)] == Pauli::Z) continue;
            const Mat2 u = basis_change(basis[static_cast<std::size_t>(q)]);
            conjugate(rho, [&](Eigen::MatrixXcd& m) { apply_1q(m, u, qubit_bit(q, n)); });
          }
          return clip_distribution(rho.diagonal().real());
        }
      },
      state);
}

Eigen::VectorXd apply_readout_channel(const Eigen::VectorXd& probs, int num_qubits, double p01, double p10) {
  Eigen::VectorXd out = probs;
  const auto dim = static_cast<std::uint64_t>(probs.size());
  for (int q = 0; q < num_qubits; ++q) {
    const auto bit = qubit_bit(q, num_qubits);
    for (std::uint64_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const double a0 = out[static_cast<Eigen::Index>(i)];
      const double a1 = out[static_cast<Eigen::Index>(i | bit)];
      out[static_cast<Eigen::Index>(i)] = a0 * (1.0 - p01) + a1 * p10;
      out[static_cast<Eigen::Index>(i | bit)] = a0 * p01 + a1 * (1.0 - p10);
    }
  }
  return out;
}

std::uint64_t apply_readout_flips(std::uint64_t bits, int num_qubits, const NoiseModel& noise, Rng& rng) {
  if (!noise.has_readout_noise()) return bits;
  for (int q = 0; q < num_qubits; ++q) {
    const auto bit = qubit_bit(q, num_qubits);
    const double p = (bits & bit) ? noise.readout_10 : noise.readout_01;
    if (rng.uniform() < p) bits ^= bit;
  }
  return bits;
}

std::vector<std::uint64_t> sample_outcomes(const Eigen::VectorXd& probs, int num_qubits, int shots,
                                           const NoiseModel& noise, Rng& rng) {
  if (shots < 1) throw ValidationError("shots must be >= 1");
  std::vector<double> cdf(static_cast<std::size_t>(probs.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  std::vector<std::uint64_t> out(static_cast<std::size_t>(shots));
  for (auto& o : out) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Skip zero-probability tails when u lands exactly on the last boundary.
    if (it == cdf.end()) it = std::prev(cdf.end());
    while (probs[it - cdf.begin()] <= 0.0 && it != cdf.begin()) --it;
    o = apply_readout_flips(static_cast<std::uint64_t>(it - cdf.begin()), num_qubits, noise, rng);
  }
  g_shots_sampled += static_cast<std::uint64_t>(shots);
  return out;
}

std::string bitstring(std::uint64_t bits, int num_qubits) {
  std::string s(static_cast<std::size_t>(num_qubits), '0');
  for (int q = 0; q < num_qubits; ++q)
    if (bits & qubit_bit(q, num_qubits)) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

std::map<std::string, int> sample_counts(const QuantumState& state, const MeasurementGroup& group, int shots,
                                         const NoiseModel& noise, Rng& rng) {
  noise.validate();
  const auto probs = basis_distribution(state, group.basis);
  const int n = static_cast<int>(group.basis.size());
  std::map<std::string, int> counts;
  for (auto b : sample_outcomes(probs, n, shots, noise, rng)) ++counts[bitstring(b, n)];
  return counts;
}

std::uint64_t shots_sampled_on_this_thread() { return g_shots_sampled; }

}  // namespace vqesmo
