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

#include "vqesmo/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "vqesmo/error.hpp"

namespace vqesmo {

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::I:
      return 'I';
    case Pauli::X:
      return 'X';
    case Pauli::Y:
      return 'Y';
    case Pauli::Z:
      return 'Z';
  }
  return '?';
}

Pauli PauliTerm::at(int qubit, int num_qubits) const {
  const auto bit = qubit_bit(qubit, num_qubits);
  const bool x = (x_mask & bit) != 0;
  const bool z = (z_mask & bit) != 0;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

std::string PauliTerm::label(int num_qubits) const {
  std::string out(static_cast<std::size_t>(num_qubits), 'I');
  for (int q = 0; q < num_qubits; ++q) out[static_cast<std::size_t>(q)] = pauli_char(at(q, num_qubits));
  return out;
}

PauliTerm PauliTerm::from_label(double coeff, std::string_view label) {
  const int n = static_cast<int>(label.size());
  if (n == 0 || n > 63) throw ValidationError("Pauli label must have 1..63 characters");
  PauliTerm term;
  term.coeff = coeff;
  for (int q = 0; q < n; ++q) {
    const auto bit = qubit_bit(q, n);
    switch (label[static_cast<std::size_t>(q)]) {
      case 'I':
        break;
      case 'X':
        term.x_mask |= bit;
        break;
      case 'Y':
        term.x_mask |= bit;
        term.z_mask |= bit;
        break;
      case 'Z':
        term.z_mask |= bit;
        break;
      default:
        throw ValidationError("invalid Pauli character '" + std::string(1, label[q]) +
                              "' in label " + std::string(label));
    }
  }
  return term;
}

Complex PauliTerm::phase(std::uint64_t basis) const {
  // Y = iXZ on every qubit where both masks are set.
  static constexpr std::array<Complex, 4> kPowersOfI = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                                        Complex(0, -1)};
  const int ny = std::popcount(x_mask & z_mask);
  const int sign_flips = std::popcount(basis & z_mask);
  Complex p = kPowersOfI[static_cast<std::size_t>(ny & 3)];
  return (sign_flips & 1) ? -p : p;
}

Hamiltonian::Hamiltonian(int num_qubits, std::vector<PauliTerm> terms) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > 63) throw ValidationError("qubit count must be in [1, 63]");
  const std::uint64_t valid = num_qubits == 64 ? ~0ULL : (std::uint64_t{1} << num_qubits) - 1;
  for (const auto& t : terms) {
    if (!std::isfinite(t.coeff)) throw ValidationError("Pauli term coefficient must be finite");
    if ((t.support() & ~valid) != 0) throw ValidationError("Pauli term acts outside the qubit register");
    auto it = std::find_if(terms_.begin(), terms_.end(), [&](const PauliTerm& s) {
      return s.x_mask == t.x_mask && s.z_mask == t.z_mask;
    });
    if (it == terms_.end()) {
      terms_.push_back(t);
    } else {
      it->coeff += t.coeff;
    }
  }
  std::erase_if(terms_, [](const PauliTerm& t) { return t.coeff == 0.0; });
  if (terms_.empty()) throw ValidationError("Hamiltonian has no nonzero terms");
}

double Hamiltonian::mean_eigenvalue() const {
  double c = 0.0;
  for (const auto& t : terms_)
    if (t.support() == 0) c += t.coeff;
  return c;
}

Eigen::VectorXcd Hamiltonian::apply(const Eigen::VectorXcd& x) const {
  const auto dim = dimension();
  if (static_cast<std::size_t>(x.size()) != dim) throw ValidationError("vector dimension mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& t : terms_) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      y[static_cast<Eigen::Index>(b ^ t.x_mask)] += t.coeff * t.phase(b) * x[static_cast<Eigen::Index>(b)];
    }
  }
  return y;
}

Hamiltonian build_heisenberg(int num_qubits, const std::array<double, 3>& coupling,
                             const std::array<double, 3>& field) {
  if (num_qubits < 2) throw ValidationError("Heisenberg chain needs at least 2 qubits");
  static constexpr std::array<char, 3> kAxes = {'X', 'Y', 'Z'};
  std::vector<PauliTerm> terms;
  for (std::size_t a = 0; a < 3; ++a) {
    if (coupling[a] == 0.0) continue;
    for (int j = 0; j + 1 < num_qubits; ++j) {
      std::string label(static_cast<std::size_t>(num_qubits), 'I');
      label[static_cast<std::size_t>(j)] = kAxes[a];
      label[static_cast<std::size_t>(j + 1)] = kAxes[a];
      terms.push_back(PauliTerm::from_label(-coupling[a], label));
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    if (field[a] == 0.0) continue;
    for (int j = 0; j < num_qubits; ++j) {
      std::string label(static_cast<std::size_t>(num_qubits), 'I');
      label[static_cast<std::size_t>(j)] = kAxes[a];
      terms.push_back(PauliTerm::from_label(-field[a], label));
    }
  }
  return Hamiltonian(num_qubits, std::move(terms));
}

Hamiltonian build_critical_ising(int num_qubits) {
  return build_heisenberg(num_qubits, {-1.0, 0.0, 0.0}, {0.0, 0.0, -1.0});
}

Eigen::MatrixXcd to_dense(const Hamiltonian& h) {
  if (h.num_qubits() > kMaxDenseQubits)
    throw ValidationError("dense Hamiltonian limited to " + std::to_string(kMaxDenseQubits) + " qubits");
  const auto dim = static_cast<Eigen::Index>(h.dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      m(static_cast<Eigen::Index>(ub ^ t.x_mask), b) += t.coeff * t.phase(ub);
    }
  }
  return m;
}

namespace {

// Fix the global phase so the largest-magnitude component is real positive.
void canonicalize_phase(Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex c = v[imax];
  if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
  v.normalize();
}

}  // namespace

GroundTruth ground_state_dense(const Hamiltonian& h) {
  if (h.num_qubits() > kMaxDenseQubits)
    throw ValidationError("exact diagonalization limited to " + std::to_string(kMaxDenseQubits) + " qubits");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(h));
  if (solver.info() != Eigen::Success) throw ComputeError("Hermitian eigensolver failed");
  GroundTruth g;
  g.energy = solver.eigenvalues()[0];
  g.state = solver.eigenvectors().col(0);
  canonicalize_phase(g.state);
  return g;
}

GroundTruth ground_state_lanczos(const Hamiltonian& h, const LanczosOptions& options) {
  if (h.num_qubits() > kMaxDenseQubits)
    throw ValidationError("exact diagonalization limited to " + std::to_string(kMaxDenseQubits) + " qubits");
  const auto dim = static_cast<Eigen::Index>(h.dimension());
  const int max_krylov = static_cast<int>(std::min<Eigen::Index>(options.max_iterations, dim));

  std::mt19937_64 engine(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(gauss(engine), gauss(engine));
  v.normalize();

  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.push_back(v);

  for (int k = 0; k < max_krylov; ++k) {
    Eigen::VectorXcd w = h.apply(basis[static_cast<std::size_t>(k)]);
    alpha.push_back(basis[static_cast<std::size_t>(k)].dot(w).real());
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double ritz = tri.eigenvalues()[0];
    const Eigen::VectorXd s = tri.eigenvectors().col(0);
    const bool exhausted = b < 1e-14 || k + 1 == dim;

    if (b * std::abs(s[m - 1]) <= 0.1 * options.tolerance || exhausted) {
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
      for (Eigen::Index i = 0; i < m; ++i) x += s[i] * basis[static_cast<std::size_t>(i)];
      x.normalize();
      const double residual = (h.apply(x) - ritz * x).norm();
      if (residual <= options.tolerance) {
        GroundTruth g;
        g.energy = ritz;
        g.state = x;
        canonicalize_phase(g.state);
        return g;
      }
      if (exhausted) break;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw ComputeError("Lanczos did not converge within " + std::to_string(options.max_iterations) +
                     " iterations");
}

GroundTruth ground_state(const Hamiltonian& h) {
  if (h.num_qubits() <= kMaxFullDiagonalizationQubits) return ground_state_dense(h);
  return ground_state_lanczos(h);
}

std::vector<MeasurementGroup> group_terms(const Hamiltonian& h) {
  const int n = h.num_qubits();
  std::vector<MeasurementGroup> groups;
  for (std::size_t idx = 0; idx < h.size(); ++idx) {
    const auto& term = h.terms()[idx];
    auto compatible = [&](const MeasurementGroup& g) {
      for (int q = 0; q < n; ++q) {
        const Pauli p = term.at(q, n);
        const Pauli b = g.basis[static_cast<std::size_t>(q)];
        if (p != Pauli::I && b != Pauli::I && p != b) return false;
      }
      return true;
    };
    auto it = std::find_if(groups.begin(), groups.end(), compatible);
    if (it == groups.end()) {
      groups.push_back({std::vector<Pauli>(static_cast<std::size_t>(n), Pauli::I), {}});
      it = std::prev(groups.end());
    }
    for (int q = 0; q < n; ++q) {
      const Pauli p = term.at(q, n);
      if (p != Pauli::I) it->basis[static_cast<std::size_t>(q)] = p;
    }
    it->member_terms.push_back(idx);
  }
  for (auto& g : groups)
    std::replace(g.basis.begin(), g.basis.end(), Pauli::I, Pauli::Z);
  return groups;
}

nlohmann::json to_json(const Hamiltonian& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : h.terms()) terms.push_back({{"coeff", t.coeff}, {"paulis", t.label(h.num_qubits())}});
  return {{"qubits", h.num_qubits()}, {"terms", terms}};
}

Hamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("hamiltonian: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "qubits" && key != "terms") throw ValidationError("hamiltonian: unknown field '" + key + "'");
  if (!j.contains("qubits") || !j.at("qubits").is_number_integer())
    throw ValidationError("hamiltonian.qubits: expected an integer");
  if (!j.contains("terms") || !j.at("terms").is_array())
    throw ValidationError("hamiltonian.terms: expected an array");
  const int n = j.at("qubits").get<int>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    if (!t.is_object() || !t.contains("coeff") || !t.contains("paulis") || !t.at("coeff").is_number() ||
        !t.at("paulis").is_string())
      throw ValidationError("hamiltonian.terms: each term needs numeric 'coeff' and string 'paulis'");
    if (t.size() != 2) throw ValidationError("hamiltonian.terms: terms take only 'coeff' and 'paulis'");
    const auto label = t.at("paulis").get<std::string>();
    if (static_cast<int>(label.size()) != n)
      throw ValidationError("hamiltonian.terms: label '" + label + "' does not match qubit count");
    terms.push_back(PauliTerm::from_label(t.at("coeff").get<double>(), label));
  }
  return Hamiltonian(n, std::move(terms));
}

nlohmann::json to_json(const GroundTruth& g) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < g.state.size(); ++i) amps.push_back({g.state[i].real(), g.state[i].imag()});
  return {{"energy", g.energy}, {"state", amps}};
}

}  // namespace vqesmo
