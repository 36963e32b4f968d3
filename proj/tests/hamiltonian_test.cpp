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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracle.hpp"
#include "vqesmo/error.hpp"

using namespace vqesmo;

namespace {

// Ground energy of the open critical Ising chain on five qubits, from a dense
// numpy eigensolve.
constexpr double kIsingFiveGround = -6.026674183332267;

std::vector<std::string> labels(const Hamiltonian& h) {
  std::vector<std::string> out;
  for (const auto& t : h.terms()) out.push_back(t.label(h.num_qubits()));
  return out;
}

Hamiltonian random_hamiltonian(int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<PauliTerm> terms;
  for (int t = 0; t < 6; ++t) {
    std::string s;
    for (int i = 0; i < q; ++i) s += "IXYZ"[pick(rng)];
    terms.push_back(PauliTerm::from_label(coeff(rng), s));
  }
  return Hamiltonian(q, terms);
}

}  // namespace

TEST(PauliTerm, label_round_trip) {
  const auto t = PauliTerm::from_label(0.5, "XYZI");
  EXPECT_EQ(t.label(4), "XYZI");
  EXPECT_EQ(t.at(0, 4), Pauli::X);
  EXPECT_EQ(t.at(1, 4), Pauli::Y);
  EXPECT_EQ(t.at(3, 4), Pauli::I);
  EXPECT_EQ(t.x_mask, 0b1100u);
  EXPECT_EQ(t.z_mask, 0b0110u);
  EXPECT_THROW(PauliTerm::from_label(1.0, "XQ"), ValidationError);
}

TEST(Hamiltonian, merges_duplicates_and_drops_zeros) {
  Hamiltonian h(2, {PauliTerm::from_label(1.0, "XX"), PauliTerm::from_label(0.5, "XX"),
                    PauliTerm::from_label(2.0, "ZI"), PauliTerm::from_label(-2.0, "ZI"),
                    PauliTerm::from_label(1.0, "IZ")});
  ASSERT_EQ(h.size(), 2u);
  EXPECT_DOUBLE_EQ(h.terms()[0].coeff, 1.5);
  EXPECT_EQ(labels(h), (std::vector<std::string>{"XX", "IZ"}));
}

TEST(Hamiltonian, rejects_empty_and_non_finite) {
  EXPECT_THROW(Hamiltonian(2, {}), ValidationError);
  EXPECT_THROW(Hamiltonian(1, {PauliTerm::from_label(NAN, "Z")}), ValidationError);
}

TEST(BuildHeisenberg, critical_point_five_qubits) {
  const auto h = build_heisenberg(5, {-1.0, 0.0, 0.0}, {0.0, 0.0, -1.0});
  EXPECT_EQ(labels(h), (std::vector<std::string>{"XXIII", "IXXII", "IIXXI", "IIIXX", "ZIIII", "IZIII", "IIZII",
                                                 "IIIZI", "IIIIZ"}));
  for (const auto& t : h.terms()) EXPECT_EQ(t.coeff, 1.0);
}

TEST(BuildHeisenberg, two_qubit_sign_expansion) {
  const auto h = build_heisenberg(2, {-1.0, 0.0, 0.0}, {0.0, 0.0, -1.0});
  EXPECT_EQ(labels(h), (std::vector<std::string>{"XX", "ZI", "IZ"}));
  for (const auto& t : h.terms()) EXPECT_EQ(t.coeff, 1.0);
}

TEST(BuildHeisenberg, errors) {
  EXPECT_THROW(build_heisenberg(2, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), ValidationError);
  EXPECT_THROW(build_heisenberg(1, {-1.0, 0.0, 0.0}, {0.0, 0.0, -1.0}), ValidationError);
}

TEST(ToDense, single_qubit_paulis) {
  const auto z = to_dense(Hamiltonian(1, {PauliTerm::from_label(1.0, "Z")}));
  EXPECT_EQ(z, oracle::pauli('Z'));
  const auto x = to_dense(Hamiltonian(1, {PauliTerm::from_label(1.0, "X")}));
  EXPECT_EQ(x, oracle::pauli('X'));
}

TEST(ToDense, two_qubit_ising_by_hand) {
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  expected.diagonal() << 2, 0, 0, -2;
  expected(0, 3) = expected(3, 0) = expected(1, 2) = expected(2, 1) = 1;
  EXPECT_TRUE(to_dense(build_critical_ising(2)).isApprox(expected, 1e-14));
}

TEST(ToDense, matches_kronecker_products_on_random_hamiltonians) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 4;
    const auto h = random_hamiltonian(q, rng);
    oracle::Matrix ref = oracle::Matrix::Zero(1 << q, 1 << q);
    for (const auto& t : h.terms()) ref += t.coeff * oracle::pauli_string(t.label(q));
    const auto dense = to_dense(h);
    EXPECT_LT((dense - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((dense - dense.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(dense);
    EXPECT_LT(eig.eigenvalues().imag().cwiseAbs().maxCoeff(), 1e-10);

    Eigen::VectorXcd x = Eigen::VectorXcd::Random(1 << q);
    EXPECT_LT((h.apply(x) - dense * x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ToDense, size_guard) {
  EXPECT_THROW(to_dense(build_critical_ising(15)), ValidationError);
}

TEST(GroundState, two_qubit_ising_is_minus_sqrt_five) {
  const auto g = ground_state(build_critical_ising(2));
  EXPECT_NEAR(g.energy, -std::sqrt(5.0), 1e-12);
}

TEST(GroundState, single_z) {
  const auto g = ground_state(Hamiltonian(1, {PauliTerm::from_label(1.0, "Z")}));
  EXPECT_NEAR(g.energy, -1.0, 1e-14);
  EXPECT_NEAR(std::abs(g.state[1]), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(g.state[0]), 0.0, 1e-12);
}

TEST(GroundState, five_qubit_ising_fixture) {
  const auto h = build_critical_ising(5);
  const auto g = ground_state(h);
  EXPECT_NEAR(g.energy, kIsingFiveGround, 1e-10);
  EXPECT_NEAR(oracle::ground_energy(oracle::critical_ising(5)), kIsingFiveGround, 1e-10);
  EXPECT_NEAR(g.state.norm(), 1.0, 1e-12);
  EXPECT_LT((to_dense(h) * g.state - g.energy * g.state).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GroundState, variational_bound) {
  const auto h = build_heisenberg(4, {-1.0, 0.3, 0.7}, {0.2, 0.0, -1.0});
  const auto g = ground_state(h);
  const auto dense = to_dense(h);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(16);
    v.normalize();
    EXPECT_LE(g.energy, (v.adjoint() * dense * v)(0, 0).real() + 1e-12);
  }
}

TEST(GroundState, lanczos_agrees_with_dense) {
  for (int q : {6, 8, 10}) {
    const auto h = build_heisenberg(q, {-1.0, -0.5, 0.25}, {0.3, 0.0, -1.0});
    const auto dense = ground_state_dense(h);
    const auto lanczos = ground_state_lanczos(h);
    EXPECT_NEAR(dense.energy, lanczos.energy, 1e-9) << q;
    EXPECT_NEAR(std::norm(dense.state.dot(lanczos.state)), 1.0, 1e-8) << q;
    EXPECT_LT((h.apply(lanczos.state) - lanczos.energy * lanczos.state).norm(), 1e-9);
  }
}

TEST(GroundState, lanczos_path_above_dense_limit) {
  const auto h = build_critical_ising(12);
  const auto g = ground_state(h);
  EXPECT_LT((h.apply(g.state) - g.energy * g.state).norm(), 1e-9);
  // Per-site energy approaches the infinite-chain value -4/pi.
  EXPECT_NEAR(g.energy / 12.0, -4.0 / M_PI, 0.08);
}

TEST(GroundState, lanczos_iteration_cap) {
  LanczosOptions opts;
  opts.max_iterations = 2;
  EXPECT_THROW(ground_state_lanczos(build_critical_ising(8), opts), ComputeError);
}

TEST(GroupTerms, ising_five_needs_two_groups) {
  const auto h = build_critical_ising(5);
  const auto groups = group_terms(h);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].basis, std::vector<Pauli>(5, Pauli::X));
  EXPECT_EQ(groups[0].member_terms, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(groups[1].basis, std::vector<Pauli>(5, Pauli::Z));
  EXPECT_EQ(groups[1].member_terms, (std::vector<std::size_t>{4, 5, 6, 7, 8}));
}

TEST(GroupTerms, small_cases) {
  EXPECT_EQ(group_terms(Hamiltonian(2, {PauliTerm::from_label(1.0, "XI")})).size(), 1u);
  EXPECT_EQ(group_terms(Hamiltonian(1, {PauliTerm::from_label(1.0, "X"), PauliTerm::from_label(1.0, "Z")})).size(),
            2u);
}

TEST(GroupTerms, partition_property_on_random_hamiltonians) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int q = 1 + trial % 4;
    const auto h = random_hamiltonian(q, rng);
    std::vector<int> seen(h.size(), 0);
    for (const auto& g : group_terms(h)) {
      for (auto idx : g.member_terms) {
        ++seen[idx];
        const auto& t = h.terms()[idx];
        for (int i = 0; i < q; ++i)
          if (t.at(i, q) != Pauli::I) EXPECT_EQ(t.at(i, q), g.basis[static_cast<std::size_t>(i)]);
      }
    }
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(HamiltonianJson, round_trip_and_strictness) {
  const auto h = build_heisenberg(3, {-1.0, 0.0, 0.5}, {0.0, 0.0, -1.0});
  const auto j = to_json(h);
  EXPECT_EQ(j["qubits"], 3);
  EXPECT_EQ(j["terms"][0]["paulis"], "XXI");
  const auto back = hamiltonian_from_json(j);
  EXPECT_EQ(labels(back), labels(h));

  EXPECT_THROW(hamiltonian_from_json(nlohmann::json::parse(R"({"qubits":2,"terms":[{"coeff":1,"paulis":"X"}]})")),
               ValidationError);
  EXPECT_THROW(
      hamiltonian_from_json(nlohmann::json::parse(R"({"qubits":1,"terms":[{"coeff":1,"paulis":"X","w":2}]})")),
      ValidationError);
}
