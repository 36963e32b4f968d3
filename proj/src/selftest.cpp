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

#include "vqesmo/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vqesmo/gp.hpp"
#include "vqesmo/hamiltonian.hpp"
#include "vqesmo/measurement.hpp"
#include "vqesmo/optimize.hpp"
#include "vqesmo/rng.hpp"
#include "vqesmo/simulator.hpp"

namespace vqesmo {
namespace {

bool sinusoid_law() {
  Rng rng = Rng::stream(11, 0);
  const auto h = build_critical_ising(3);
  const auto ansatz = build_ansatz(3, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto theta = ParamVector::uniform(ansatz.num_params(), rng);
    const int d = static_cast<int>(rng.next() % ansatz.num_params());
    auto f = [&](double a) { return exact_energy(ansatz, theta.with(d, a), h); };
    const auto fit = opt::cosine_fit({{{0.0, f(0.0)}, {kTwoPi / 3, f(kTwoPi / 3)}, {2 * kTwoPi / 3, f(2 * kTwoPi / 3)}}});
    for (int k = 0; k < 8; ++k) {
      const double a = kTwoPi * rng.uniform();
      if (std::abs(fit(a) - f(a)) > 1e-9) return false;
    }
  }
  return true;
}

bool ising_two_qubits() {
  return std::abs(ground_state(build_critical_ising(2)).energy + std::sqrt(5.0)) < 1e-10;
}

bool lanczos_matches_dense() {
  const auto h = build_heisenberg(6, {-1.0, 0.5, 0.25}, {0.3, 0.0, -1.0});
  return std::abs(ground_state_dense(h).energy - ground_state_lanczos(h).energy) < 1e-8;
}

bool kernel_psd() {
  Rng rng = Rng::stream(12, 0);
  const gp::KernelParams p{1.0, 2.0, 0.0};
  Eigen::MatrixXd x(20, 4);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = kTwoPi * rng.uniform();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gp::kernel_matrix(x, x, p));
  return eig.eigenvalues().minCoeff() > -1e-8;
}

bool gp_interpolates_subspace() {
  Rng rng = Rng::stream(13, 0);
  const auto h = build_critical_ising(2);
  const auto ansatz = build_ansatz(2, 1);
  const auto theta = ParamVector::uniform(ansatz.num_params(), rng);
  const int d = 1;
  Eigen::MatrixXd x(3, ansatz.num_params());
  Eigen::VectorXd y(3);
  for (int i = 0; i < 3; ++i) {
    const auto t = theta.with(d, theta[d] + i * kTwoPi / 3);
    x.row(i) = t.angles().transpose();
    y[i] = exact_energy(ansatz, t, h);
  }
  const auto model = gp::fit(x, y, {1.0, 1.0, 1e-12});
  Eigen::MatrixXd test(10, ansatz.num_params());
  Eigen::VectorXd truth(10);
  for (int i = 0; i < 10; ++i) {
    const auto t = theta.with(d, kTwoPi * i / 10);
    test.row(i) = t.angles().transpose();
    truth[i] = exact_energy(ansatz, t, h);
  }
  return (gp::posterior_mean(model, test) - truth).cwiseAbs().maxCoeff() < 1e-6;
}

bool zne_linear_exact() {
  Rng rng = Rng::stream(14, 0);
  const auto h = build_critical_ising(3);
  const auto ansatz = build_ansatz(3, 1);
  NoiseModel noise;
  noise.global_depolarizing = 0.1;
  MitigationConfig zne;
  zne.mode = MitigationMode::Zne;
  zne.zne_scales = {1.0, 2.0};
  const auto theta = ParamVector::uniform(ansatz.num_params(), rng);
  const auto est = measure(ansatz, theta, h, ShotCount::exact_expectation(), noise, zne, rng);
  return std::abs(est.value - exact_energy(ansatz, theta, h)) < 1e-10;
}

bool nft_converges() {
  opt::Problem problem(build_critical_ising(2), build_ansatz(2, 1), ground_state(build_critical_ising(2)));
  opt::RunConfig config;
  config.budget = 200;
  const auto result = opt::run(opt::Algorithm::Nft, problem, config, 3);
  return result.records.back().fidelity > 0.99;
}

}  // namespace

int run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"sinusoid law", sinusoid_law},
      {"two-qubit Ising ground energy", ising_two_qubits},
      {"Lanczos matches dense", lanczos_matches_dense},
      {"kernel matrix PSD", kernel_psd},
      {"GP interpolates a subspace", gp_interpolates_subspace},
      {"linear ZNE on global depolarizing", zne_linear_exact},
      {"NFT converges noiselessly", nft_converges},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "  error: " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace vqesmo
