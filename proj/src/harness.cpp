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

#include "vqesmo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vqesmo/error.hpp"

namespace vqesmo::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError(field + ": expected an integer");
  return v.get<int>();
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field + ": expected a number");
  return v.get<double>();
}

std::vector<double> get_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw ValidationError(field + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, field));
  return out;
}

std::array<double, 3> get_triple(const json& v, const std::string& field) {
  const auto xs = get_numbers(v, field);
  if (xs.size() != 3) throw ValidationError(field + ": expected exactly three numbers");
  return {xs[0], xs[1], xs[2]};
}

void parse_hamiltonian_block(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ValidationError("hamiltonian: expected a JSON object");
  if (j.contains("terms")) {
    c.custom_hamiltonian = hamiltonian_from_json(j);
    return;
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "J") {
      c.coupling = get_triple(value, "hamiltonian.J");
    } else if (key == "h") {
      c.field = get_triple(value, "hamiltonian.h");
    } else {
      throw ValidationError("hamiltonian: unknown field '" + key + "'");
    }
  }
}

void parse_optimizer_block(const json& j, opt::RunConfig& o) {
  if (!j.is_object()) throw ValidationError("optimizer: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    const std::string field = "optimizer." + key;
    if (key == "alpha") {
      o.nft_shift = get_number(value, field);
    } else if (key == "warmup_steps") {
      o.warmup_steps = get_int(value, field);
    } else if (key == "grid_size") {
      o.grid_size = get_int(value, field);
    } else if (key == "samples") {
      o.num_samples = get_int(value, field);
    } else if (key == "kappa_factor") {
      o.kappa_factor = get_number(value, field);
    } else if (key == "gamma_sq_grid") {
      o.gamma_sq_grid = get_numbers(value, field);
    } else if (key == "sigma0_sq_grid") {
      o.sigma0_sq_grid = get_numbers(value, field);
    } else if (key == "stabilization_period") {
      o.stabilization_period = get_int(value, field);
    } else {
      throw ValidationError("optimizer: unknown field '" + key + "'");
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Hamiltonian ExperimentConfig::hamiltonian() const {
  if (custom_hamiltonian) return *custom_hamiltonian;
  return build_heisenberg(qubits, coupling, field);
}

ShotCount ExperimentConfig::shot_count() const {
  return exact_expectation ? ShotCount::exact_expectation() : ShotCount::finite(shots);
}

void ExperimentConfig::validate() const {
  const bool needs_density = noise.has_gate_noise();
  const int max_qubits = needs_density ? kMaxDensityQubits : 14;
  if (qubits < 1 || qubits > max_qubits)
    throw ValidationError("qubits: must be in [1, " + std::to_string(max_qubits) + "] for this noise setting");
  if (layers < 0) throw ValidationError("layers: must be >= 0");
  if (custom_hamiltonian && custom_hamiltonian->num_qubits() != qubits)
    throw ValidationError("hamiltonian.qubits: does not match qubits");
  if (!custom_hamiltonian && qubits < 2) throw ValidationError("qubits: the Heisenberg chain needs at least 2");
  if (budget < 2) throw ValidationError("budget: must be >= 2, got " + std::to_string(budget));
  if (!exact_expectation && shots < 1) throw ValidationError("shots: must be >= 1");
  if (seeds.empty()) throw ValidationError("seeds: must be a non-empty list");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ValidationError("seeds: entries must be distinct");
  noise.validate();
  mitigation.validate();
  if (mitigation.mode == MitigationMode::Zne)
    for (double s : mitigation.zne_scales) (void)scaled(noise, s);
  optimizer.validate();
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  ExperimentConfig c;
  std::optional<json> hamiltonian_block;
  for (const auto& [key, value] : j.items()) {
    if (key == "qubits") {
      c.qubits = get_int(value, key);
    } else if (key == "layers") {
      c.layers = get_int(value, key);
    } else if (key == "hamiltonian") {
      hamiltonian_block = value;
    } else if (key == "algorithm") {
      if (!value.is_string()) throw ValidationError("algorithm: expected a string");
      c.algorithm = opt::parse_algorithm(value.get<std::string>());
    } else if (key == "budget") {
      c.budget = get_int(value, key);
    } else if (key == "shots") {
      c.shots = get_int(value, key);
    } else if (key == "exact_expectation") {
      if (!value.is_boolean()) throw ValidationError("exact_expectation: expected true or false");
      c.exact_expectation = value.get<bool>();
    } else if (key == "noise") {
      if (value.is_string()) {
        const auto name = value.get<std::string>();
        if (name == "benchmark") {
          c.noise = NoiseModel::benchmark_preset();
        } else if (name == "none") {
          c.noise = NoiseModel::none();
        } else {
          throw ValidationError("noise: unknown preset '" + name + "' (expected benchmark or none)");
        }
      } else {
        c.noise = noise_from_json(value);
      }
    } else if (key == "mitigation") {
      c.mitigation = mitigation_from_json(value);
    } else if (key == "optimizer") {
      parse_optimizer_block(value, c.optimizer);
    } else if (key == "seeds") {
      if (!value.is_array()) throw ValidationError("seeds: expected an array of nonnegative integers");
      for (const auto& s : value) {
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
          throw ValidationError("seeds: expected nonnegative integers");
        c.seeds.push_back(s.get<std::uint64_t>());
      }
    } else if (key == "output_dir") {
      if (!value.is_string()) throw ValidationError("output_dir: expected a string");
      c.output_dir = value.get<std::string>();
    } else if (key == "record_wall_time") {
      if (!value.is_boolean()) throw ValidationError("record_wall_time: expected true or false");
      c.optimizer.record_wall_time = value.get<bool>();
    } else {
      throw ValidationError("config: unknown field '" + key + "'");
    }
  }
  if (hamiltonian_block) parse_hamiltonian_block(*hamiltonian_block, c);
  c.optimizer.budget = c.budget;
  if (c.optimizer.warmup_steps < 0) c.optimizer.warmup_steps = 2 * (c.layers + 1) * c.qubits;
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["qubits"] = c.qubits;
  j["layers"] = c.layers;
  j["hamiltonian"] = c.custom_hamiltonian ? to_json(*c.custom_hamiltonian) : json{{"J", c.coupling}, {"h", c.field}};
  j["algorithm"] = opt::to_string(c.algorithm);
  j["budget"] = c.budget;
  j["shots"] = c.shots;
  j["exact_expectation"] = c.exact_expectation;
  j["noise"] = to_json(c.noise);
  j["mitigation"] = to_json(c.mitigation);
  j["optimizer"] = {{"alpha", c.optimizer.nft_shift},
                    {"warmup_steps", c.optimizer.warmup_steps},
                    {"grid_size", c.optimizer.grid_size},
                    {"samples", c.optimizer.num_samples},
                    {"kappa_factor", c.optimizer.kappa_factor},
                    {"gamma_sq_grid", c.optimizer.gamma_sq_grid},
                    {"sigma0_sq_grid", c.optimizer.sigma0_sq_grid},
                    {"stabilization_period", c.optimizer.stabilization_period}};
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["record_wall_time"] = c.optimizer.record_wall_time;
  return j;
}

opt::Problem make_problem(const ExperimentConfig& config) {
  auto h = config.hamiltonian();
  auto ground = ground_state(h);
  opt::Problem p(std::move(h), build_ansatz(config.qubits, config.layers), std::move(ground));
  p.shots = config.shot_count();
  p.noise = config.noise;
  p.mitigation = config.mitigation;
  return p;
}

int default_thread_count() {
  if (const char* env = std::getenv("VQE_SMO_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config, int threads,
                                        const std::optional<fs::path>& seed_csv_dir) {
  config.validate();
  const auto problem = make_problem(config);
  if (seed_csv_dir) fs::create_directories(*seed_csv_dir);

  std::vector<SeedOutcome> outcomes(config.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      auto& out = outcomes[i];
      out.seed = config.seeds[i];
      std::ofstream csv;
      opt::RecordSink sink;
      try {
        if (seed_csv_dir) {
          const auto path = *seed_csv_dir / ("seed_" + std::to_string(out.seed) + ".csv");
          csv.open(path);
          if (!csv) throw ComputeError("cannot write " + path.string());
          write_csv_header(csv);
          sink = [&csv](const opt::RunRecord& r) {
            write_csv_row(csv, r);
            csv.flush();
          };
        }
        auto result = opt::run(config.algorithm, problem, config.optimizer, out.seed, sink);
        out.records = std::move(result.records);
        out.measurements_used = result.measurements_used;
        out.shots_used = result.shots_used;
        out.selected_kernel = result.selected_kernel;
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads > 0 ? threads : default_thread_count(),
                                          static_cast<int>(config.seeds.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return outcomes;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

Percentiles percentiles(const std::vector<double>& v) {
  return {percentile(v, 0.25), percentile(v, 0.5), percentile(v, 0.75)};
}

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

}  // namespace

AggregateCurve aggregate(const std::vector<std::vector<opt::RunRecord>>& per_seed) {
  std::vector<const std::vector<opt::RunRecord>*> traces;
  for (const auto& t : per_seed)
    if (!t.empty()) traces.push_back(&t);
  if (traces.empty()) throw ValidationError("aggregate: no completed seeds");

  AggregateCurve curve;
  curve.num_seeds = static_cast<int>(traces.size());
  int last = 0;
  for (const auto* t : traces) last = std::max(last, t->back().measurements_used);
  for (int m = 2; m <= last; m += 2) {
    std::vector<double> energy;
    std::vector<double> fid;
    for (const auto* t : traces) {
      const opt::RunRecord* latest = nullptr;
      for (const auto& r : *t) {
        if (r.measurements_used > m) break;
        latest = &r;
      }
      if (!latest) continue;
      energy.push_back(latest->true_energy);
      fid.push_back(latest->fidelity);
    }
    if (energy.empty()) continue;
    curve.checkpoints.push_back({m, percentiles(energy), percentiles(fid)});
  }
  std::vector<double> final_energy;
  std::vector<double> final_fid;
  for (const auto* t : traces) {
    final_energy.push_back(t->back().true_energy);
    final_fid.push_back(t->back().fidelity);
  }
  curve.final_energy = mean_std(final_energy);
  curve.final_fidelity = mean_std(final_fid);
  return curve;
}

json to_json(const AggregateCurve& curve) {
  auto pct = [](const Percentiles& p) { return json{{"p25", p.p25}, {"p50", p.p50}, {"p75", p.p75}}; };
  json checkpoints = json::array();
  for (const auto& c : curve.checkpoints)
    checkpoints.push_back({{"measurements", c.measurements}, {"energy", pct(c.energy)}, {"fidelity", pct(c.fidelity)}});
  return {{"num_seeds", curve.num_seeds},
          {"checkpoints", checkpoints},
          {"final",
           {{"energy", {{"mean", curve.final_energy.mean}, {"std", curve.final_energy.std}}},
            {"fidelity", {{"mean", curve.final_fidelity.mean}, {"std", curve.final_fidelity.std}}}}}};
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const opt::RunRecord& r) {
  out << r.seed << ',' << opt::to_string(r.algorithm) << ',' << r.measurements_used << ','
      << format_double(r.believed_energy) << ',' << format_double(r.true_energy) << ',' << format_double(r.fidelity)
      << ',' << (r.wall_ms ? format_double(*r.wall_ms) : std::string()) << '\n';
}

std::vector<std::vector<opt::RunRecord>> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ValidationError("CSV: missing or unexpected header");
  std::vector<std::vector<opt::RunRecord>> out;
  std::map<std::uint64_t, std::size_t> index;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 7) throw ValidationError("CSV line " + std::to_string(line_no) + ": expected 7 columns");
    opt::RunRecord r;
    try {
      r.seed = std::stoull(cells[0]);
      r.algorithm = opt::parse_algorithm(cells[1]);
      r.measurements_used = std::stoi(cells[2]);
      r.believed_energy = std::stod(cells[3]);
      r.true_energy = std::stod(cells[4]);
      r.fidelity = std::stod(cells[5]);
      if (!cells[6].empty()) r.wall_ms = std::stod(cells[6]);
    } catch (const std::logic_error&) {
      throw ValidationError("CSV line " + std::to_string(line_no) + ": malformed value");
    }
    auto [it, inserted] = index.try_emplace(r.seed, out.size());
    if (inserted) out.emplace_back();
    auto& trace = out[it->second];
    r.step = static_cast<int>(trace.size()) + 1;
    trace.push_back(r);
  }
  return out;
}

nlohmann::json run_and_write(const ExperimentConfig& config, int threads) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const auto outcomes = run_experiment(config, threads, dir);

  std::ofstream csv(dir / "records.csv");
  write_csv_header(csv);
  std::vector<std::vector<opt::RunRecord>> traces;
  json seeds = json::array();
  for (const auto& o : outcomes) {
    json s = {{"seed", o.seed}, {"ok", o.ok}};
    if (o.ok) {
      for (const auto& r : o.records) write_csv_row(csv, r);
      traces.push_back(o.records);
      s["measurements_used"] = o.measurements_used;
      s["shots_used"] = o.shots_used;
      if (o.selected_kernel)
        s["kernel"] = {{"sigma0_sq", o.selected_kernel->sigma0_sq},
                       {"gamma_sq", o.selected_kernel->gamma_sq},
                       {"noise_var", o.selected_kernel->noise_var}};
    } else {
      s["error"] = o.error;
    }
    seeds.push_back(s);
  }
  csv.close();

  json out;
  out["config"] = to_json(config);
  out["seeds"] = seeds;
  if (!traces.empty()) out["aggregate"] = to_json(aggregate(traces));
  std::ofstream(dir / "aggregate.json") << out.dump(2) << '\n';
  if (traces.empty()) throw ComputeError("every seed failed; see " + (dir / "aggregate.json").string());
  return out;
}

}  // namespace vqesmo::harness
