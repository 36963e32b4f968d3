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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vqesmo/error.hpp"
#include "vqesmo/harness.hpp"
#include "vqesmo/selftest.hpp"

namespace vqesmo::harness {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::string> mitigation;
  std::optional<std::string> algorithm;
  std::optional<std::string> seeds;
  std::optional<int> budget;
  std::optional<int> shots;
  bool wall_time = false;
  int threads = 0;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--output-dir", o.output_dir, "Directory for CSV and JSON outputs");
  cmd->add_option("--mitigation", o.mitigation, "none, trex or zne");
  cmd->add_option("--algorithm", o.algorithm, "nft or emicore");
  cmd->add_option("--seeds", o.seeds, "Comma-separated seeds; a..b denotes an inclusive range");
  cmd->add_option("--budget", o.budget, "Measurement budget");
  cmd->add_option("--shots", o.shots, "Shots per measurement group");
  cmd->add_flag("--wall-time", o.wall_time, "Record wall-clock milliseconds per step");
  cmd->add_option("--threads", o.threads, "Worker threads (default: VQE_SMO_THREADS or all cores)");
}

std::uint64_t parse_seed(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    v = std::stoull(s, &used);
  } catch (const std::logic_error&) {
    throw ValidationError("--seeds: '" + s + "' is not a nonnegative integer");
  }
  if (used != s.size()) throw ValidationError("--seeds: '" + s + "' is not a nonnegative integer");
  return v;
}

json parse_seed_list(const std::string& text) {
  json seeds = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_seed(item));
      continue;
    }
    const auto lo = parse_seed(item.substr(0, dots));
    const auto hi = parse_seed(item.substr(dots + 2));
    if (hi < lo) throw ValidationError("--seeds: empty range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

// Overrides are applied to the raw JSON so that the strict parser validates
// the merged result and materializes defaults that depend on it.
ExperimentConfig load_with_overrides(const fs::path& path, const Overrides& o) {
  json j = read_json_file(path);
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  if (o.output_dir) j["output_dir"] = *o.output_dir;
  if (o.algorithm) j["algorithm"] = *o.algorithm;
  if (o.seeds) j["seeds"] = parse_seed_list(*o.seeds);
  if (o.budget) j["budget"] = *o.budget;
  if (o.shots) j["shots"] = *o.shots;
  if (o.wall_time) j["record_wall_time"] = true;
  if (o.mitigation) {
    json m = j.contains("mitigation") ? j["mitigation"] : json::object();
    if (!m.is_object()) throw ValidationError("mitigation: expected a JSON object");
    m["mode"] = *o.mitigation;
    j["mitigation"] = m;
  }
  return parse_config(j);
}

void print_summary(const std::string& label, const json& result) {
  const auto& seeds = result["seeds"];
  int failed = 0;
  for (const auto& s : seeds)
    if (!s["ok"].get<bool>()) {
      ++failed;
      std::cerr << label << "seed " << s["seed"] << " failed: " << s["error"].get<std::string>() << '\n';
    }
  if (result.contains("aggregate")) {
    const auto& fin = result["aggregate"]["final"];
    std::printf("%sseeds=%d failed=%d final_energy=%.6f+-%.6f final_fidelity=%.6f+-%.6f\n", label.c_str(),
                static_cast<int>(seeds.size()), failed, fin["energy"]["mean"].get<double>(),
                fin["energy"]["std"].get<double>(), fin["fidelity"]["mean"].get<double>(),
                fin["fidelity"]["std"].get<double>());
  }
}

int failed_seed_count(const json& result) {
  int n = 0;
  for (const auto& s : result["seeds"])
    if (!s["ok"].get<bool>()) ++n;
  return n;
}

int cmd_exact(const fs::path& path, const Overrides& o) {
  const auto config = load_with_overrides(path, o);
  const auto h = config.hamiltonian();
  const auto ground = ground_state(h);
  std::printf("%.12f\n", ground.energy);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  json fixture = to_json(ground);
  fixture["hamiltonian"] = to_json(h);
  std::ofstream(dir / "ground_truth.json") << fixture.dump(2) << '\n';
  return 0;
}

int cmd_run(const fs::path& path, const Overrides& o) {
  const auto config = load_with_overrides(path, o);
  const auto result = run_and_write(config, o.threads);
  print_summary("", result);
  return failed_seed_count(result) > 0 ? 2 : 0;
}

json side_by_side(const json& a, const json& b) {
  json rows = json::array();
  const auto& ca = a["checkpoints"];
  const auto& cb = b["checkpoints"];
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < ca.size() && k < cb.size()) {
    const int ma = ca[i]["measurements"].get<int>();
    const int mb = cb[k]["measurements"].get<int>();
    if (ma < mb) {
      ++i;
    } else if (mb < ma) {
      ++k;
    } else {
      rows.push_back({{"measurements", ma},
                      {"a", {{"energy", ca[i]["energy"]}, {"fidelity", ca[i]["fidelity"]}}},
                      {"b", {{"energy", cb[k]["energy"]}, {"fidelity", cb[k]["fidelity"]}}}});
      ++i;
      ++k;
    }
  }
  return {{"checkpoints", rows}, {"final", {{"a", a["final"]}, {"b", b["final"]}}}};
}

int cmd_compare(const fs::path& path_a, const fs::path& path_b, const Overrides& o) {
  Overrides oa = o;
  Overrides ob = o;
  auto a = load_with_overrides(path_a, oa);
  auto b = load_with_overrides(path_b, ob);
  fs::path dir = o.output_dir ? fs::path(*o.output_dir) : fs::path(a.output_dir).parent_path() / "compare";
  if (o.output_dir || a.output_dir == b.output_dir) {
    a.output_dir = (dir / "a").string();
    b.output_dir = (dir / "b").string();
  }
  const auto ra = run_and_write(a, o.threads);
  const auto rb = run_and_write(b, o.threads);
  print_summary("a: ", ra);
  print_summary("b: ", rb);

  json out = {{"a", ra}, {"b", rb}};
  if (ra.contains("aggregate") && rb.contains("aggregate"))
    out["side_by_side"] = side_by_side(ra["aggregate"], rb["aggregate"]);
  fs::create_directories(dir);
  std::ofstream(dir / "compare.json") << out.dump(2) << '\n';
  return failed_seed_count(ra) + failed_seed_count(rb) > 0 ? 2 : 0;
}

int cmd_aggregate(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ValidationError("cannot open " + csv_path.string());
  std::cout << to_json(aggregate(read_csv(in))).dump(2) << '\n';
  return 0;
}

}  // namespace

int cli(int argc, char** argv) {
  CLI::App app{"Sequential minimal optimization benchmarks for VQE"};
  app.require_subcommand(1);

  Overrides exact_o;
  Overrides run_o;
  Overrides compare_o;
  std::string config_path;
  std::string config_b_path;
  std::string csv_path;

  auto* exact = app.add_subcommand("exact", "Print the exact ground energy and write ground_truth.json");
  exact->add_option("config", config_path, "Experiment config (JSON)")->required();
  exact->add_option("--output-dir", exact_o.output_dir, "Directory for ground_truth.json");

  auto* run = app.add_subcommand("run", "Run every seed and write CSV and aggregate JSON");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  add_override_flags(run, run_o);

  auto* compare = app.add_subcommand("compare", "Run two configs and write a side-by-side aggregate");
  compare->add_option("config_a", config_path, "First experiment config")->required();
  compare->add_option("config_b", config_b_path, "Second experiment config")->required();
  add_override_flags(compare, compare_o);

  auto* selftest = app.add_subcommand("selftest", "Run the fast internal checks");

  auto* agg = app.add_subcommand("aggregate", "Recompute the aggregate JSON from a records CSV");
  agg->add_option("csv", csv_path, "records.csv from a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*exact) return cmd_exact(config_path, exact_o);
    if (*run) return cmd_run(config_path, run_o);
    if (*compare) return cmd_compare(config_path, config_b_path, compare_o);
    if (*selftest) return run_selftest(std::cout) == 0 ? 0 : 2;
    if (*agg) return cmd_aggregate(csv_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace vqesmo::harness
