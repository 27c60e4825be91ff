// Copyright 2026 The RigidGrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: scenario runs, rigidity checks, one-shot force
// plans, robustness sweeps and log reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rigidgrasp/harness.hpp"
#include "rigidgrasp/linalg.hpp"
#include "rigidgrasp/scenario.hpp"

namespace {

using nlohmann::json;

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<double> noise_std;
  std::optional<int> max_iter;
};

rg::ScenarioConfig load_with_overrides(const std::string& path, const RunOverrides& ov) {
  std::ifstream in(path);
  if (!in) throw rg::ParseError("cannot open scenario file: " + path);
  json j;
  in >> j;
  if (ov.seed) j["seed"] = *ov.seed;
  if (ov.noise_std) rg::set_json_path(j, "plant.noise_pos_std_m", *ov.noise_std);
  if (ov.max_iter) rg::set_json_path(j, "mapper.max_iterations", static_cast<double>(*ov.max_iter));
  return rg::parse_scenario(j);
}

bool has_margin_warning(const rg::RunLog& log) {
  if (log.monotonicity_flag) return true;
  for (const auto& r : log.records) {
    for (int i = 0; i < r.cone_ratio.size(); ++i) {
      if (r.cone_ratio(i) > 0.9) return true;
    }
  }
  return false;
}

std::vector<double> parse_range(const std::string& spec) {
  // "a:b:n" -> n values linearly spaced over [a, b].
  double a = 0, b = 0;
  int n = 0;
  if (sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1) {
    throw rg::ParseError("range must be a:b:n with n >= 1, got '" + spec + "'");
  }
  std::vector<double> values;
  for (int i = 0; i < n; ++i) {
    values.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidity-based grasp force planning and simulation"};
  app.require_subcommand(1);

  std::string scenario_path, framework_path, snapshot_path, log_path, csv_path, report_path;
  std::string sweep_param, sweep_range;
  RunOverrides overrides;
  bool strict = false;
  uint64_t seed_arg = 0;
  double noise_arg = 0.0;
  int max_iter_arg = 0;

  auto* run = app.add_subcommand("run", "run a scenario end to end");
  run->add_option("scenario", scenario_path, "scenario config file")->required();
  auto* seed_opt = run->add_option("--seed", seed_arg, "override the scenario seed");
  auto* noise_opt = run->add_option("--noise-std", noise_arg, "override position noise std (m)");
  auto* iter_opt = run->add_option("--max-iter", max_iter_arg, "override MPC iterations");
  run->add_option("--log", log_path, "write the run log (JSON lines)");
  run->add_option("--csv", csv_path, "write the flat CSV export");
  run->add_flag("--strict", strict, "nonzero exit on any constraint-margin warning");

  auto* check = app.add_subcommand("check-rigidity", "rank test of a contact framework");
  check->add_option("framework", framework_path, "framework file")->required();

  auto* plan = app.add_subcommand("plan-forces", "one-shot force plan from a snapshot");
  plan->add_option("snapshot", snapshot_path, "snapshot file")->required();
  plan->add_option("--log", log_path, "write the plan as JSON");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep of a scenario");
  sweep->add_option("scenario", scenario_path, "scenario config file")->required();
  sweep->add_option("--param", sweep_param, "dotted config path, e.g. plant.mass_kg")->required();
  sweep->add_option("--range", sweep_range, "a:b:n linear range")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed_arg, "override the scenario seed");

  auto* report = app.add_subcommand("report", "summarize a run log");
  report->add_option("runlog", report_path, "JSONL run log")->required();
  report->add_option("--csv", csv_path, "re-export the records as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (*seed_opt) overrides.seed = seed_arg;
      if (*noise_opt) overrides.noise_std = noise_arg;
      if (*iter_opt) overrides.max_iter = max_iter_arg;
      const rg::ScenarioConfig sc = load_with_overrides(scenario_path, overrides);
      const rg::RunLog log = rg::run_scenario(sc);
      if (!log_path.empty()) rg::write_jsonl(log, log_path);
      if (!csv_path.empty()) rg::write_csv(log, csv_path);
      std::cout << rg::summarize(log);
      if (!log.success) return 1;
      if (strict && has_margin_warning(log)) {
        std::cout << "strict: constraint-margin warning present\n";
        return 3;
      }
      return 0;
    }

    if (check->parsed()) {
      const rg::ContactFramework F = rg::load_framework_file(framework_path);
      const auto eval = rg::is_infinitesimally_rigid(F);
      std::cout << "vertices: " << F.m << "\nedges: " << F.edge_count()
                << "\nrank: " << eval.rank << " (required " << 3 * F.m - 6 << ")\n"
                << "rigid: " << (eval.is_rigid ? "yes" : "no") << "\n";
      return eval.is_rigid ? 0 : 1;
    }

    if (plan->parsed()) {
      const rg::Snapshot snap = rg::load_snapshot_file(snapshot_path);
      rg::PlannerInputs in;
      in.grasp = snap.grasp;
      in.framework = snap.framework;
      in.friction = snap.friction;
      in.gravity_wrench = snap.gravity_wrench;
      in.task_inertia = snap.task_inertia;
      in.contact_velocity = snap.contact_velocity;
      in.alpha = snap.alpha;
      const rg::ForcePlan fp = rg::plan_contact_forces(in);
      json j;
      auto vec = [](const rg::VecX& v) {
        json a = json::array();
        for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
      };
      j["f_ope"] = vec(fp.f_ope);
      j["f_int_R"] = vec(fp.f_int_R);
      j["f_int_mu"] = vec(fp.f_int_mu);
      j["f_c"] = vec(fp.f_c);
      j["nlp_used"] = fp.nlp_used;
      json margins = json::array();
      for (const auto& cm : fp.margins) {
        margins.push_back({{"normal_N", cm.normal},
                           {"tangential_N", cm.tangential},
                           {"ratio", cm.ratio},
                           {"ok", cm.ok()}});
      }
      j["margins"] = margins;
      std::cout << j.dump(2) << "\n";
      if (!log_path.empty()) {
        std::ofstream out(log_path);
        out << j.dump(2) << "\n";
      }
      return 0;
    }

    if (sweep->parsed()) {
      std::ifstream in(scenario_path);
      if (!in) throw rg::ParseError("cannot open scenario file: " + scenario_path);
      json base;
      in >> base;
      if (*sweep_seed) base["seed"] = seed_arg;
      const auto values = parse_range(sweep_range);
      const auto points = rg::run_sweep(base, sweep_param, values);
      bool all_ok = true;
      for (const auto& p : points) {
        std::cout << sweep_param << "=" << p.value << "  success=" << (p.success ? 1 : 0)
                  << "  max_error_mm=" << p.max_error * 1e3 << (p.slip ? "  slip" : "")
                  << (p.deformation ? "  deformation" : "") << (p.dropped ? "  dropped" : "");
        if (!p.success && !p.failure_reason.empty()) std::cout << "  (" << p.failure_reason << ")";
        std::cout << "\n";
        all_ok = all_ok && p.success;
      }
      return all_ok ? 0 : 1;
    }

    if (report->parsed()) {
      const rg::RunLog log = rg::read_jsonl(report_path);
      if (!csv_path.empty()) rg::write_csv(log, csv_path);
      std::cout << rg::summarize(log);
      return log.success ? 0 : 1;
    }
  } catch (const rg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
