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

// The receding-horizon execution loop binding planner, mapper and plant:
// plan contact forces, convert them to virtual targets, solve the joint
// trajectory, execute its first step, observe, repeat until each waypoint is
// reached. Also the yarn-frame tracer, run logs and sweep helpers.

#ifndef RIGIDGRASP_HARNESS_HPP_
#define RIGIDGRASP_HARNESS_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "rigidgrasp/force_planner.hpp"
#include "rigidgrasp/scenario.hpp"
#include "rigidgrasp/types.hpp"

namespace rg {

struct RunRecord {
  int iteration = 0;       // global, monotone
  int waypoint = 0;
  VecX q_cmd;
  Vec3 observed_pos = Vec3::Zero();
  Vec3 observed_rot = Vec3::Zero();  // rotation vector of the observed pose
  double pos_error = 0.0;            // m, to the active waypoint
  double rot_error = 0.0;            // rad
  VecX f_ope, f_int_r, f_int_mu, f_c;
  VecX f_perp, f_par, cone_ratio;    // per finger, planned
  VecX realized_f_perp;              // per finger, plant normal force after the step
  double trd_percent = 0.0;
  double trd_executed_percent = 0.0;
  bool nlp_used = false;
  bool slip = false;
  bool deformation = false;
  bool dropped = false;
  double wall_ms = 0.0;
};

struct WaypointResult {
  int index = 0;
  bool reached = false;
  double final_error = 0.0;  // m
  int iterations = 0;
  Vec3 final_observed = Vec3::Zero();  // observed position the error was computed from
};

struct RunLog {
  std::string scenario;
  uint64_t seed = 0;
  bool yarn = false;
  std::vector<RunRecord> records;
  std::vector<WaypointResult> waypoints;
  bool success = false;
  bool monotonicity_flag = false;  // waypoint error increased in a noise-free run
  std::string failure_reason;

  double max_waypoint_error() const;
  double mean_waypoint_error() const;
  double max_trd() const;
};

/// Full MPC run of an object-manipulation scenario.
RunLog run_mpc(const ScenarioConfig& sc);

/// Yarn-frame trace: fingertip framework follows the waypoints under the
/// velocity-level rigidity constraint; TRD is logged per step.
RunLog run_yarn_frame(const ScenarioConfig& sc);

/// Dispatch on the scenario kind.
RunLog run_scenario(const ScenarioConfig& sc);

/// Line-delimited JSON records (one per iteration) plus a trailing summary
/// line. Wall-clock fields carry timing only and are excluded from
/// reproducibility comparisons.
void write_jsonl(const RunLog& log, const std::string& path);
nlohmann::json record_to_json(const RunRecord& r);
nlohmann::json summary_to_json(const RunLog& log);

/// Flat CSV: iteration, waypoint, pose error, per-finger normal/tangential
/// force and cone ratio, TRD, flags.
void write_csv(const RunLog& log, const std::string& path);

/// Human-readable run summary.
std::string summarize(const RunLog& log);

/// Reads a JSONL run log back (summary statistics for `report`).
RunLog read_jsonl(const std::string& path);

struct SweepPoint {
  double value = 0.0;
  bool success = false;
  std::string failure_reason;
  double max_error = 0.0;
  bool slip = false;
  bool deformation = false;
  bool dropped = false;
};

/// Runs the scenario once per value of the dotted-path parameter.
std::vector<SweepPoint> run_sweep(const nlohmann::json& base_config, const std::string& param,
                                  const std::vector<double>& values);

}  // namespace rg

#endif  // RIGIDGRASP_HARNESS_HPP_
