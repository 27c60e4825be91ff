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

#include "rigidgrasp/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rigidgrasp/linalg.hpp"
#include "rigidgrasp/motion_mapper.hpp"
#include "rigidgrasp/plant.hpp"
#include "rigidgrasp/so3.hpp"

namespace rg {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

VecX stack_rows(const MatX3& pts) {
  VecX out(3 * pts.rows());
  for (int i = 0; i < pts.rows(); ++i) out.segment<3>(3 * i) = pts.row(i).transpose();
  return out;
}

MatX3 unstack(const VecX& v) {
  MatX3 out(v.size() / 3, 3);
  for (int i = 0; i < out.rows(); ++i) out.row(i) = v.segment<3>(3 * i).transpose();
  return out;
}

std::vector<std::pair<int, int>> framework_edges(const ScenarioConfig& sc, int m) {
  if (sc.grasp.complete_edges) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
    }
    return edges;
  }
  return sc.grasp.edges;
}

VecX default_ik_seed(const HandModel& model) {
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();
  VecX q = VecX::Zero(m * n);
  for (int i = 0; i < m; ++i) {
    q(i * n + 1) = -1.0;
    if (n > 2) q(i * n + 2) = 0.8;
    if (n > 3) q(i * n + 3) = 0.8;
  }
  return q.cwiseMax(model.joint_lower).cwiseMin(model.joint_upper);
}

Pose waypoint_pose(const Pose& home, const Vec3& offset, double yaw) {
  Pose target;
  target.p = home.p + offset;
  target.R = so3::exp(Vec3(0, 0, yaw)) * home.R;
  return target;
}

}  // namespace

double RunLog::max_waypoint_error() const {
  double e = 0.0;
  for (const auto& w : waypoints) e = std::max(e, w.final_error);
  return e;
}

double RunLog::mean_waypoint_error() const {
  if (waypoints.empty()) return 0.0;
  double e = 0.0;
  for (const auto& w : waypoints) e += w.final_error;
  return e / waypoints.size();
}

double RunLog::max_trd() const {
  double t = 0.0;
  for (const auto& r : records) t = std::max(t, r.trd_percent);
  return t;
}

RunLog run_mpc(const ScenarioConfig& sc) {
  RunLog log;
  log.scenario = sc.name;
  log.seed = sc.seed;

  HandModel model = build_hand(sc.hand);
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();

  MatX3 points0, normals0;
  initial_contacts(sc, &points0, &normals0);
  if (points0.rows() != m) {
    throw ParseError("scenario: contact count must match finger count for the MPC runner");
  }

  // Initial grasp: fingertips at the contact ring, tip frames calibrated to
  // the grasp contact frames.
  VecX q = ik_fingertips(model, default_ik_seed(model), points0);
  std::vector<Mat3> frames0(m);
  for (int i = 0; i < m; ++i) {
    frames0[i] = contact_frame(normals0.row(i).transpose());
    const auto fk = chain_kinematics(model.fingers[i], q.segment(i * n, n));
    model.fingers[i].tip_rot = fk.tip.R.transpose() * frames0[i];
  }

  const Pose home{sc.object.center, Mat3::Identity()};
  const Pose inv0 = home.inverse();
  std::vector<Vec3> contact_obj(m), normal_obj(m);
  std::vector<Mat3> frame_obj(m);
  for (int i = 0; i < m; ++i) {
    contact_obj[i] = inv0.apply(points0.row(i).transpose());
    normal_obj[i] = inv0.R * normals0.row(i).transpose();
    frame_obj[i] = inv0.R * frames0[i];
  }

  const auto edges = framework_edges(sc, m);
  const ContactFramework F0(m, stack_rows(points0), edges);
  const auto rigidity0 = is_infinitesimally_rigid(F0);
  if (!rigidity0.is_rigid) {
    throw DomainError("scenario: initial contact framework is not infinitesimally rigid");
  }

  const FrictionParams fp = planner_friction(sc);
  const double mass_assumed = planner_mass(sc);
  Vec6 g_o = Vec6::Zero();
  g_o.head<3>() = mass_assumed * 9.81 * sc.gravity_dir;

  const PlantConfig pcfg = build_plant_config(sc);
  PlantState state = make_plant_state(pcfg, home, points0, normals0);
  NoiseRng rng(sc.seed);

  {
    GraspState gs0;
    gs0.points = points0;
    gs0.normals = normals0;
    gs0.object_cm = home.p;
    gs0.mass = mass_assumed;
    gs0.validate();
    if (numerical_rank(grasp_matrix(gs0), 1e-9) < 6) {
      throw DomainError("scenario: initial grasp matrix is rank deficient");
    }
  }

  VecX q_cur = q;
  MatX warm_traj;
  VecX warm_fmu;
  MatX3 prev_contacts = points0;
  bool have_prev = false;
  MatX3 exec_baseline;
  bool have_baseline = false;
  int global_iter = 0;
  const bool noise_free = pcfg.noise_pos_std == 0.0 && pcfg.noise_rot_std == 0.0;

  for (size_t w_idx = 0; w_idx < sc.waypoints.size(); ++w_idx) {
    const double yaw = w_idx < sc.waypoint_yaw.size() ? sc.waypoint_yaw[w_idx] : 0.0;
    const Pose target = waypoint_pose(home, sc.waypoints[w_idx], yaw);
    WaypointResult wp;
    wp.index = static_cast<int>(w_idx);
    double prev_err = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < sc.mapper.max_iterations; ++iter) {
      const auto t0 = Clock::now();
      const Pose obs = observe(state, pcfg, rng);
      const double pos_err = (obs.p - target.p).norm();
      const double rot_err = so3::log(obs.R * target.R.transpose(), 1e-6).norm();
      if (pos_err <= sc.mapper.delta_m) {
        wp.reached = true;
        wp.final_error = pos_err;
        wp.final_observed = obs.p;
        break;
      }
      if (noise_free && pos_err > prev_err + 1e-9) log.monotonicity_flag = true;
      prev_err = pos_err;
      wp.iterations = iter + 1;
      wp.final_error = pos_err;
      wp.final_observed = obs.p;

      // Contact ring at the observed pose.
      MatX3 s(m, 3), nrm(m, 3);
      std::vector<Mat3> frames(m);
      for (int i = 0; i < m; ++i) {
        s.row(i) = obs.apply(contact_obj[i]).transpose();
        nrm.row(i) = (obs.R * normal_obj[i]).transpose();
        frames[i] = obs.R * frame_obj[i];
      }

      RunRecord rec;
      rec.iteration = global_iter++;
      rec.waypoint = static_cast<int>(w_idx);
      rec.observed_pos = obs.p;
      rec.observed_rot = so3::log(obs.R, 1e-6);
      rec.pos_error = pos_err;
      rec.rot_error = rot_err;

      try {
        PlannerInputs in;
        in.grasp.points = s;
        in.grasp.normals = nrm;
        in.grasp.object_cm = obs.p;
        in.grasp.object_pose = obs;
        in.grasp.mass = mass_assumed;
        in.framework = ContactFramework(m, stack_rows(s), edges);
        in.friction = fp;
        in.gravity_wrench = g_o;
        in.task_inertia = task_inertia(model, JointState(q_cur));
        in.contact_velocity = have_prev ? VecX(stack_rows(s) - stack_rows(prev_contacts))
                                        : VecX(VecX::Zero(3 * m));
        // Reference contact acceleration from the pose path toward the
        // waypoint (second-order difference over the interpolated path).
        {
          const Vec3 dp = target.p - obs.p;
          const Vec3 drot = so3::log(target.R * obs.R.transpose(), 1e-6);
          auto path_point = [&](double sigma, int i) {
            Pose ps;
            ps.p = obs.p + sigma * dp;
            ps.R = so3::exp(sigma * drot) * obs.R;
            return ps.apply(contact_obj[i]);
          };
          VecX alpha(3 * m);
          for (int i = 0; i < m; ++i) {
            alpha.segment<3>(3 * i) =
                (path_point(1.0, i) - 2.0 * path_point(0.5, i) + path_point(0.0, i)) / 0.25;
          }
          in.alpha = alpha;
        }
        in.nlp_options = sc.solver;
        in.warm_start_f_mu = warm_fmu;
        const ForcePlan plan = plan_contact_forces(in);
        warm_fmu = plan.f_int_mu;

        rec.f_ope = plan.f_ope;
        rec.f_int_r = plan.f_int_R;
        rec.f_int_mu = plan.f_int_mu;
        rec.f_c = plan.f_c;
        rec.nlp_used = plan.nlp_used;
        decompose_force(plan.f_c, frames, rec.f_perp, rec.f_par);
        rec.cone_ratio.resize(m);
        for (int i = 0; i < m; ++i) rec.cone_ratio(i) = plan.margins[i].ratio;

        // Penetration offsets and virtual targets (force -> position).
        MatX3 D(m, 3);
        for (int i = 0; i < m; ++i) {
          D.row(i) =
              penetration_world(sc.gains, frames[i], plan.f_c.segment<3>(3 * i)).transpose();
        }
        VirtualTargets vt = virtual_targets(s, D, frames0);

        NlpOptions traj_opts = sc.solver;
        const TrajectorySolution traj =
            solve_joint_trajectory(model, JointState(q_cur), vt, obs, target, sc.mapper,
                                   warm_traj.size() > 0 ? &warm_traj : nullptr, &traj_opts);
        if (traj.report.status != SolveStatus::kConverged &&
            traj.report.max_violation > 10 * traj_opts.feas_tol) {
          throw ConvergenceError("trajectory solver failed: " + traj.report.message);
        }
        warm_traj = traj.q;
        const VecX q_next = traj.q.row(0).transpose();
        rec.q_cmd = q_next;

        state = plant_step(state, JointState(q_next), model, pcfg);
        const FailureReport failures = check_failures(state, pcfg);
        rec.slip = failures.slip;
        rec.deformation = failures.deformation;
        rec.dropped = failures.dropped;
        rec.realized_f_perp.resize(m);
        for (int i = 0; i < m; ++i) {
          rec.realized_f_perp(i) = pcfg.stiffness.z() * state.contacts[i].penetration;
        }

        if (!have_baseline) {
          exec_baseline = state.tips;
          have_baseline = true;
        }
        const ContactFramework Fexec(m, stack_rows(state.tips), edges);
        const ContactFramework Fbase(m, stack_rows(exec_baseline), edges);
        rec.trd_percent = trd(Fbase, Fexec);
        rec.trd_executed_percent = rec.trd_percent;

        q_cur = q_next;
        prev_contacts = s;
        have_prev = true;
        rec.wall_ms = ms_since(t0);
        log.records.push_back(rec);

        if (failures.any()) {
          log.failure_reason = "waypoint " + std::to_string(w_idx) + ": " + failures.describe();
          log.waypoints.push_back(wp);
          log.success = false;
          return log;
        }
      } catch (const Error& e) {
        rec.wall_ms = ms_since(t0);
        log.records.push_back(rec);
        log.failure_reason = "waypoint " + std::to_string(w_idx) + ": " + e.what();
        log.waypoints.push_back(wp);
        log.success = false;
        return log;
      }
    }

    if (!wp.reached) {
      // One final observation: the last executed step may have converged.
      NoiseRng probe = rng;
      const Pose obs = observe(state, pcfg, probe);
      const double pos_err = (obs.p - target.p).norm();
      if (pos_err <= sc.mapper.delta_m) {
        wp.reached = true;
        wp.final_error = pos_err;
        wp.final_observed = obs.p;
      }
    }
    log.waypoints.push_back(wp);
    if (!wp.reached) {
      log.failure_reason =
          "waypoint " + std::to_string(w_idx) + " not reached within the iteration budget";
      log.success = false;
      return log;
    }
  }
  log.success = true;
  return log;
}

RunLog run_yarn_frame(const ScenarioConfig& sc) {
  RunLog log;
  log.scenario = sc.name;
  log.seed = sc.seed;
  log.yarn = true;

  HandModel model = build_hand(sc.hand);
  const int m = model.num_fingers();
  if (m != 4) throw DomainError("yarn scenario requires a 4-finger hand");

  MatX3 tips = yarn_corners(sc.yarn);
  const ContactFramework F0 = ContactFramework::complete(stack_rows(tips));
  const auto rigidity0 = is_infinitesimally_rigid(F0);
  if (!rigidity0.is_rigid) {
    throw DomainError("yarn scenario: initial fingertip framework is not infinitesimally rigid");
  }

  VecX q = ik_fingertips(model, default_ik_seed(model), tips);
  const ContactFramework F0_exec =
      ContactFramework::complete(stack_rows([&] {
        MatX3 t(m, 3);
        const auto fk = forward_kinematics(model, JointState(q));
        for (int i = 0; i < m; ++i) t.row(i) = fk[i].p.transpose();
        return t;
      }()));

  Vec3 centroid = Vec3::Zero();
  for (int i = 0; i < m; ++i) centroid += tips.row(i).transpose();
  centroid /= m;
  const Vec3 centroid0 = centroid;
  Mat3 R_now = Mat3::Identity();

  int global_iter = 0;
  for (size_t w_idx = 0; w_idx < sc.waypoints.size(); ++w_idx) {
    const double yaw = w_idx < sc.waypoint_yaw.size() ? sc.waypoint_yaw[w_idx] : 0.0;
    const Vec3 target_c = centroid0 + sc.waypoints[w_idx];
    const Mat3 target_R = so3::exp(Vec3(0, 0, yaw));
    WaypointResult wp;
    wp.index = static_cast<int>(w_idx);

    const int max_steps =
        50 + static_cast<int>(6.0 * (target_c - centroid).norm() / sc.yarn.step);
    for (int step = 0; step < max_steps; ++step) {
      const auto t0 = Clock::now();
      const Vec3 dp_full = target_c - centroid;
      const Vec3 drot_full = so3::log(target_R * R_now.transpose(), 1e-6);
      const double pos_err = dp_full.norm();
      const double rot_err = drot_full.norm();
      if (pos_err <= sc.mapper.delta_m && rot_err <= 1e-3) {
        wp.reached = true;
        wp.final_error = pos_err;
        break;
      }
      wp.iterations = step + 1;
      wp.final_error = pos_err;

      Vec3 dp = dp_full;
      if (dp.norm() > sc.yarn.step) dp *= sc.yarn.step / dp.norm();
      Vec3 dw = drot_full;
      const double rot_step = 0.05;
      if (dw.norm() > rot_step) dw *= rot_step / dw.norm();

      // Desired per-tip velocities of the twist, then the closest motion
      // satisfying the velocity-level rigidity constraint R v = 0.
      VecX v_des(3 * m);
      for (int i = 0; i < m; ++i) {
        v_des.segment<3>(3 * i) = dp + dw.cross(Vec3(tips.row(i).transpose()) - centroid);
      }
      const ContactFramework F(m, stack_rows(tips), F0.edges);
      EqQP qp;
      qp.H = 2.0 * MatX::Identity(3 * m, 3 * m);
      qp.g = -2.0 * v_des;
      qp.A = rigidity_matrix(F);
      qp.b = VecX::Zero(F.edge_count());
      const SolveReport sol = solve_eq_qp(qp);

      // Extract the rigid twist of the constrained motion and apply it as an
      // exact rigid displacement.
      MatX Tw(3 * m, 6);
      for (int i = 0; i < m; ++i) {
        Tw.block<3, 3>(3 * i, 0) = Mat3::Identity();
        Tw.block<3, 3>(3 * i, 3) = -skew(Vec3(tips.row(i).transpose()) - centroid);
      }
      const Eigen::Matrix<double, 6, 1> twist =
          (Tw.transpose() * Tw).ldlt().solve(Tw.transpose() * sol.x);
      const Vec3 v = twist.head<3>();
      const Vec3 w = twist.tail<3>();
      const Mat3 Rstep = so3::exp(w);
      MatX3 tips_new(m, 3);
      for (int i = 0; i < m; ++i) {
        tips_new.row(i) =
            (centroid + v + Rstep * (Vec3(tips.row(i).transpose()) - centroid)).transpose();
      }
      tips = tips_new;
      centroid += v;
      R_now = Rstep * R_now;

      RunRecord rec;
      rec.iteration = global_iter++;
      rec.waypoint = static_cast<int>(w_idx);
      rec.pos_error = (target_c - centroid).norm();
      rec.rot_error = so3::log(target_R * R_now.transpose(), 1e-6).norm();
      rec.observed_pos = centroid;
      rec.observed_rot = so3::log(R_now, 1e-6);

      try {
        q = ik_fingertips(model, q, tips);
      } catch (const Error& e) {
        rec.wall_ms = ms_since(t0);
        log.records.push_back(rec);
        log.failure_reason = "yarn step: " + std::string(e.what());
        log.waypoints.push_back(wp);
        log.success = false;
        return log;
      }
      rec.q_cmd = q;
      const auto fk = forward_kinematics(model, JointState(q));
      MatX3 exec(m, 3);
      for (int i = 0; i < m; ++i) exec.row(i) = fk[i].p.transpose();
      rec.trd_percent = trd(F0, ContactFramework(m, stack_rows(tips), F0.edges));
      rec.trd_executed_percent = trd(F0_exec, ContactFramework(m, stack_rows(exec), F0.edges));
      rec.wall_ms = ms_since(t0);
      log.records.push_back(rec);
    }

    log.waypoints.push_back(wp);
    if (!wp.reached) {
      log.failure_reason = "yarn waypoint " + std::to_string(w_idx) + " not reached";
      log.success = false;
      return log;
    }
  }
  log.success = true;
  return log;
}

RunLog run_scenario(const ScenarioConfig& sc) {
  return sc.is_yarn() ? run_yarn_frame(sc) : run_mpc(sc);
}

namespace {

json vec_to_json(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VecX json_to_vec(const json& a) {
  VecX v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

}  // namespace

json record_to_json(const RunRecord& r) {
  json j;
  j["type"] = "record";
  j["iteration"] = r.iteration;
  j["waypoint"] = r.waypoint;
  j["q_cmd"] = vec_to_json(r.q_cmd);
  j["observed_pos"] = vec_to_json(r.observed_pos);
  j["observed_rot"] = vec_to_json(r.observed_rot);
  j["pos_error_m"] = r.pos_error;
  j["rot_error_rad"] = r.rot_error;
  j["f_ope"] = vec_to_json(r.f_ope);
  j["f_int_R"] = vec_to_json(r.f_int_r);
  j["f_int_mu"] = vec_to_json(r.f_int_mu);
  j["f_c"] = vec_to_json(r.f_c);
  j["f_perp"] = vec_to_json(r.f_perp);
  j["f_par"] = vec_to_json(r.f_par);
  j["cone_ratio"] = vec_to_json(r.cone_ratio);
  j["realized_f_perp"] = vec_to_json(r.realized_f_perp);
  j["trd_percent"] = r.trd_percent;
  j["trd_executed_percent"] = r.trd_executed_percent;
  j["nlp_used"] = r.nlp_used;
  j["slip"] = r.slip;
  j["deformation"] = r.deformation;
  j["dropped"] = r.dropped;
  j["wall_ms"] = r.wall_ms;
  return j;
}

json summary_to_json(const RunLog& log) {
  json j;
  j["type"] = "summary";
  j["scenario"] = log.scenario;
  j["seed"] = log.seed;
  j["yarn"] = log.yarn;
  j["success"] = log.success;
  j["failure_reason"] = log.failure_reason;
  j["monotonicity_flag"] = log.monotonicity_flag;
  json wps = json::array();
  for (const auto& w : log.waypoints) {
    wps.push_back({{"index", w.index},
                   {"reached", w.reached},
                   {"final_error_m", w.final_error},
                   {"iterations", w.iterations},
                   {"final_observed_m", {w.final_observed.x(), w.final_observed.y(),
                                         w.final_observed.z()}}});
  }
  j["waypoints"] = wps;
  j["max_waypoint_error_m"] = log.max_waypoint_error();
  j["mean_waypoint_error_m"] = log.mean_waypoint_error();
  j["max_trd_percent"] = log.max_trd();
  return j;
}

void write_jsonl(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open log file for writing: " + path);
  for (const auto& r : log.records) out << record_to_json(r).dump() << "\n";
  out << summary_to_json(log).dump() << "\n";
}

void write_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open csv file for writing: " + path);
  const int m = log.records.empty() ? 0 : static_cast<int>(log.records.front().f_perp.size());
  out << "iteration,waypoint,pos_error_m";
  for (int i = 0; i < m; ++i) out << ",f_perp_" << i;
  for (int i = 0; i < m; ++i) out << ",f_par_" << i;
  for (int i = 0; i < m; ++i) out << ",cone_ratio_" << i;
  out << ",trd_percent,slip,deformation,dropped\n";
  char buf[64];
  auto fmt = [&buf](double v) {
    snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : log.records) {
    out << r.iteration << "," << r.waypoint << "," << fmt(r.pos_error);
    for (int i = 0; i < m; ++i) out << "," << (i < r.f_perp.size() ? fmt(r.f_perp(i)) : "");
    for (int i = 0; i < m; ++i) out << "," << (i < r.f_par.size() ? fmt(r.f_par(i)) : "");
    for (int i = 0; i < m; ++i) out << "," << (i < r.cone_ratio.size() ? fmt(r.cone_ratio(i)) : "");
    out << "," << fmt(r.trd_percent) << "," << r.slip << "," << r.deformation << "," << r.dropped
        << "\n";
  }
}

std::string summarize(const RunLog& log) {
  std::ostringstream oss;
  oss << "scenario: " << log.scenario << " (seed " << log.seed << ")\n";
  oss << "status:   " << (log.success ? "success" : "FAILED") << "\n";
  if (!log.failure_reason.empty()) oss << "reason:   " << log.failure_reason << "\n";
  oss << "waypoints reached: ";
  int reached = 0;
  for (const auto& w : log.waypoints) reached += w.reached ? 1 : 0;
  oss << reached << "/" << log.waypoints.size() << "\n";
  oss << "max waypoint error: " << log.max_waypoint_error() * 1e3 << " mm\n";
  oss << "mean waypoint error: " << log.mean_waypoint_error() * 1e3 << " mm\n";
  oss << "max TRD: " << log.max_trd() << " %\n";
  oss << "iterations logged: " << log.records.size() << "\n";
  return oss.str();
}

RunLog read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open log file: " + path);
  RunLog log;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("log file " + path + " line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "record") {
      RunRecord r;
      r.iteration = j.value("iteration", 0);
      r.waypoint = j.value("waypoint", 0);
      if (j.contains("q_cmd")) r.q_cmd = json_to_vec(j["q_cmd"]);
      r.pos_error = j.value("pos_error_m", 0.0);
      r.rot_error = j.value("rot_error_rad", 0.0);
      if (j.contains("f_perp")) r.f_perp = json_to_vec(j["f_perp"]);
      if (j.contains("f_par")) r.f_par = json_to_vec(j["f_par"]);
      if (j.contains("cone_ratio")) r.cone_ratio = json_to_vec(j["cone_ratio"]);
      if (j.contains("realized_f_perp")) r.realized_f_perp = json_to_vec(j["realized_f_perp"]);
      if (j.contains("f_ope")) r.f_ope = json_to_vec(j["f_ope"]);
      if (j.contains("f_int_R")) r.f_int_r = json_to_vec(j["f_int_R"]);
      if (j.contains("f_int_mu")) r.f_int_mu = json_to_vec(j["f_int_mu"]);
      if (j.contains("f_c")) r.f_c = json_to_vec(j["f_c"]);
      r.trd_percent = j.value("trd_percent", 0.0);
      r.trd_executed_percent = j.value("trd_executed_percent", 0.0);
      r.nlp_used = j.value("nlp_used", false);
      r.slip = j.value("slip", false);
      r.deformation = j.value("deformation", false);
      r.dropped = j.value("dropped", false);
      r.wall_ms = j.value("wall_ms", 0.0);
      log.records.push_back(r);
    } else if (type == "summary") {
      log.scenario = j.value("scenario", "");
      log.seed = j.value("seed", uint64_t{0});
      log.yarn = j.value("yarn", false);
      log.success = j.value("success", false);
      log.failure_reason = j.value("failure_reason", "");
      log.monotonicity_flag = j.value("monotonicity_flag", false);
      for (const auto& w : j.value("waypoints", json::array())) {
        WaypointResult wp;
        wp.index = w.value("index", 0);
        wp.reached = w.value("reached", false);
        wp.final_error = w.value("final_error_m", 0.0);
        wp.iterations = w.value("iterations", 0);
        if (w.contains("final_observed_m")) {
          const auto& fo = w["final_observed_m"];
          wp.final_observed = Vec3(fo[0].get<double>(), fo[1].get<double>(), fo[2].get<double>());
        }
        log.waypoints.push_back(wp);
      }
    }
  }
  return log;
}

std::vector<SweepPoint> run_sweep(const json& base_config, const std::string& param,
                                  const std::vector<double>& values) {
  std::vector<SweepPoint> out;
  for (double value : values) {
    json j = base_config;
    set_json_path(j, param, value);
    SweepPoint point;
    point.value = value;
    try {
      const ScenarioConfig sc = parse_scenario(j);
      const RunLog log = run_scenario(sc);
      point.success = log.success;
      point.failure_reason = log.failure_reason;
      point.max_error = log.max_waypoint_error();
      for (const auto& r : log.records) {
        point.slip = point.slip || r.slip;
        point.deformation = point.deformation || r.deformation;
        point.dropped = point.dropped || r.dropped;
      }
    } catch (const Error& e) {
      point.success = false;
      point.failure_reason = e.what();
    }
    out.push_back(point);
  }
  return out;
}

}  // namespace rg
