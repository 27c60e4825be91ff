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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rigidgrasp/force_planner.hpp"
#include "rigidgrasp/grasp.hpp"
#include "rigidgrasp/hand.hpp"
#include "rigidgrasp/harness.hpp"
#include "rigidgrasp/motion_mapper.hpp"
#include "rigidgrasp/optimizer.hpp"
#include "rigidgrasp/rigidity.hpp"
#include "rigidgrasp/scenario.hpp"
#include "rigidgrasp/so3.hpp"

namespace py = pybind11;
using namespace rg;

namespace {

ContactFramework make_framework(const MatX3& points,
                                const std::optional<std::vector<std::pair<int, int>>>& edges) {
  if (!edges) return ContactFramework::complete(points);
  VecX stacked(3 * points.rows());
  for (int i = 0; i < points.rows(); ++i) stacked.segment<3>(3 * i) = points.row(i).transpose();
  return ContactFramework(static_cast<int>(points.rows()), stacked, *edges);
}

py::dict plan_forces_py(const MatX3& points, const MatX3& normals, double mass,
                        const Vec3& gravity_dir, double mu, double f_n_min, double f_n_max,
                        std::optional<MatX> task_inertia_in, std::optional<VecX> v_c_in,
                        std::optional<VecX> alpha_in) {
  const int m = static_cast<int>(points.rows());
  PlannerInputs in;
  in.grasp.points = points;
  in.grasp.normals = normals;
  in.grasp.object_cm = points.colwise().mean().transpose();
  in.grasp.mass = mass;
  in.framework = ContactFramework::complete(points);
  in.friction = FrictionParams{mu, f_n_min, f_n_max};
  in.gravity_wrench.setZero();
  in.gravity_wrench.head<3>() = mass * 9.81 * gravity_dir.normalized();
  in.task_inertia = task_inertia_in ? *task_inertia_in : MatX(MatX::Identity(3 * m, 3 * m));
  in.contact_velocity = v_c_in ? *v_c_in : VecX(VecX::Zero(3 * m));
  in.alpha = alpha_in ? *alpha_in : VecX(VecX::Zero(3 * m));
  const ForcePlan plan = plan_contact_forces(in);
  py::dict out;
  out["f_ope"] = plan.f_ope;
  out["f_int_R"] = plan.f_int_R;
  out["f_int_mu"] = plan.f_int_mu;
  out["f_c"] = plan.f_c;
  out["nlp_used"] = plan.nlp_used;
  py::list ratios;
  for (const auto& cm : plan.margins) ratios.append(cm.ratio);
  out["cone_ratio"] = ratios;
  return out;
}

py::dict run_scenario_py(const std::string& path, std::optional<uint64_t> seed,
                         std::optional<std::string> log_path,
                         std::optional<std::string> csv_path) {
  ScenarioConfig sc = load_scenario_file(path);
  if (seed) {
    sc.seed = *seed;
    sc.raw["seed"] = *seed;
  }
  const RunLog log = run_scenario(sc);
  if (log_path) write_jsonl(log, *log_path);
  if (csv_path) write_csv(log, *csv_path);
  py::dict out;
  out["scenario"] = log.scenario;
  out["success"] = log.success;
  out["failure_reason"] = log.failure_reason;
  out["waypoints_reached"] = [&] {
    int n = 0;
    for (const auto& w : log.waypoints) n += w.reached ? 1 : 0;
    return n;
  }();
  out["waypoints_total"] = static_cast<int>(log.waypoints.size());
  out["max_waypoint_error_m"] = log.max_waypoint_error();
  out["mean_waypoint_error_m"] = log.mean_waypoint_error();
  out["max_trd_percent"] = log.max_trd();
  out["iterations"] = static_cast<int>(log.records.size());
  return out;
}

}  // namespace

PYBIND11_MODULE(_rigidgrasp, mod) {
  mod.doc() = "rigidity-based multi-finger grasp force planning and simulation";

  py::register_exception<DomainError>(mod, "DomainError");
  py::register_exception<InfeasibleError>(mod, "InfeasibleError");
  py::register_exception<ParseError>(mod, "ParseFileError");

  mod.def("so3_exp", &so3::exp, py::arg("w"));
  mod.def("so3_log", [](const Mat3& R) { return so3::log(R, 1e-8); }, py::arg("R"));

  mod.def(
      "rigidity_function",
      [](const MatX3& points, std::optional<std::vector<std::pair<int, int>>> edges) {
        return rigidity_function(make_framework(points, edges));
      },
      py::arg("points"), py::arg("edges") = py::none());
  mod.def(
      "rigidity_matrix",
      [](const MatX3& points, std::optional<std::vector<std::pair<int, int>>> edges) {
        return rigidity_matrix(make_framework(points, edges));
      },
      py::arg("points"), py::arg("edges") = py::none());
  mod.def(
      "rigidity_matrix_rate",
      [](const MatX3& points, const VecX& v_c,
         std::optional<std::vector<std::pair<int, int>>> edges) {
        return rigidity_matrix_rate(make_framework(points, edges), v_c);
      },
      py::arg("points"), py::arg("v_c"), py::arg("edges") = py::none());
  mod.def(
      "rigidity_rank",
      [](const MatX3& points, std::optional<std::vector<std::pair<int, int>>> edges) {
        const auto eval = is_infinitesimally_rigid(make_framework(points, edges));
        return py::make_tuple(eval.rank, eval.is_rigid);
      },
      py::arg("points"), py::arg("edges") = py::none());
  mod.def(
      "trd",
      [](const MatX3& initial, const MatX3& current,
         std::optional<std::vector<std::pair<int, int>>> edges) {
        return trd(make_framework(initial, edges), make_framework(current, edges));
      },
      py::arg("initial"), py::arg("current"), py::arg("edges") = py::none());

  mod.def(
      "grasp_matrix",
      [](const MatX3& points, const Vec3& object_cm) {
        GraspState gs;
        gs.points = points;
        gs.normals = MatX3::Zero(points.rows(), 3);
        for (int i = 0; i < points.rows(); ++i) gs.normals(i, 2) = 1.0;
        gs.object_cm = object_cm;
        return grasp_matrix(gs);
      },
      py::arg("points"), py::arg("object_cm"));
  mod.def("contact_frame", &contact_frame, py::arg("outward_normal"));
  mod.def(
      "cone_margin",
      [](const Vec3& f_local, double mu, double f_n_min, double f_n_max) {
        const ConeMargin cm = cone_margin(f_local, FrictionParams{mu, f_n_min, f_n_max});
        py::dict out;
        out["tangential"] = cm.tangential;
        out["normal"] = cm.normal;
        out["ratio"] = cm.ratio;
        out["cone_violated"] = cm.cone_violated;
        out["below_min"] = cm.below_min;
        out["above_max"] = cm.above_max;
        return out;
      },
      py::arg("f_local"), py::arg("mu"), py::arg("f_n_min"), py::arg("f_n_max"));

  mod.def("operational_force", &operational_force, py::arg("G"), py::arg("g_o"));
  mod.def("rigidity_internal_force", &rigidity_internal_force, py::arg("R"), py::arg("R_dot"),
          py::arg("M_c"), py::arg("v_c"), py::arg("alpha"));
  mod.def("plan_forces", &plan_forces_py, py::arg("points"), py::arg("normals"), py::arg("mass"),
          py::arg("gravity_dir") = Vec3(0, 0, -1), py::arg("mu") = 0.65,
          py::arg("f_n_min") = 0.1, py::arg("f_n_max") = 1.0,
          py::arg("task_inertia") = py::none(), py::arg("v_c") = py::none(),
          py::arg("alpha") = py::none());

  mod.def(
      "penetration_distance",
      [](const Vec3& gains_mm_per_N, const Vec3& f_local) {
        ComplianceGains g;
        g.mm_per_N = gains_mm_per_N;
        return penetration_distance(g, f_local);
      },
      py::arg("gains_mm_per_N"), py::arg("f_local_N"));

  mod.def(
      "solve_eq_qp",
      [](const MatX& H, const VecX& g, const MatX& A, const VecX& b) {
        const SolveReport rep = solve_eq_qp(EqQP{H, g, A, b});
        return py::make_tuple(rep.x, rep.objective);
      },
      py::arg("H"), py::arg("g"), py::arg("A"), py::arg("b"));

  py::class_<HandModel>(mod, "HandModel")
      .def_static("default", &make_default_hand, py::arg("fingers") = 4,
                  py::arg("base_radius") = 0.08)
      .def_property_readonly("num_fingers", &HandModel::num_fingers)
      .def_property_readonly("joints_per_finger", &HandModel::joints_per_finger)
      .def_property_readonly("joint_lower", [](const HandModel& h) { return h.joint_lower; })
      .def_property_readonly("joint_upper", [](const HandModel& h) { return h.joint_upper; })
      .def("fingertips",
           [](const HandModel& h, const VecX& q) {
             const auto tips = forward_kinematics(h, JointState(q));
             MatX3 out(tips.size(), 3);
             for (size_t i = 0; i < tips.size(); ++i) out.row(i) = tips[i].p.transpose();
             return out;
           })
      .def("jacobian",
           [](const HandModel& h, const VecX& q) { return hand_jacobian(h, JointState(q)); })
      .def("task_inertia",
           [](const HandModel& h, const VecX& q) { return task_inertia(h, JointState(q)); });

  mod.def("run_scenario", &run_scenario_py, py::arg("path"), py::arg("seed") = py::none(),
          py::arg("log_path") = py::none(), py::arg("csv_path") = py::none());
}
