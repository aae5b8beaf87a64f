#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "edgevo/edge_selection.hpp"
#include "edgevo/error.hpp"
#include "edgevo/mapping.hpp"
#include "edgevo/pipeline.hpp"
#include "edgevo/trajectory.hpp"
#include "edgevo/uncertainty.hpp"

namespace py = pybind11;
using namespace edgevo;

namespace {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Rows of (stamp, tx, ty, tz, qx, qy, qz, qw).
Eigen::MatrixXd trajectory_rows(const Trajectory& t) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(t.size()), 8);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& e = t[i];
    const auto r = static_cast<Eigen::Index>(i);
    out(r, 0) = e.stamp;
    out.block<1, 3>(r, 1) = e.pose.translation().transpose();
    out.block<1, 4>(r, 4) = e.pose.quaternion_xyzw().transpose();
  }
  return out;
}

py::dict stats(const ErrorStats& s) {
  py::dict d;
  d["rmse"] = s.rmse;
  d["mean"] = s.mean;
  d["median"] = s.median;
  d["max"] = s.max;
  return d;
}

py::dict rpe_dict(const RpeReport& r) {
  py::dict d;
  d["delta"] = r.delta;
  d["scale"] = r.scale;
  d["alignment"] = to_string(r.alignment);
  d["translation"] = stats(r.translation);
  d["rotation_deg"] = stats(r.rotation);
  d["translation_errors"] = r.translation_errors;
  d["rotation_errors_deg"] = r.rotation_errors_deg;
  return d;
}

std::vector<LineSegment2D> segments_from(const std::vector<std::tuple<int, double, double, double, double>>& rows) {
  std::vector<LineSegment2D> out;
  out.reserve(rows.size());
  for (const auto& [id, u1, v1, u2, v2] : rows) out.push_back(LineSegment2D::make(id, {u1, v1}, {u2, v2}));
  return out;
}

}  // namespace

PYBIND11_MODULE(_edgevo, m) {
  m.doc() = "Edge-assisted direct visual odometry core";

  static py::exception<Error> error(m, "EdgevoError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def(
      "exp_map", [](const Vector6d& xi) { return exp_map(Twist::from_vector(xi)).matrix(); }, py::arg("xi"),
      "4x4 transform of the twist (t; w).");
  m.def(
      "log_map",
      [](const Eigen::Matrix4d& T) -> Vector6d {
        return log_map(Pose(T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>())).vector();
      },
      py::arg("T"));

  m.def("disparity_variance", &disparity_variance, py::arg("sigma_l2"), py::arg("sigma_g2"), py::arg("theta"));
  m.def(
      "line_coefficient_covariance",
      [](const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, double sigma) {
        return line_coefficient_covariance({p1.x(), p1.y()}, {p2.x(), p2.y()}, sigma);
      },
      py::arg("p1"), py::arg("p2"), py::arg("sigma") = kDefaultEndpointSigma);
  m.def(
      "ekf_depth_update",
      [](double mean, double variance, double obs, double obs_variance) {
        const auto h = ekf_depth_update({mean, variance}, obs, obs_variance);
        return std::make_pair(h.mean, h.variance);
      },
      py::arg("mean"), py::arg("variance"), py::arg("obs"), py::arg("obs_variance"),
      "Fused (mean, variance) of an inverse-depth hypothesis and one observation.");

  m.def(
      "select_edges",
      [](const std::vector<std::tuple<int, double, double, double, double>>& rows, int width, double overlap) {
        const GroundSet g{segments_from(rows), width};
        g.validate();
        const auto conflicts = find_conflicts(g, overlap);
        const auto r = greedy_select(g, conflicts);
        return py::make_tuple(std::vector<int>(r.selected.begin(), r.selected.end()), r.score);
      },
      py::arg("segments"), py::arg("width"), py::arg("overlap") = 0.5,
      "Greedy column-coverage selection over (id, u1, v1, u2, v2) rows; returns (ids, score).");

  m.def(
      "read_trajectory", [](const std::string& path) { return trajectory_rows(read_trajectory(path)); },
      py::arg("path"));
  m.def(
      "rpe",
      [](const std::string& gt, const std::string& est, int delta, const std::string& alignment) {
        return rpe_dict(rpe(read_trajectory(gt), read_trajectory(est), delta, parse_scale_alignment(alignment)));
      },
      py::arg("gt"), py::arg("est"), py::arg("delta") = 1, py::arg("alignment") = "similarity");

  m.def(
      "run",
      [](const std::string& scene, std::optional<int> frames, const std::string& noise, std::uint64_t seed,
         double photometric_weight, double geometric_weight, bool oracle_recover, const std::string& out_dir) {
        RunOptions o;
        o.scene = scene;
        o.frames = frames;
        o.noise = parse_noise(noise);
        o.seed = seed;
        o.photometric_weight = photometric_weight;
        o.geometric_weight = geometric_weight;
        o.oracle_recover = oracle_recover;
        o.out_dir = out_dir;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_vo(o);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["message"] = r.message;
        d["trajectory"] = trajectory_rows(r.estimate);
        d["ground_truth"] = trajectory_rows(r.ground_truth);
        d["keyframes"] = r.keyframes;
        d["path_length"] = r.path_length;
        d["rpe"] = r.rpe ? py::object(rpe_dict(*r.rpe)) : py::none();
        d["report_json"] = report_json(r);
        return d;
      },
      py::arg("scene") = "textured", py::arg("frames") = py::none(), py::arg("noise") = "none",
      py::arg("seed") = 1, py::arg("photometric_weight") = 1.0, py::arg("geometric_weight") = 1.0,
      py::arg("oracle_recover") = false, py::arg("out_dir") = "");
}
