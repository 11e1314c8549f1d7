#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "occlunav/cli.hpp"
#include "occlunav/config.hpp"
#include "occlunav/episode.hpp"
#include "occlunav/error.hpp"

#include <iostream>
#include "occlunav/geometry.hpp"
#include "occlunav/grounding.hpp"
#include "occlunav/gsscene.hpp"
#include "occlunav/imagination.hpp"
#include "occlunav/scenario.hpp"
#include "occlunav/trajectory.hpp"
#include "occlunav/valuemap.hpp"

namespace py = pybind11;
using namespace occlunav;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

std::vector<Vec3> to_points(const Points& a) {
  std::vector<Vec3> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = a.row(i).transpose();
  return out;
}

Points from_points(const std::vector<Vec3>& v) {
  Points a(static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
  return a;
}

DepthImage to_depth(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(Errc::DimensionMismatch, "depth must be a 2-D array");
  DepthImage d(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), d.data.begin());
  return d;
}

template <typename T, int C>
py::array_t<T> to_numpy(const Image<T, C>& img) {
  std::vector<py::ssize_t> shape{img.height, img.width};
  if (C > 1) shape.push_back(C);
  py::array_t<T> out(shape);
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

GaussianScene scene_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 9) throw Error(Errc::MalformedRow, "scene array must have shape (N, 9)");
  GaussianScene s;
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    Gaussian9 g{{r(i, 0), r(i, 1), r(i, 2)}, {r(i, 3), r(i, 4), r(i, 5)}, r(i, 6), r(i, 7), static_cast<Label>(r(i, 8))};
    validate(g);
    s.gaussians.push_back(g);
  }
  return s;
}

py::array_t<double> scene_to_array(const GaussianScene& s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{9}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& g = s.gaussians[i];
    const double row[9] = {g.position.x(), g.position.y(), g.position.z(), g.color.x(), g.color.y(), g.color.z(),
                           g.radius, g.opacity, static_cast<double>(g.label)};
    for (int c = 0; c < 9; ++c) w(static_cast<py::ssize_t>(i), c) = row[c];
  }
  return out;
}

NavigableSet make_candidates(const Points& positions, const std::vector<bool>& imagined) {
  std::vector<NavEntry> e(static_cast<std::size_t>(positions.rows()));
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i].position = positions.row(static_cast<Eigen::Index>(i)).transpose();
    e[i].source = i < imagined.size() && imagined[i] ? Source::Imagined : Source::Observed;
  }
  return NavigableSet(std::move(e));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Occlusion-aware object navigation: geometry, grounding, value maps and the episode simulator.";

  static py::exception<Error> error_type(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  // geometry
  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init([](const Mat3& r, const Vec3& t) { return Pose{r, t}; }), py::arg("rotation"), py::arg("translation"))
      .def_readwrite("rotation", &Pose::rotation)
      .def_readwrite("translation", &Pose::translation)
      .def("matrix", &Pose::matrix)
      .def("forward", &Pose::forward)
      .def("is_valid", &Pose::is_valid, py::arg("tol") = 1e-9)
      .def("__repr__", [](const Pose& p) {
        return "Pose(t=[" + std::to_string(p.translation.x()) + ", " + std::to_string(p.translation.y()) + ", " +
               std::to_string(p.translation.z()) + "])";
      });
  m.def("compose", &compose);
  m.def("invert", &invert);
  m.def("apply", &apply);
  m.def("pose_distance", &pose_distance);
  m.def("look_at", &look_at, py::arg("position"), py::arg("target"), py::arg("up_hint") = Vec3::UnitZ());
  m.def("level_camera", &level_camera, py::arg("position"), py::arg("yaw"));

  py::class_<Intrinsics>(m, "Intrinsics")
      .def(py::init<>())
      .def_readwrite("fx", &Intrinsics::fx)
      .def_readwrite("fy", &Intrinsics::fy)
      .def_readwrite("cx", &Intrinsics::cx)
      .def_readwrite("cy", &Intrinsics::cy)
      .def_readwrite("width", &Intrinsics::width)
      .def_readwrite("height", &Intrinsics::height);
  m.def("intrinsics_from_hfov", &intrinsics_from_hfov, py::arg("width"), py::arg("height"), py::arg("hfov_deg"));
  m.def("hfov_degrees", &hfov_degrees);
  m.def("project", &project);
  m.def("unproject", &unproject, py::arg("u"), py::arg("v"), py::arg("depth"), py::arg("k"));

  // scenes
  py::class_<GaussianScene>(m, "GaussianScene")
      .def(py::init<>())
      .def(py::init(&scene_from_array), py::arg("array"))
      .def("to_array", &scene_to_array)
      .def("__len__", &GaussianScene::size)
      .def_property_readonly("is_world", [](const GaussianScene& s) { return s.frame == Frame::World; })
      .def_readonly("metric", &GaussianScene::metric);
  m.def("load_scene", &load_csv, py::arg("path"));
  m.def("save_scene", &save_csv, py::arg("scene"), py::arg("path"));
  m.def("transform_scene", &transform_scene, py::arg("scene"), py::arg("pose"), py::arg("scale"));
  m.def("merge_scenes", [](const std::vector<GaussianScene>& s, double eps) { return merge_scenes(s, eps); },
        py::arg("scenes"), py::arg("eps_merge"));
  m.def("downsample", &downsample, py::arg("scene"), py::arg("voxel"));
  m.def(
      "render",
      [](const GaussianScene& s, const Pose& cam, const Intrinsics& k) {
        const RenderResult r = render(s, cam, k);
        py::dict d;
        d["depth"] = to_numpy(r.depth);
        d["labels"] = to_numpy(r.labels);
        d["rgb"] = to_numpy(r.rgb);
        return d;
      },
      py::arg("scene"), py::arg("camera_pose"), py::arg("k"));

  // trajectories
  py::enum_<TrajectoryKind>(m, "TrajectoryKind")
      .value("L", TrajectoryKind::L)
      .value("U", TrajectoryKind::U)
      .value("R", TrajectoryKind::R);
  py::class_<TrajectoryParams>(m, "TrajectoryParams")
      .def(py::init<>())
      .def_readwrite("n", &TrajectoryParams::n)
      .def_readwrite("d_c", &TrajectoryParams::d_c)
      .def_readwrite("d_v", &TrajectoryParams::d_v);
  py::class_<CameraTrajectory>(m, "CameraTrajectory")
      .def_readonly("kind", &CameraTrajectory::kind)
      .def_readonly("poses", &CameraTrajectory::poses)
      .def_readonly("orbit_center", &CameraTrajectory::orbit_center);
  m.def("generate_trajectory", &generate_trajectory, py::arg("kind"), py::arg("params"), py::arg("anchor"));
  m.def("sample_tri", &sample_tri, py::arg("params"), py::arg("anchor"));

  // grounding
  m.def("coord_transform", &coord_transform, py::arg("t_world"), py::arg("t_local"));
  m.def(
      "global_scale",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& gt,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& rendered) {
        const ScaleEstimate e = global_scale(to_depth(gt), to_depth(rendered));
        return py::make_tuple(e.s, e.n_valid);
      },
      py::arg("d_gt"), py::arg("d_render"));

  // value maps
  py::class_<ValueWeights>(m, "ValueWeights")
      .def(py::init<>())
      .def_readwrite("alpha_sem", &ValueWeights::alpha_sem)
      .def_readwrite("alpha_exp", &ValueWeights::alpha_exp)
      .def_readwrite("beta", &ValueWeights::beta)
      .def_readwrite("lambda_sem", &ValueWeights::lambda_sem)
      .def_readwrite("r_vis", &ValueWeights::r_vis)
      .def_readwrite("sigma_s", &ValueWeights::sigma_s)
      .def_readwrite("sigma_t", &ValueWeights::sigma_t);
  m.def(
      "semantic_score",
      [](const Vec3& g, const Points& t_real, const Points& t_hyp, const ValueWeights& w) {
        return semantic_score(g, {to_points(t_real), to_points(t_hyp)}, w);
      },
      py::arg("g"), py::arg("t_real"), py::arg("t_hyp"), py::arg("weights"));
  m.def(
      "future_aware_map",
      [](const Points& candidates, const Points& t_real, const Points& t_hyp, const Points& f_new,
         const ValueWeights& w) {
        const auto f = to_points(f_new);
        return future_aware_map(make_candidates(candidates, {}), {to_points(t_real), to_points(t_hyp)}, f, w);
      },
      py::arg("candidates"), py::arg("t_real"), py::arg("t_hyp"), py::arg("f_new"), py::arg("weights"));
  m.def(
      "fuse_affordance",
      [](const std::vector<double>& mm, const std::vector<double>& fa, double beta) {
        return fuse_affordance(mm, fa, beta);
      },
      py::arg("m"), py::arg("m_fa"), py::arg("beta"));
  m.def(
      "select_waypoint",
      [](const Points& positions, const std::vector<double>& m_aff, const Vec3& robot) {
        AffordanceField f;
        f.positions = to_points(positions);
        f.m_aff = m_aff;
        return select_waypoint(f, robot);
      },
      py::arg("positions"), py::arg("m_aff"), py::arg("robot"));

  // configuration
  py::class_<Config>(m, "Config")
      .def(py::init<>())
      .def("set", [](Config& c, const std::string& k, const std::string& v) { set_config_value(c, k, v); })
      .def("validate", &Config::validate)
      .def("weights", &Config::weights)
      .def("dump", [](const Config& c) { return dump_config(c); })
      .def_readwrite("beta", &Config::beta)
      .def_readwrite("max_steps", &Config::max_steps)
      .def_readwrite("seed", &Config::seed)
      .def_readwrite("world_model", &Config::world_model);
  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"));
  m.def("config_keys", [] {
    std::vector<std::string> out;
    for (auto k : config_keys()) out.emplace_back(k);
    return out;
  });

  // simulator
  py::enum_<Scenario>(m, "Scenario")
      .value("StaticOccluded", Scenario::StaticOccluded)
      .value("DynamicTarget", Scenario::DynamicTarget)
      .value("SuddenObstacle", Scenario::SuddenObstacle);
  py::class_<EpisodeSpec>(m, "EpisodeSpec")
      .def_readonly("id", &EpisodeSpec::id)
      .def_readonly("hidden_scene", &EpisodeSpec::hidden_scene)
      .def_readonly("start_pose", &EpisodeSpec::start_pose)
      .def_readonly("target_label", &EpisodeSpec::target_label)
      .def_readonly("scenario", &EpisodeSpec::scenario)
      .def_readonly("target_velocity", &EpisodeSpec::target_velocity)
      .def_readonly("obstacle_insert_step", &EpisodeSpec::obstacle_insert_step)
      .def_readonly("seed", &EpisodeSpec::seed);
  m.def("generate_episode", &generate_episode, py::arg("family"), py::arg("id"), py::arg("seed"), py::arg("config"));
  py::class_<EpisodeResult>(m, "EpisodeResult")
      .def(py::init<>())
      .def_readwrite("success", &EpisodeResult::success)
      .def_readwrite("steps", &EpisodeResult::steps)
      .def_readwrite("path_length", &EpisodeResult::path_length)
      .def_readwrite("shortest_path", &EpisodeResult::shortest_path)
      .def_readwrite("dtg", &EpisodeResult::dtg)
      .def_property_readonly("trace", [](const EpisodeResult& r) {
        std::vector<std::string> lines;
        for (const auto& t : r.trace) lines.push_back(format_trace_line(t));
        return lines;
      });
  m.def(
      "run_episode",
      [](const EpisodeSpec& spec, const Config& cfg, bool imagination) {
        py::gil_scoped_release release;
        if (!imagination) return run_episode(spec, nullptr, cfg);
        const WorldModelFactory f = make_oracle_factory(cfg.oracle());
        return run_episode(spec, &f, cfg);
      },
      py::arg("spec"), py::arg("config"), py::arg("imagination") = true);
  m.def("spl_term", &spl_term, py::arg("success"), py::arg("path_length"), py::arg("shortest_path"));
  m.def(
      "metrics",
      [](const std::vector<EpisodeResult>& rs) {
        const Metrics x = metrics(rs);
        return py::make_tuple(x.sr, x.spl, x.dtg);
      },
      py::arg("results"));
  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "occlunav");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        return cli_main(static_cast<int>(argv.size()), argv.data(), std::cout, std::cerr);
      },
      py::arg("args"));
}
