#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "uavscan/clustering.hpp"
#include "uavscan/error.hpp"
#include "uavscan/icp.hpp"
#include "uavscan/ingest.hpp"
#include "uavscan/io.hpp"
#include "uavscan/pipeline.hpp"
#include "uavscan/planning.hpp"
#include "uavscan/polygon.hpp"
#include "uavscan/preprocess.hpp"
#include "uavscan/scene.hpp"
#include "uavscan/segmentation.hpp"

namespace py = pybind11;
using namespace uavscan;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <int Dim>
std::vector<Eigen::Matrix<double, Dim, 1>> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != Dim) {
    throw py::value_error("expected an (N, " + std::to_string(Dim) + ") array");
  }
  std::vector<Eigen::Matrix<double, Dim, 1>> out(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (int d = 0; d < Dim; ++d) out[static_cast<std::size_t>(i)][d] = r(i, d);
  }
  return out;
}

PointCloud to_cloud(const Array& a) {
  PointCloud c;
  c.points = to_points<3>(a);
  return c;
}

template <int Dim>
Array from_points(const std::vector<Eigen::Matrix<double, Dim, 1>>& pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(Dim)});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int d = 0; d < Dim; ++d) w(static_cast<py::ssize_t>(i), d) = pts[i][d];
  }
  return out;
}

Eigen::Matrix4d to_matrix(const Pose& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = p.rotation;
  m.topRightCorner<3, 1>() = p.translation;
  return m;
}

Pose from_matrix(const Eigen::Matrix4d& m) {
  Pose p;
  p.rotation = m.topLeftCorner<3, 3>();
  p.translation = m.topRightCorner<3, 1>();
  return p;
}

IcpConfig icp_config(int max_iterations, double eps, double max_dist, bool locked, double median_reject) {
  IcpConfig c;
  c.max_iterations = max_iterations;
  c.convergence_eps = eps;
  c.max_correspondence_dist = max_dist;
  c.rotation_locked = locked;
  c.median_reject = median_reject;
  return c;
}

py::dict surface_dict(const PlanarSurface& s) {
  py::dict d;
  d["normal"] = s.model.normal;
  d["d"] = s.model.d;
  d["boundary"] = from_points<3>(s.boundary);
  d["area"] = s.area;
  d["inliers"] = s.inliers;
  return d;
}

PlanarSurface surface_from(const Array& boundary, const Eigen::Vector3d& normal, double d) {
  PlanarSurface s;
  s.model = {normal.normalized(), d};
  s.boundary = to_points<3>(boundary);
  s.area = surface_area(s);
  return s;
}

PipelineConfig config_from(const std::string& config_json) {
  return config_json.empty() ? PipelineConfig{} : config_from_json(json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Point-cloud processing and coverage planning for UAV structure inspection";

  // Leaked on purpose: lives as long as the interpreter.
  static PyObject* error_type = PyErr_NewException("uavscan._core.UavscanError", PyExc_RuntimeError, nullptr);
  m.add_object("UavscanError", py::handle(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("index") = e.index() ? py::object(py::int_(*e.index())) : py::object(py::none());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  // Scenes and simulation.
  m.def("builtin_scene_names", &builtin_scene_names);
  m.def(
      "generate_scene",
      [](const std::string& name, std::uint64_t seed, std::optional<double> density, std::optional<double> noise,
         bool lattice) {
        auto spec = builtin_scene(name);
        if (!spec) throw py::value_error("unknown scene: " + name);
        if (density) spec->density = *density;
        if (noise) spec->noise_sigma = *noise;
        if (lattice) spec->sampling = Sampling::Lattice;
        const PointCloud c = generate_scene(*spec, seed);
        return py::make_tuple(from_points<3>(c.points), c.tags);
      },
      py::arg("name"), py::arg("seed") = 1, py::arg("density") = py::none(), py::arg("noise") = py::none(),
      py::arg("lattice") = false, "Sampled builtin scene as (points, primitive tags).");
  m.def(
      "simulate_yaw_scan",
      [](const std::string& name, const std::filesystem::path& log_path, int scans, double yaw_total,
         const Eigen::Vector3d& station, const Eigen::Vector3d& drift, double range_noise, std::uint64_t seed) {
        auto spec = builtin_scene(name);
        if (!spec) throw py::value_error("unknown scene: " + name);
        YawScanSpec y;
        y.scans = scans;
        y.yaw_total = yaw_total;
        y.station.translation = station;
        y.drift_per_scan = drift;
        y.device.range_noise = range_noise;
        const SimulatedLog sim = simulate_yaw_scan(*spec, y, seed);
        write_scan_log(log_path, sim.log);
        std::vector<Point3> truth;
        for (const auto& p : sim.truth) truth.push_back(p.pose.translation);
        return from_points<3>(truth);
      },
      py::arg("scene"), py::arg("log_path"), py::arg("scans") = 360, py::arg("yaw_total") = 2 * std::numbers::pi,
      py::arg("station") = Eigen::Vector3d(0, 0, 1.2), py::arg("drift") = Eigen::Vector3d::Zero(),
      py::arg("range_noise") = 0.0, py::arg("seed") = 1,
      "Writes a simulated scan log; returns true per-scan translations in the station frame.");

  // Ingest.
  m.def(
      "ingest_log",
      [](const std::filesystem::path& path) {
        const ScanLog log = parse_scan_log(path);
        const PoseTrack track = estimate_pose_track(log);
        const BuiltCloud built = build_cloud(log, track);
        std::vector<Point3> translations;
        for (const auto& p : track.poses) translations.push_back(p.pose.translation);
        return py::make_tuple(from_points<3>(built.cloud.points), from_points<3>(translations), built.dropped);
      },
      py::arg("path"), "Parses a scan log; returns (points, pose translations, dropped readings).");

  // ICP.
  m.def(
      "icp_align_2d",
      [](const Array& source, const Array& target, int max_iterations, double eps, double max_dist, bool locked) {
        const auto t = icp_align_2d(to_points<2>(source), to_points<2>(target), RigidTransform2D{},
                                    icp_config(max_iterations, eps, max_dist, locked, 0.0));
        return py::make_tuple(t.angle, t.translation);
      },
      py::arg("source"), py::arg("target"), py::arg("max_iterations") = 50, py::arg("convergence_eps") = 1e-4,
      py::arg("max_correspondence_dist") = 1.0, py::arg("rotation_locked") = false,
      "Returns (angle, translation) mapping source onto target.");
  m.def(
      "icp_align_3d",
      [](const Array& source, const Array& target, const Eigen::Matrix4d& init, int max_iterations, double eps,
         double max_dist, double median_reject) {
        return to_matrix(icp_align_3d(to_cloud(source), to_cloud(target), from_matrix(init),
                                      icp_config(max_iterations, eps, max_dist, false, median_reject)));
      },
      py::arg("source"), py::arg("target"), py::arg("init") = Eigen::Matrix4d::Identity(),
      py::arg("max_iterations") = 50, py::arg("convergence_eps") = 1e-4, py::arg("max_correspondence_dist") = 1.0,
      py::arg("median_reject") = 0.0, "Returns the 4x4 transform mapping source onto target.");

  // Preprocessing.
  m.def(
      "remove_statistical_outliers",
      [](const Array& points, std::size_t k, double d_t) {
        return remove_statistical_outliers(to_cloud(points), {k, d_t}).kept_indices;
      },
      py::arg("points"), py::arg("k") = 50, py::arg("d_t") = 1.0, "Indices of the points kept.");
  m.def(
      "voxel_downsample",
      [](const Array& points, double leaf) { return from_points<3>(voxel_downsample(to_cloud(points), {leaf}).points); },
      py::arg("points"), py::arg("leaf") = 0.05);

  // Segmentation.
  m.def(
      "ransac_plane",
      [](const Array& points, double threshold, int iterations, std::size_t min_inliers, std::uint64_t seed) {
        RansacConfig cfg;
        cfg.distance_threshold = threshold;
        cfg.iterations = iterations;
        cfg.min_inliers = min_inliers;
        cfg.rng_seed = seed;
        const PlaneFit fit = ransac_plane(to_points<3>(points), cfg);
        return py::make_tuple(fit.model.normal, fit.model.d, fit.inliers);
      },
      py::arg("points"), py::arg("threshold") = 0.2, py::arg("iterations") = 200, py::arg("min_inliers") = 3,
      py::arg("seed") = 1, "Returns (normal, d, inlier indices).");
  m.def(
      "extract_surfaces",
      [](const Array& points, double threshold, int iterations, std::size_t min_inliers, double min_area,
         double cluster_eps, std::uint64_t seed) {
        RansacConfig cfg;
        cfg.distance_threshold = threshold;
        cfg.iterations = iterations;
        cfg.min_inliers = min_inliers;
        cfg.min_area = min_area;
        cfg.rng_seed = seed;
        const SurfaceExtraction ex = extract_surfaces(to_cloud(points), cfg, cluster_eps);
        py::list surfaces;
        for (const auto& s : ex.surfaces) surfaces.append(surface_dict(s));
        return py::make_tuple(surfaces, ex.remainder);
      },
      py::arg("points"), py::arg("threshold") = 0.2, py::arg("iterations") = 200, py::arg("min_inliers") = 100,
      py::arg("min_area") = 2.0, py::arg("cluster_eps") = 0.3, py::arg("seed") = 1,
      "Returns (list of surface dicts, remainder indices).");
  m.def(
      "convex_hull_2d", [](const Array& points) { return from_points<2>(convex_hull_2d(to_points<2>(points))); },
      py::arg("points"));

  // Clustering.
  m.def(
      "euclidean_cluster",
      [](const Array& points, double radius, std::size_t min_size) {
        const Clustering c = euclidean_cluster(to_points<3>(points), {radius, min_size});
        std::vector<std::vector<std::size_t>> clusters;
        for (const auto& cl : c.clusters) clusters.push_back(cl.indices);
        return py::make_tuple(clusters, c.noise);
      },
      py::arg("points"), py::arg("radius") = 0.3, py::arg("min_size") = 10, "Returns (clusters, noise indices).");
  m.def(
      "octree_leaves",
      [](const Array& points, double leaf) { return from_points<3>(Octree(to_points<3>(points), leaf).leaf_centers()); },
      py::arg("points"), py::arg("leaf") = 0.5);

  // Planning.
  m.def(
      "plan_coverage",
      [](const Array& boundary, const Eigen::Vector3d& normal, double d, double width, double height,
         double overlap) {
        InspectionTask task;
        task.surface = surface_from(boundary, normal, d);
        task.footprint_width = width;
        task.footprint_height = height;
        task.overlap = overlap;
        const auto stops = plan_coverage(task, CameraSpec{});
        std::vector<Point3> pos, facing;
        for (const auto& s : stops) {
          pos.push_back(s.position);
          facing.push_back(s.facing);
        }
        return py::make_tuple(from_points<3>(pos), from_points<3>(facing));
      },
      py::arg("boundary"), py::arg("normal"), py::arg("d"), py::arg("footprint_width") = 0.6,
      py::arg("footprint_height") = 0.4, py::arg("overlap") = 0.2, "Returns (stop positions, facing vectors).");
  m.def(
      "astar",
      [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& occupied, const std::array<int, 3>& start,
         const std::array<int, 3>& goal, const std::array<double, 3>& weights) {
        if (occupied.ndim() != 3) throw py::value_error("expected a 3D boolean array");
        OccupancyGrid g(Point3::Zero(), 1.0,
                        {static_cast<int>(occupied.shape(0)), static_cast<int>(occupied.shape(1)),
                         static_cast<int>(occupied.shape(2))});
        auto r = occupied.unchecked<3>();
        for (int x = 0; x < g.dims()[0]; ++x)
          for (int y = 0; y < g.dims()[1]; ++y)
            for (int z = 0; z < g.dims()[2]; ++z)
              if (r(x, y, z)) g.set_occupied({x, y, z});
        const VoxelPath p =
            astar(g, {start[0], start[1], start[2]}, {goal[0], goal[1], goal[2]}, {weights[0], weights[1], weights[2]});
        std::vector<std::array<int, 3>> path;
        for (const auto& v : p.voxels) path.push_back({v.x, v.y, v.z});
        return py::make_tuple(path, p.cost);
      },
      py::arg("occupied"), py::arg("start"), py::arg("goal"), py::arg("weights") = std::array<double, 3>{1, 1, 1},
      "Returns (voxel path, cost) over the free cells of a boolean grid.");

  // Whole pipeline.
  m.def(
      "default_config", [] { return config_to_json(PipelineConfig{}).dump(2); }, "Default config as JSON text.");
  m.def(
      "run_pipeline",
      [](const std::filesystem::path& input, const std::filesystem::path& out_dir, const std::string& config_json) {
        const PipelineResult r = run_pipeline(input, config_from(config_json), out_dir);
        py::dict d;
        d["exit_code"] = static_cast<int>(r.exit_code);
        d["failed_stage"] = r.failed_stage;
        d["message"] = r.message;
        d["warnings"] = r.warnings;
        d["input_points"] = r.input_points;
        d["filtered_points"] = r.filtered_points;
        py::list timings;
        for (const auto& t : r.timings) timings.append(py::make_tuple(t.stage, t.seconds));
        d["timings"] = timings;
        py::list surfaces;
        for (const auto& s : r.surfaces) surfaces.append(surface_dict(s));
        d["surfaces"] = surfaces;
        d["clusters"] = r.clusters.clusters.size();
        py::list plans;
        for (const auto& p : r.plans) {
          plans.append(p.ok() ? std::string("ok") : std::string(to_string(*p.error)));
        }
        d["plans"] = plans;
        return d;
      },
      py::arg("input"), py::arg("out_dir"), py::arg("config_json") = std::string(),
      "Runs every stage on a cloud, scan log or station manifest and writes the artifacts.");
}
