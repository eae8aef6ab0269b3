#include "uavscan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "uavscan/error.hpp"
#include "uavscan/polygon.hpp"
#include "uavscan/render.hpp"

namespace uavscan {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorKind::InvalidArgument, "config: " + what); }

// Reads known keys from one JSON object and rejects the rest, so a typo in a
// config file is an error instead of a silently ignored setting.
class Section {
 public:
  Section(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) bad_config(where_ + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      field = doc_[key].template get<T>();
    } catch (const json::exception&) {
      bad_config(where_ + "." + key + " has the wrong type");
    }
  }

  void get_vec(const char* key, Eigen::Vector3d& field) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      field = point_from_json(doc_[key]);
    } catch (const Error&) {
      bad_config(where_ + "." + key + " must be [x, y, z]");
    }
  }

  std::optional<Section> sub(const char* key) {
    seen_.insert(key);
    if (!doc_.contains(key)) return std::nullopt;
    return Section(doc_[key], where_ + "." + key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return doc_[key];
  }
  bool has(const char* key) const { return doc_.contains(key); }

  void finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) bad_config("unknown key " + where_ + "." + item.key());
    }
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

json icp_to_json(const IcpConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"convergence_eps", c.convergence_eps},
          {"max_correspondence_dist", c.max_correspondence_dist},
          {"rotation_locked", c.rotation_locked},
          {"min_pairs", c.min_pairs},
          {"median_reject", c.median_reject}};
}

void icp_from(Section s, IcpConfig& c) {
  s.get("max_iterations", c.max_iterations);
  s.get("convergence_eps", c.convergence_eps);
  s.get("max_correspondence_dist", c.max_correspondence_dist);
  s.get("rotation_locked", c.rotation_locked);
  s.get("min_pairs", c.min_pairs);
  s.get("median_reject", c.median_reject);
  s.finish();
}

json vec(const Eigen::Vector3d& v) { return to_json(Point3(v)); }

bool is_validation(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::MalformedRecord:
    case ErrorKind::UnsortedTimestamps:
    case ErrorKind::EmptyLog:
    case ErrorKind::Io:
      return true;
    default:
      return false;
  }
}

InspectionTask make_task(const PlanarSurface& surface, const PipelineConfig& cfg) {
  InspectionTask task;
  task.surface = surface;
  task.footprint_width = cfg.planning.footprint_width;
  task.footprint_height = cfg.planning.footprint_height;
  task.overlap = cfg.planning.overlap;
  return task;
}

PointCloud select(const PointCloud& cloud, const std::vector<std::size_t>& indices) { return cloud.subset(indices); }

}  // namespace

void PipelineConfig::validate() const {
  ingest.icp.validate();
  registration.icp.validate();
  if (!(registration.overlap_margin >= 0.0)) bad_config("registration.overlap_margin must be >= 0");
  if (!(parse.half_arc > 0.0) || !(parse.rotation_tol > 0.0)) bad_config("ingest.half_arc and rotation_tol must be > 0");
  outlier.validate();
  voxel.validate();
  ransac.validate();
  if (!(surface_cluster_eps > 0.0)) bad_config("surface_cluster_eps must be > 0");
  cluster.validate();
  if (!(octree_leaf > 0.0)) bad_config("octree_leaf must be > 0");
  camera.validate();
  InspectionTask task;
  task.footprint_width = planning.footprint_width;
  task.footprint_height = planning.footprint_height;
  task.overlap = planning.overlap;
  task.validate();
  if (!(planning.max_standoff > 0.0)) bad_config("planning.max_standoff must be > 0");
  if (!(planning.voxel_edge > 0.0)) bad_config("planning.voxel_edge must be > 0");
  if (!(planning.inflation_radius >= 0.0)) bad_config("planning.inflation_radius must be >= 0");
  if (!std::isfinite(planning.grid_margin)) bad_config("planning.grid_margin must be finite");
  planning.weights.validate();
}

json config_to_json(const PipelineConfig& cfg) {
  const double max_area = cfg.ransac.max_area;
  return {
      {"version", kSchemaVersion},
      {"ingest",
       {{"icp", icp_to_json(cfg.ingest.icp)},
        {"vertical_offset", vec(cfg.ingest.vertical_offset)},
        {"horizontal_offset", vec(cfg.ingest.horizontal_offset)},
        {"half_arc", cfg.parse.half_arc},
        {"rotation_tol", cfg.parse.rotation_tol}}},
      {"registration", {{"icp", icp_to_json(cfg.registration.icp)}, {"overlap_margin", cfg.registration.overlap_margin}}},
      {"outlier", {{"k_neighbors", cfg.outlier.k_neighbors}, {"d_t", cfg.outlier.d_t}}},
      {"voxel", {{"leaf_size", cfg.voxel.leaf_size}}},
      {"ransac",
       {{"distance_threshold", cfg.ransac.distance_threshold},
        {"iterations", cfg.ransac.iterations},
        {"min_inliers", cfg.ransac.min_inliers},
        {"min_area", cfg.ransac.min_area},
        {"max_area", std::isfinite(max_area) ? json(max_area) : json(nullptr)},
        {"rng_seed", cfg.ransac.rng_seed},
        {"area_estimator", cfg.ransac.area_estimator == AreaEstimator::Hull ? "hull" : "density"},
        {"point_density", cfg.ransac.point_density}}},
      {"surface_cluster_eps", cfg.surface_cluster_eps},
      {"cluster", {{"radius", cfg.cluster.radius}, {"min_cluster_size", cfg.cluster.min_cluster_size}}},
      {"octree_leaf", cfg.octree_leaf},
      {"camera",
       {{"image_width", cfg.camera.image_width},
        {"image_height", cfg.camera.image_height},
        {"fov_horizontal", cfg.camera.fov_horizontal},
        {"fov_vertical", cfg.camera.fov_vertical},
        {"gimbal_dof", cfg.camera.gimbal_dof}}},
      {"planning",
       {{"footprint_width", cfg.planning.footprint_width},
        {"footprint_height", cfg.planning.footprint_height},
        {"overlap", cfg.planning.overlap},
        {"max_standoff", cfg.planning.max_standoff},
        {"voxel_edge", cfg.planning.voxel_edge},
        {"inflation_radius", cfg.planning.inflation_radius},
        {"grid_margin", cfg.planning.grid_margin},
        {"weights", {{"a1", cfg.planning.weights.a1}, {"a2", cfg.planning.weights.a2}, {"a3", cfg.planning.weights.a3}}}}},
      {"write_svg", cfg.write_svg},
  };
}

PipelineConfig config_from_json(const json& doc, PipelineConfig cfg) {
  Section root(doc, "config");
  int version = kSchemaVersion;
  root.get("version", version);
  if (version > kSchemaVersion) bad_config("unsupported version");

  if (auto s = root.sub("ingest")) {
    if (auto icp = s->sub("icp")) icp_from(*icp, cfg.ingest.icp);
    s->get_vec("vertical_offset", cfg.ingest.vertical_offset);
    s->get_vec("horizontal_offset", cfg.ingest.horizontal_offset);
    s->get("half_arc", cfg.parse.half_arc);
    s->get("rotation_tol", cfg.parse.rotation_tol);
    s->finish();
  }
  if (auto s = root.sub("registration")) {
    if (auto icp = s->sub("icp")) icp_from(*icp, cfg.registration.icp);
    s->get("overlap_margin", cfg.registration.overlap_margin);
    s->finish();
  }
  if (auto s = root.sub("outlier")) {
    s->get("k_neighbors", cfg.outlier.k_neighbors);
    s->get("d_t", cfg.outlier.d_t);
    s->finish();
  }
  if (auto s = root.sub("voxel")) {
    s->get("leaf_size", cfg.voxel.leaf_size);
    s->finish();
  }
  if (auto s = root.sub("ransac")) {
    s->get("distance_threshold", cfg.ransac.distance_threshold);
    s->get("iterations", cfg.ransac.iterations);
    s->get("min_inliers", cfg.ransac.min_inliers);
    s->get("min_area", cfg.ransac.min_area);
    if (s->has("max_area")) {
      const json& m = s->raw("max_area");
      if (m.is_null()) {
        cfg.ransac.max_area = std::numeric_limits<double>::infinity();
      } else if (m.is_number()) {
        cfg.ransac.max_area = m.get<double>();
      } else {
        bad_config("ransac.max_area must be a number or null");
      }
    }
    s->get("rng_seed", cfg.ransac.rng_seed);
    if (s->has("area_estimator")) {
      const json& a = s->raw("area_estimator");
      if (a == "hull") {
        cfg.ransac.area_estimator = AreaEstimator::Hull;
      } else if (a == "density") {
        cfg.ransac.area_estimator = AreaEstimator::Density;
      } else {
        bad_config("ransac.area_estimator must be 'hull' or 'density'");
      }
    }
    s->get("point_density", cfg.ransac.point_density);
    s->finish();
  }
  root.get("surface_cluster_eps", cfg.surface_cluster_eps);
  if (auto s = root.sub("cluster")) {
    s->get("radius", cfg.cluster.radius);
    s->get("min_cluster_size", cfg.cluster.min_cluster_size);
    s->finish();
  }
  root.get("octree_leaf", cfg.octree_leaf);
  if (auto s = root.sub("camera")) {
    s->get("image_width", cfg.camera.image_width);
    s->get("image_height", cfg.camera.image_height);
    s->get("fov_horizontal", cfg.camera.fov_horizontal);
    s->get("fov_vertical", cfg.camera.fov_vertical);
    s->get("gimbal_dof", cfg.camera.gimbal_dof);
    s->finish();
  }
  if (auto s = root.sub("planning")) {
    auto& p = cfg.planning;
    s->get("footprint_width", p.footprint_width);
    s->get("footprint_height", p.footprint_height);
    s->get("overlap", p.overlap);
    s->get("max_standoff", p.max_standoff);
    s->get("voxel_edge", p.voxel_edge);
    s->get("inflation_radius", p.inflation_radius);
    s->get("grid_margin", p.grid_margin);
    if (auto w = s->sub("weights")) {
      w->get("a1", p.weights.a1);
      w->get("a2", p.weights.a2);
      w->get("a3", p.weights.a3);
      w->finish();
    }
    s->finish();
  }
  root.get("write_svg", cfg.write_svg);
  root.finish();
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path& path) { return config_from_json(read_json(path)); }

IngestResult ingest_log(const ScanLog& log, const PipelineConfig& cfg) {
  IngestResult out;
  out.track = estimate_pose_track(log, cfg.ingest);
  BuiltCloud built = build_cloud(log, out.track, cfg.ingest);
  out.cloud = std::move(built.cloud);
  out.dropped = built.dropped;
  return out;
}

std::vector<Station> load_stations(const fs::path& manifest, const PipelineConfig& cfg) {
  const json doc = read_json(manifest);
  if (!doc.is_object() || !doc.contains("stations") || !doc["stations"].is_array()) {
    throw Error(ErrorKind::InvalidArgument, manifest.string() + ": expected {\"stations\": [...]}");
  }
  const fs::path base = manifest.parent_path();
  std::vector<Station> stations;
  for (const auto& entry : doc["stations"]) {
    Station st;
    if (entry.contains("log")) {
      const ScanLog log = parse_scan_log(base / entry["log"].get<std::string>(), cfg.parse);
      st.cloud = ingest_log(log, cfg).cloud;
    } else if (entry.contains("cloud")) {
      st.cloud = read_cloud(base / entry["cloud"].get<std::string>());
    } else {
      throw Error(ErrorKind::InvalidArgument, "station entry needs a \"log\" or \"cloud\" path", stations.size());
    }
    if (entry.contains("pose")) st.recorded_pose = pose_from_json(entry["pose"]);
    stations.push_back(std::move(st));
  }
  if (stations.empty()) throw Error(ErrorKind::InvalidArgument, manifest.string() + ": no stations");
  return stations;
}

FilterResult filter_cloud(const PointCloud& cloud, const PipelineConfig& cfg) {
  FilterResult out;
  out.input_count = cloud.size();
  PointCloud kept;
  if (cloud.size() > cfg.outlier.k_neighbors) {
    OutlierFilterResult sor = remove_statistical_outliers(cloud, cfg.outlier);
    out.outliers_removed = sor.removed_count;
    kept = std::move(sor.kept);
  } else {
    out.outlier_filter_skipped = true;
    kept = cloud;
  }
  out.cloud = kept.empty() ? kept : voxel_downsample(kept, cfg.voxel);
  return out;
}

double grid_margin(const PipelineConfig& cfg) {
  if (cfg.planning.grid_margin >= 0.0) return cfg.planning.grid_margin;
  return standoff_distance(cfg.planning.footprint_width, cfg.camera) + cfg.planning.inflation_radius +
         2.0 * cfg.planning.voxel_edge;
}

PlanningResult plan_surfaces(const std::vector<PlanarSurface>& surfaces, const PointCloud& obstacles,
                             const PipelineConfig& cfg) {
  PlanningResult out;
  if (surfaces.empty()) return out;
  const OccupancyGrid grid = build_occupancy(obstacles, cfg.planning.voxel_edge, grid_margin(cfg));
  out.inflated = inflate(grid, cfg.planning.inflation_radius);

  CoverageOptions options;
  options.max_standoff = cfg.planning.max_standoff;
  options.grid = &out.inflated;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    SurfacePlan sp;
    sp.surface_index = i;
    try {
      const auto stops = plan_coverage(make_task(surfaces[i], cfg), cfg.camera, options);
      sp.plan = generate_waypoints(stops, out.inflated, cfg.planning.weights);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) throw;
      sp.error = e.kind();
      sp.error_index = e.index();
      sp.message = e.what();
    }
    out.plans.push_back(std::move(sp));
  }
  return out;
}

json plans_to_json(const std::vector<SurfacePlan>& plans) {
  json arr = json::array();
  for (const auto& sp : plans) {
    json entry = {{"surface_index", sp.surface_index},
                  {"status", sp.ok() ? std::string("ok") : std::string(to_string(*sp.error))}};
    if (!sp.ok()) {
      entry["message"] = sp.message;
      entry["error_index"] = sp.error_index ? json(*sp.error_index) : json(nullptr);
    } else {
      const json plan = flight_plan_to_json(sp.plan);
      for (const auto& item : plan.items()) entry[item.key()] = item.value();
    }
    arr.push_back(std::move(entry));
  }
  return {{"version", kSchemaVersion}, {"plans", arr}};
}

std::vector<Point3> concatenated_waypoints(const std::vector<SurfacePlan>& plans) {
  std::vector<Point3> all;
  for (const auto& sp : plans) {
    if (sp.ok()) all.insert(all.end(), sp.plan.waypoints.begin(), sp.plan.waypoints.end());
  }
  return all;
}

namespace {

class StageRunner {
 public:
  explicit StageRunner(PipelineResult& result) : result_(result) {}

  template <typename F>
  bool operator()(const char* stage, F&& body) {
    if (result_.exit_code != ExitCode::Success) return false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      fail(stage, is_validation(e.kind()) ? ExitCode::ValidationError : ExitCode::StageFailure, e.what());
    } catch (const std::exception& e) {
      fail(stage, ExitCode::StageFailure, e.what());
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    result_.timings.push_back({stage, dt.count()});
    return result_.exit_code == ExitCode::Success;
  }

  void fail(const char* stage, ExitCode code, const std::string& message) {
    result_.exit_code = code;
    result_.failed_stage = stage;
    result_.message = message;
  }

 private:
  PipelineResult& result_;
};

void write_timing(const fs::path& out_dir, const PipelineResult& r) {
  json stages = json::array();
  double total = 0.0;
  for (const auto& t : r.timings) {
    stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    total += t.seconds;
  }
  json doc = {{"version", kSchemaVersion},
              {"stages", stages},
              {"total_seconds", total},
              {"input_points", r.input_points},
              {"filtered_points", r.filtered_points},
              {"exit_code", static_cast<int>(r.exit_code)}};
  if (!r.failed_stage.empty()) doc["failed_stage"] = r.failed_stage;
  try {
    write_json(out_dir / "timing.json", doc);
  } catch (const Error&) {
  }
}

void run_tail(const PointCloud& registered, const PipelineConfig& cfg, const fs::path& out_dir, PipelineResult& r,
              StageRunner& stage) {
  r.input_points = registered.size();
  PointCloud filtered;
  stage("filter", [&] {
    FilterResult f = filter_cloud(registered, cfg);
    if (f.outlier_filter_skipped) {
      r.warnings.push_back("outlier filter skipped: cloud has no more than k_neighbors points");
    }
    filtered = std::move(f.cloud);
    r.filtered_points = filtered.size();
    write_cloud(out_dir / "filtered.xyz", filtered, "filtered");
  });

  PointCloud remainder;
  stage("segment", [&] {
    SurfaceExtraction ex = extract_surfaces(filtered, cfg.ransac, cfg.surface_cluster_eps);
    r.surfaces = std::move(ex.surfaces);
    remainder = select(filtered, ex.remainder);
    write_json(out_dir / "surfaces.json", surfaces_to_json(r.surfaces));
    write_cloud(out_dir / "remainder.xyz", remainder, "points outside accepted surfaces");
  });

  stage("cluster", [&] {
    r.clusters = euclidean_cluster(remainder, cfg.cluster);
    write_json(out_dir / "clusters.json", clustering_to_json(r.clusters, remainder));
    PointCloud leaves;
    if (!remainder.empty()) {
      const Octree tree(remainder.points, cfg.octree_leaf);
      const auto centers = tree.leaf_centers();
      const auto counts = tree.leaf_point_counts();
      for (std::size_t i = 0; i < centers.size(); ++i) {
        leaves.push_back(centers[i], static_cast<std::int32_t>(counts[i]));
      }
    }
    write_cloud(out_dir / "octree.xyz", leaves, "occupied octree leaf centers, tag = point count");
  });

  stage("plan", [&] {
    PlanningResult planned = plan_surfaces(r.surfaces, filtered, cfg);
    r.plans = std::move(planned.plans);
    write_json(out_dir / "plan.json", plans_to_json(r.plans));
    std::ofstream csv(out_dir / "waypoints.csv", std::ios::binary);
    if (!csv) throw Error(ErrorKind::Io, "cannot write waypoints.csv");
    write_waypoints_csv(csv, concatenated_waypoints(r.plans));

    std::size_t failed = 0;
    for (const auto& sp : r.plans) {
      if (sp.ok()) continue;
      ++failed;
      r.warnings.push_back("surface " + std::to_string(sp.surface_index) + ": " + sp.message);
    }
    if (!r.plans.empty() && failed == r.plans.size()) {
      throw Error(*r.plans.front().error, "no surface could be planned; first failure: " + r.plans.front().message);
    }
  });

  if (cfg.write_svg && !r.failed_stage.empty() && r.failed_stage != "plan") return;
  if (cfg.write_svg) {
    const auto waypoints = concatenated_waypoints(r.plans);
    const RenderInput input{&filtered, &r.surfaces, &waypoints};
    // Renders are produced even when planning failed, to show what was found.
    try {
      write_svg(out_dir / "top.svg", input, View::Top);
      write_svg(out_dir / "side.svg", input, View::Side);
    } catch (const Error& e) {
      r.warnings.push_back(e.what());
    }
  }
}

bool has_extension(const fs::path& p, std::initializer_list<const char*> exts) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::any_of(exts.begin(), exts.end(), [&](const char* e) { return ext == e; });
}

bool prepare(const fs::path& out_dir, const PipelineConfig& cfg, PipelineResult& r) {
  try {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw Error(ErrorKind::Io, "cannot create output directory " + out_dir.string());
  } catch (const Error& e) {
    r.exit_code = ExitCode::ValidationError;
    r.failed_stage = "config";
    r.message = e.what();
    return false;
  }
  return true;
}

}  // namespace

PipelineResult run_pipeline(const fs::path& input, const PipelineConfig& cfg, const fs::path& out_dir) {
  PipelineResult r;
  if (!prepare(out_dir, cfg, r)) return r;
  StageRunner stage(r);

  PointCloud registered;
  if (has_extension(input, {".log"})) {
    ScanLog log;
    stage("load", [&] { log = parse_scan_log(input, cfg.parse); });
    stage("ingest", [&] {
      IngestResult ing = ingest_log(log, cfg);
      registered = std::move(ing.cloud);
      write_cloud(out_dir / "registered.xyz", registered, "ingested, tag = vertical scan index");
      write_json(out_dir / "poses.json",
                 {{"version", kSchemaVersion}, {"source", "log"}, {"track", pose_track_to_json(ing.track.poses)}});
    });
  } else if (has_extension(input, {".json"})) {
    std::vector<Station> stations;
    stage("load", [&] { stations = load_stations(input, cfg); });
    stage("register", [&] {
      Registration reg = register_clouds(stations, cfg.registration);
      registered = std::move(reg.merged);
      json poses = json::array();
      for (const auto& p : reg.poses) poses.push_back(to_json(p));
      write_cloud(out_dir / "registered.xyz", registered, "registered, tag = station index");
      write_json(out_dir / "poses.json", {{"version", kSchemaVersion}, {"source", "stations"}, {"stations", poses}});
    });
  } else {
    stage("load", [&] {
      registered = read_cloud(input);
      write_cloud(out_dir / "registered.xyz", registered, "input cloud");
      write_json(out_dir / "poses.json", {{"version", kSchemaVersion}, {"source", "cloud"}});
    });
  }
  if (r.exit_code == ExitCode::Success) run_tail(registered, cfg, out_dir, r, stage);
  write_timing(out_dir, r);
  return r;
}

PipelineResult run_pipeline(const PointCloud& cloud, const PipelineConfig& cfg, const fs::path& out_dir) {
  PipelineResult r;
  if (!prepare(out_dir, cfg, r)) return r;
  StageRunner stage(r);
  stage("load", [&] {
    validate(cloud);
    write_cloud(out_dir / "registered.xyz", cloud, "input cloud");
    write_json(out_dir / "poses.json", {{"version", kSchemaVersion}, {"source", "cloud"}});
  });
  if (r.exit_code == ExitCode::Success) run_tail(cloud, cfg, out_dir, r, stage);
  write_timing(out_dir, r);
  return r;
}

json export_boundary(const std::vector<PlanarSurface>& surfaces, std::size_t index) {
  if (index >= surfaces.size()) {
    throw Error(ErrorKind::InvalidArgument, "surface index out of range (" + std::to_string(surfaces.size()) + " surfaces)",
                index);
  }
  const PlanarSurface& s = surfaces[index];
  json boundary = json::array();
  for (const auto& p : s.boundary) boundary.push_back(to_json(p));
  return {{"version", kSchemaVersion},
          {"surface_index", index},
          {"plane", {{"normal", vec(s.model.normal)}, {"d", s.model.d}}},
          {"boundary", boundary}};
}

std::vector<Point3> boundary_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("boundary") || !doc["boundary"].is_array()) {
    throw Error(ErrorKind::InvalidArgument, "boundary file needs a \"boundary\" array");
  }
  std::vector<Point3> out;
  for (const auto& v : doc["boundary"]) out.push_back(point_from_json(v));
  return out;
}

PlanarSurface import_boundary(const PlanarSurface& surface, const std::vector<Point3>& polygon,
                              double distance_threshold) {
  if (!(distance_threshold >= 0.0)) throw Error(ErrorKind::InvalidArgument, "distance threshold must be >= 0");
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const double dist = surface.model.distance(polygon[i]);
    if (!(dist <= distance_threshold)) {
      throw Error(ErrorKind::NonPlanarEdit,
                  "vertex is " + std::to_string(dist) + " m from the plane (threshold " +
                      std::to_string(distance_threshold) + ")",
                  i);
    }
  }
  if (polygon == surface.boundary) return surface;

  const PlaneBasis basis = plane_basis(surface.model);
  std::vector<Point2> flat;
  flat.reserve(polygon.size());
  for (const auto& p : polygon) flat.push_back(basis.project(p));
  if (!is_simple_polygon(flat)) {
    throw Error(ErrorKind::SelfIntersectingPolygon, "edited boundary is not a simple polygon");
  }
  if (signed_area(flat) < 0.0) std::reverse(flat.begin(), flat.end());

  PlanarSurface edited = surface;
  edited.boundary.clear();
  for (const auto& q : flat) edited.boundary.push_back(basis.lift(q));
  edited.area = surface_area(edited);
  return edited;
}

}  // namespace uavscan
