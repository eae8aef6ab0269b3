#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavscan/clustering.hpp"
#include "uavscan/error.hpp"
#include "uavscan/icp.hpp"
#include "uavscan/ingest.hpp"
#include "uavscan/io.hpp"
#include "uavscan/planning.hpp"
#include "uavscan/preprocess.hpp"
#include "uavscan/segmentation.hpp"

namespace uavscan {

struct PlanningParams {
  double footprint_width = 0.6;
  double footprint_height = 0.4;
  double overlap = 0.2;
  double max_standoff = 10.0;
  double voxel_edge = 0.25;
  double inflation_radius = 0.6;
  double grid_margin = -1.0;  // negative: standoff + inflation + 2 voxel edges
  AStarWeights weights;
};

struct PipelineConfig {
  IngestConfig ingest;
  ParseOptions parse;
  RegistrationConfig registration;
  OutlierFilterConfig outlier;
  VoxelGridConfig voxel;
  RansacConfig ransac;
  double surface_cluster_eps = 0.3;
  ClusterConfig cluster;
  double octree_leaf = 0.5;
  CameraSpec camera;
  PlanningParams planning;
  bool write_svg = true;

  void validate() const;
};

json config_to_json(const PipelineConfig& cfg);
/// Keys present in `doc` override `base`; unknown keys are rejected.
PipelineConfig config_from_json(const json& doc, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Stage functions. Each reads only what the previous stage persisted.

struct IngestResult {
  PointCloud cloud;  // tagged with vertical scan index
  PoseTrack track;
  std::size_t dropped = 0;
};
IngestResult ingest_log(const ScanLog& log, const PipelineConfig& cfg);

/// Manifest: {"version":1, "stations":[{"log"|"cloud": path, "pose": {...}}]}.
/// Relative paths resolve against the manifest's directory.
std::vector<Station> load_stations(const std::filesystem::path& manifest, const PipelineConfig& cfg);

struct FilterResult {
  PointCloud cloud;
  std::size_t input_count = 0;
  std::size_t outliers_removed = 0;
  bool outlier_filter_skipped = false;  // too few points for k neighbors
};
FilterResult filter_cloud(const PointCloud& cloud, const PipelineConfig& cfg);

struct SurfacePlan {
  std::size_t surface_index = 0;
  std::optional<ErrorKind> error;
  std::string message;
  std::optional<std::size_t> error_index;
  FlightPlan plan;
  bool ok() const { return !error.has_value(); }
};

struct PlanningResult {
  OccupancyGrid inflated;
  std::vector<SurfacePlan> plans;
};
double grid_margin(const PipelineConfig& cfg);
PlanningResult plan_surfaces(const std::vector<PlanarSurface>& surfaces, const PointCloud& obstacles,
                             const PipelineConfig& cfg);
json plans_to_json(const std::vector<SurfacePlan>& plans);
std::vector<Point3> concatenated_waypoints(const std::vector<SurfacePlan>& plans);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

enum class ExitCode : int { Success = 0, ValidationError = 2, StageFailure = 3 };

struct PipelineResult {
  ExitCode exit_code = ExitCode::Success;
  std::string failed_stage;
  std::string message;
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
  std::size_t input_points = 0;
  std::size_t filtered_points = 0;
  std::vector<PlanarSurface> surfaces;
  Clustering clusters;
  std::vector<SurfacePlan> plans;
};

/// Runs every stage on a cloud (.xyz), scan log (.log) or station manifest
/// (.json) and writes the artifacts into `out_dir`. Errors are reported in
/// the result; artifacts of completed stages are kept.
PipelineResult run_pipeline(const std::filesystem::path& input, const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir);

/// Same, starting from an in-memory cloud.
PipelineResult run_pipeline(const PointCloud& cloud, const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir);

json export_boundary(const std::vector<PlanarSurface>& surfaces, std::size_t index);
/// Replaces the boundary with an operator-edited polygon. Vertices must lie
/// within `distance_threshold` of the plane and form a simple polygon.
PlanarSurface import_boundary(const PlanarSurface& surface, const std::vector<Point3>& polygon,
                              double distance_threshold);
std::vector<Point3> boundary_from_json(const json& doc);

}  // namespace uavscan
