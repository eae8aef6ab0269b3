#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uavscan/clustering.hpp"
#include "uavscan/geometry.hpp"
#include "uavscan/ingest.hpp"
#include "uavscan/planning.hpp"
#include "uavscan/scene.hpp"
#include "uavscan/segmentation.hpp"

namespace uavscan {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Cloud text format:
//   <count>
//   # <comment>
//   x y z [tag]      (one line per point)
void write_cloud(std::ostream& out, const PointCloud& cloud, std::string_view comment = "uavscan cloud");
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                 std::string_view comment = "uavscan cloud");
PointCloud read_cloud(std::istream& in);
PointCloud read_cloud(const std::filesystem::path& path);

/// ASCII PLY for external viewers.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

/// One "x,y,z" line per waypoint.
void write_waypoints_csv(std::ostream& out, const std::vector<Point3>& waypoints);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

json to_json(const Point3& p);
Point3 point_from_json(const json& j);
json to_json(const Pose& pose);
Pose pose_from_json(const json& j);

json surfaces_to_json(const std::vector<PlanarSurface>& surfaces);
std::vector<PlanarSurface> surfaces_from_json(const json& doc);

json clustering_to_json(const Clustering& clustering, const PointCloud& cloud);

json flight_plan_to_json(const FlightPlan& plan);

json pose_track_to_json(const std::vector<StampedPose>& poses);

json scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const json& doc);

}  // namespace uavscan
