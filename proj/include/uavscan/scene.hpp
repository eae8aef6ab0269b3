#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uavscan/geometry.hpp"
#include "uavscan/ingest.hpp"

namespace uavscan {

struct PointPrimitive {
  Point3 position = Point3::Zero();
};

struct SegmentPrimitive {
  Point3 start = Point3::Zero();
  Point3 end = Point3::UnitX();
};

/// Rectangle spanned by orthonormal in-plane axes; `width` runs along u_axis.
struct RectanglePrimitive {
  Point3 center = Point3::Zero();
  Eigen::Vector3d u_axis = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v_axis = Eigen::Vector3d::UnitY();
  double width = 1.0;
  double height = 1.0;
};

/// Hollow box (six faces), rotated by `yaw` about its vertical axis.
struct BoxPrimitive {
  Point3 center = Point3::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;
};

/// Cube pierced by two orthogonal vertical square planes through its center.
struct CrossedCubePrimitive {
  Point3 center = Point3::Zero();
  double edge = 3.0;
  double plane_size = 8.0;
};

using Primitive =
    std::variant<PointPrimitive, SegmentPrimitive, RectanglePrimitive, BoxPrimitive, CrossedCubePrimitive>;

enum class Sampling {
  Random,   // Poisson count, uniform positions
  Lattice,  // regular grid at spacing 1/sqrt(density)
};

struct SceneSpec {
  std::vector<Primitive> primitives;
  double density = 100.0;    // points per m^2 (per m along segments: sqrt(density))
  double noise_sigma = 0.0;  // meters, along each primitive's normal
  Sampling sampling = Sampling::Random;

  void validate() const;
};

/// Rectangles that make up the surfaces of the scene (boxes expanded).
std::vector<RectanglePrimitive> scene_faces(const SceneSpec& spec);

/// Deterministic sampled cloud; tags carry the primitive index.
PointCloud generate_scene(const SceneSpec& spec, std::uint64_t seed);

/// Names accepted by builtin_scene().
std::vector<std::string> builtin_scene_names();
/// single_point, single_line, single_surface, cube, crossed_cube, room,
/// wall, bridge, large_surface.
std::optional<SceneSpec> builtin_scene(const std::string& name);

/// Distance from `p` to the nearest face of the scene (segments and points
/// ignored). Used to score reconstructions against the analytic scene.
double distance_to_scene(const SceneSpec& spec, const Point3& p);

struct DeviceParams {
  ScanMetadata meta;            // arc, angular resolution, range limit
  double scan_period = 0.025;   // seconds
  double range_noise = 0.0;     // meters, Gaussian on each range

  std::size_t beams() const;
};

struct YawScanSpec {
  Pose station;                  // body frame at the first scan -> world
  int scans = 360;               // scans over one full yaw turn
  double yaw_total = 2.0 * std::numbers::pi;
  Eigen::Vector3d drift_per_scan = Eigen::Vector3d::Zero();  // station-frame translation per scan
  DeviceParams device;
  Eigen::Vector3d vertical_offset = Eigen::Vector3d::Zero();
  Eigen::Vector3d horizontal_offset = Eigen::Vector3d::Zero();
};

struct SimulatedLog {
  ScanLog log;
  std::vector<StampedPose> truth;  // per scan, station frame
  Pose station;
};

/// Ray-casts both scanners against the scene at each yaw step. IMU samples
/// report the true rotation relative to the first scan.
SimulatedLog simulate_yaw_scan(const SceneSpec& scene, const YawScanSpec& spec, std::uint64_t seed);

}  // namespace uavscan
