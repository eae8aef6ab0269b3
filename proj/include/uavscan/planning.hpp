#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "uavscan/geometry.hpp"
#include "uavscan/segmentation.hpp"

namespace uavscan {

struct CameraSpec {
  int image_width = 6000;   // pixels
  int image_height = 4000;  // pixels
  double fov_horizontal = 0.39479111969976155;  // 2*atan(0.2): 0.6 m wide at 1.5 m
  double fov_vertical = 0.26510306459334804;    // 2*atan(0.4/3): 0.4 m tall at 1.5 m
  int gimbal_dof = 2;

  void validate() const;
};

struct InspectionTask {
  PlanarSurface surface;
  double footprint_width = 0.6;   // meters on the surface, along the row direction
  double footprint_height = 0.4;  // meters on the surface, across rows
  double overlap = 0.2;           // between consecutive photos of a row, in [0, 1)

  void validate() const;
};

struct Voxel {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const Voxel&) const = default;
};

/// Uniform voxel grid with a free/occupied flag per cell. Voxel (i, j, k)
/// spans origin + [i, i+1) * edge along x, and likewise for y and z.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const Point3& origin, double edge, std::array<int, 3> dims);

  const Point3& origin() const noexcept { return origin_; }
  double edge() const noexcept { return edge_; }
  const std::array<int, 3>& dims() const noexcept { return dims_; }
  std::size_t voxel_count() const noexcept { return cells_.size(); }
  std::size_t occupied_count() const;

  bool in_bounds(const Voxel& v) const;
  bool occupied(const Voxel& v) const { return cells_[linear(v)] != 0; }
  void set_occupied(const Voxel& v, bool value = true) { cells_[linear(v)] = value ? 1 : 0; }

  /// Lexicographic (x, y, z) index.
  std::size_t linear(const Voxel& v) const {
    return (static_cast<std::size_t>(v.x) * static_cast<std::size_t>(dims_[1]) + static_cast<std::size_t>(v.y)) *
               static_cast<std::size_t>(dims_[2]) +
           static_cast<std::size_t>(v.z);
  }
  Voxel from_linear(std::size_t index) const;

  std::optional<Voxel> voxel_of(const Point3& p) const;
  Point3 center(const Voxel& v) const;

  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

 private:
  Point3 origin_ = Point3::Zero();
  double edge_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::uint8_t> cells_ = std::vector<std::uint8_t>(1, 0);
};

/// Grid covering the cloud's bounding box grown by `margin` on every side;
/// a voxel is occupied iff it contains a cloud point.
OccupancyGrid build_occupancy(const PointCloud& cloud, double voxel_edge, double margin);

/// Marks every voxel whose center lies within `radius` of an occupied voxel
/// center.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

/// Per-axis weights of the move cost a1*dx^2 + a2*dy^2 + a3*dz^2.
struct AStarWeights {
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;

  void validate() const;
  double step_cost(int dx, int dy, int dz) const {
    return a1 * dx * dx + a2 * dy * dy + a3 * dz * dz;
  }
};

struct VoxelPath {
  std::vector<Voxel> voxels;  // start..goal inclusive
  double cost = 0.0;
};

/// Minimum-cost 26-connected path over free voxels.
VoxelPath astar(const OccupancyGrid& grid, const Voxel& start, const Voxel& goal, const AStarWeights& weights);

struct StopPoint {
  Point3 position = Point3::Zero();
  Eigen::Vector3d facing = -Eigen::Vector3d::UnitZ();  // camera axis, toward the surface
  int row = 0;
  int col = 0;
};

struct CoverageOptions {
  double max_standoff = 10.0;  // meters
  // When set, the standoff side with fewer occupied stop voxels is used.
  const OccupancyGrid* grid = nullptr;
};

/// Camera-to-surface distance at which the horizontal field of view spans
/// `footprint_width`.
double standoff_distance(double footprint_width, const CameraSpec& camera);

/// Photo positions covering the surface boundary, serpentine row order.
std::vector<StopPoint> plan_coverage(const InspectionTask& task, const CameraSpec& camera,
                                     const CoverageOptions& options = {});

struct PlanLeg {
  std::size_t from_stop = 0;
  std::size_t to_stop = 0;
  std::size_t first_waypoint = 0;  // waypoint index of from_stop
  std::size_t last_waypoint = 0;   // waypoint index of to_stop
  double cost = 0.0;
};

struct FlightPlan {
  std::vector<StopPoint> stops;
  std::vector<Voxel> waypoint_voxels;
  std::vector<Point3> waypoints;          // voxel centers
  std::vector<std::size_t> stop_waypoint; // waypoint index of each stop
  std::vector<PlanLeg> legs;
  double total_cost = 0.0;
};

/// Chains A* legs between consecutive stops in coverage order.
FlightPlan generate_waypoints(const std::vector<StopPoint>& stops, const OccupancyGrid& inflated,
                              const AStarWeights& weights);

}  // namespace uavscan
