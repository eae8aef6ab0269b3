#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace uavscan {

using Point3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;
using Rotation = Eigen::Matrix3d;

inline constexpr double kDefaultHalfArc = 0.75 * std::numbers::pi;  // 270 deg device

/// Range/bearing reading of one laser beam.
struct PolarPoint {
  double range = 0.0;    // meters
  double bearing = 0.0;  // radians
};

/// Rigid motion from a local (scanner or station) frame to the global frame.
struct Pose {
  Rotation rotation = Rotation::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  Pose inverse() const;
  /// (*this) after `rhs`: x -> this(rhs(x)).
  Pose compose(const Pose& rhs) const;
};

bool is_rotation(const Rotation& r, double tol = 1e-9);
bool is_valid(const Pose& pose, double tol = 1e-9);

Rotation rotation_about_z(double angle);
Rotation rotation_rpy(double roll, double pitch, double yaw);

/// Ordered point list in the global frame, with optional per-point source tags.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<std::int32_t> tags;  // empty, or one tag per point

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_tags() const noexcept { return !tags.empty(); }

  void push_back(const Point3& p) { points.push_back(p); }
  void push_back(const Point3& p, std::int32_t tag) {
    points.push_back(p);
    tags.push_back(tag);
  }
  void append(const PointCloud& other);

  /// Points selected by index, tags carried along.
  PointCloud subset(const std::vector<std::size_t>& indices) const;
};

/// Throws InvalidArgument on NaN/Inf points or a partial tag column.
void validate(const PointCloud& cloud);

struct Aabb {
  Point3 min = Point3::Constant(std::numeric_limits<double>::infinity());
  Point3 max = Point3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  void extend(const Point3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool contains(const Point3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

Aabb bounding_box(const std::vector<Point3>& points);

/// Scanner-local coordinates of a vertical-scanner reading:
/// (-r cos a, 0, -r sin a).
Point3 polar_to_local(const PolarPoint& p);

Point3 transform_point(const Pose& pose, const Point3& local);
PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud);

}  // namespace uavscan
