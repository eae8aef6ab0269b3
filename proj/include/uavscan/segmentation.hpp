#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "uavscan/geometry.hpp"

namespace uavscan {

/// Plane a*x + b*y + c*z + d = 0 with unit normal (a, b, c).
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double d = 0.0;

  double signed_distance(const Point3& p) const { return normal.dot(p) + d; }
  double distance(const Point3& p) const { return std::abs(signed_distance(p)); }
};

/// Orients the normal so that d <= 0; when d is zero the first nonzero
/// normal component is made positive.
PlaneModel canonicalize(PlaneModel model);

enum class AreaEstimator {
  Hull,     // shoelace area of the convex boundary
  Density,  // inlier count divided by the expected point density
};

struct RansacConfig {
  double distance_threshold = 0.20;  // meters
  int iterations = 200;
  std::size_t min_inliers = 100;
  double min_area = 2.0;  // m^2
  double max_area = std::numeric_limits<double>::infinity();
  std::uint64_t rng_seed = 1;
  AreaEstimator area_estimator = AreaEstimator::Hull;
  double point_density = 400.0;  // points per m^2, Density estimator only

  void validate() const;
};

struct PlaneFit {
  PlaneModel model;
  std::vector<std::size_t> inliers;  // ascending
};

/// Best-of-N 3-point RANSAC followed by a least-squares refit on the
/// winning inliers. Collinear samples are redrawn without using up a trial.
PlaneFit ransac_plane(const std::vector<Point3>& points, const RansacConfig& cfg);

/// Total-least-squares plane through the points.
PlaneModel refine_plane(const std::vector<Point3>& points);

/// Orthonormal frame on a plane. `u` is the normalized projection of the
/// world axis least aligned with the normal, and v = normal x u. The frame
/// origin is the foot of the world origin on the plane.
struct PlaneBasis {
  Point3 origin = Point3::Zero();
  Eigen::Vector3d u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v = Eigen::Vector3d::UnitY();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();

  Point2 project(const Point3& p) const { return {(p - origin).dot(u), (p - origin).dot(v)}; }
  Point3 lift(const Point2& q) const { return origin + q.x() * u + q.y() * v; }
};

PlaneBasis plane_basis(const PlaneModel& model);

struct PlaneProjection {
  PlaneBasis basis;
  std::vector<Point2> coords;
};

PlaneProjection project_to_plane(const std::vector<Point3>& points, const PlaneModel& model);

struct PlanarSurface {
  PlaneModel model;
  std::vector<std::size_t> inliers;  // into the source cloud; may be empty when loaded from file
  std::vector<Point3> boundary;      // counter-clockwise in the plane basis
  double area = 0.0;                 // m^2
  std::size_t inlier_count = 0;

  std::vector<Point2> boundary_2d() const;
};

/// Shoelace area of the boundary in the plane basis; slivers under 1e-6 m^2
/// report 0.
double surface_area(const PlanarSurface& surface);

struct SurfaceExtraction {
  std::vector<PlanarSurface> surfaces;
  std::vector<std::size_t> remainder;       // every point not in an accepted surface
  std::vector<std::size_t> rejected_small;  // largest components below min_area (subset of remainder)
  std::vector<std::size_t> rejected_large;  // largest components above max_area (subset of remainder)
};

/// Repeated plane extraction. Each round keeps only the largest
/// cluster_eps-connected component of the plane's inliers, bounds it with a
/// convex hull, and accepts it when its area is within [min_area, max_area].
/// The component is then removed from the working set whether accepted or not.
SurfaceExtraction extract_surfaces(const PointCloud& cloud, const RansacConfig& cfg, double cluster_eps = 0.3);

}  // namespace uavscan
