#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavscan/geometry.hpp"

namespace uavscan {

struct RigidTransform2D {
  double angle = 0.0;  // radians, kept in (-pi, pi]
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Point2 apply(const Point2& p) const;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

struct IcpConfig {
  int max_iterations = 50;
  double convergence_eps = 1e-4;         // meters, change of RMS residual
  double max_correspondence_dist = 1.0;  // meters
  bool rotation_locked = false;
  std::size_t min_pairs = 3;
  // When > 0, pairs farther than this multiple of the median pair distance
  // are dropped as well. Keeps non-overlapping borders from biasing the fit.
  double median_reject = 0.0;

  void validate() const;
};

/// Per-iteration RMS correspondence residual, for diagnostics and tests.
struct IcpTrace {
  std::vector<double> residuals;
  std::vector<std::size_t> pair_counts;
  bool converged = false;
};

/// Point-to-point ICP in the plane. With `rotation_locked` the returned angle
/// is exactly `init.angle` and only the translation is estimated.
RigidTransform2D icp_align_2d(std::span<const Point2> source, std::span<const Point2> target,
                              const RigidTransform2D& init, const IcpConfig& cfg,
                              IcpTrace* trace = nullptr);

/// Ordered 2D outline, e.g. one scan sweep. `linked[i]` joins vertices i and
/// i + 1 into a segment; unlinked neighbors are separate pieces.
struct Polyline2 {
  std::vector<Point2> vertices;
  std::vector<bool> linked;  // size vertices.size() - 1, or empty for no segments
};

/// Same as above, but each source point is paired with the closest point on
/// the segments around its nearest target vertex, so the target's sampling
/// pattern does not bias the estimate.
RigidTransform2D icp_align_2d(std::span<const Point2> source, const Polyline2& target,
                              const RigidTransform2D& init, const IcpConfig& cfg,
                              IcpTrace* trace = nullptr);

/// Point-to-point ICP in 3D with a closed-form SVD fit per iteration.
Pose icp_align_3d(const PointCloud& source, const PointCloud& target, const Pose& init,
                  const IcpConfig& cfg, IcpTrace* trace = nullptr);

/// Points of each cloud (mapped to the global frame by its pose) that fall
/// inside the intersection of both bounding boxes, dilated by `margin`.
struct OverlapSubsets {
  std::vector<std::size_t> a_indices;
  std::vector<std::size_t> b_indices;
  PointCloud a;  // global frame
  PointCloud b;  // global frame
};

OverlapSubsets predict_overlap(const PointCloud& a, const PointCloud& b, const Pose& pose_a,
                               const Pose& pose_b, double margin);

struct Station {
  PointCloud cloud;    // station-local frame
  Pose recorded_pose;  // station frame -> global frame, as measured
};

struct RegistrationConfig {
  IcpConfig icp = [] {
    IcpConfig c;
    c.median_reject = 3.0;
    return c;
  }();
  double overlap_margin = 0.5;  // meters
};

struct Registration {
  PointCloud merged;        // tagged with station index
  std::vector<Pose> poses;  // refined station poses
};

/// Sequential registration: station 0 is the reference, every later station is
/// aligned against the cloud merged so far.
Registration register_clouds(std::span<const Station> stations, const RegistrationConfig& cfg);

}  // namespace uavscan
