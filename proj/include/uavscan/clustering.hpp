#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "uavscan/geometry.hpp"

namespace uavscan {

struct ClusterConfig {
  double radius = 0.3;  // epsilon, closed ball
  std::size_t min_cluster_size = 10;

  void validate() const;
};

struct Cluster {
  std::vector<std::size_t> indices;  // ascending, into the source cloud
};

struct Clustering {
  std::vector<Cluster> clusters;    // by descending size, then smallest member
  std::vector<std::size_t> noise;   // members of clusters below min_cluster_size
};

/// Flood fill over the graph linking points at distance <= radius.
Clustering euclidean_cluster(const std::vector<Point3>& points, const ClusterConfig& cfg);
inline Clustering euclidean_cluster(const PointCloud& cloud, const ClusterConfig& cfg) {
  return euclidean_cluster(cloud.points, cfg);
}

/// Sparse octree refined down to cubic leaves of edge `leaf_resolution`.
/// The root cube sits at the bounding-box minimum and spans
/// leaf_resolution * 2^depth, the smallest such size covering the points.
class Octree {
 public:
  Octree(const std::vector<Point3>& points, double leaf_resolution);

  double leaf_resolution() const noexcept { return leaf_; }
  int depth() const noexcept { return depth_; }
  const Point3& origin() const noexcept { return origin_; }
  double root_size() const noexcept { return leaf_ * static_cast<double>(std::int64_t{1} << depth_); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::size_t occupied_leaf_count() const noexcept { return leaf_count_; }
  /// Centers of occupied leaves in depth-first child order.
  std::vector<Point3> leaf_centers() const;
  /// Number of points that fell in each occupied leaf, matching leaf_centers().
  std::vector<std::size_t> leaf_point_counts() const;
  bool is_occupied(const Point3& p) const;

 private:
  struct Node {
    std::array<std::int32_t, 8> children{-1, -1, -1, -1, -1, -1, -1, -1};
    std::size_t count = 0;
  };

  std::array<std::int64_t, 3> cell_of(const Point3& p) const;
  void collect(std::int32_t node, int level, std::array<std::int64_t, 3> base,
               std::vector<Point3>* centers, std::vector<std::size_t>* counts) const;

  double leaf_ = 1.0;
  int depth_ = 0;
  Point3 origin_ = Point3::Zero();
  std::vector<Node> nodes_;
  std::size_t leaf_count_ = 0;
};

Octree octree_from_points(const std::vector<Point3>& points, double leaf_resolution);

}  // namespace uavscan
