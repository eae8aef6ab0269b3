#include "uavscan/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "uavscan/error.hpp"
#include "uavscan/kdtree.hpp"

namespace uavscan {

void OutlierFilterConfig::validate() const {
  if (k_neighbors < 1) throw Error(ErrorKind::InvalidArgument, "k_neighbors must be >= 1");
  if (!(d_t > 0.0)) throw Error(ErrorKind::InvalidArgument, "d_t must be > 0");
}

void VoxelGridConfig::validate() const {
  if (!(leaf_size > 0.0)) throw Error(ErrorKind::InvalidArgument, "leaf_size must be > 0");
}

OutlierFilterResult remove_statistical_outliers(const PointCloud& cloud, const OutlierFilterConfig& cfg) {
  cfg.validate();
  if (cloud.size() <= cfg.k_neighbors) {
    throw Error(ErrorKind::CloudTooSmall, "cloud has " + std::to_string(cloud.size()) +
                                              " points, need more than k=" + std::to_string(cfg.k_neighbors));
  }
  const KdTree3 tree(cloud.points);
  std::vector<double> mean_dist(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = tree.k_nearest(cloud.points[i], cfg.k_neighbors, i);
    double sum = 0.0;
    for (const auto& n : nbrs) sum += std::sqrt(n.distance_sq);
    mean_dist[i] = sum / static_cast<double>(nbrs.size());
  }

  OutlierFilterResult out;
  double sum = 0.0;
  for (double d : mean_dist) sum += d;
  out.mean = sum / static_cast<double>(mean_dist.size());
  double sq = 0.0;
  for (double d : mean_dist) sq += (d - out.mean) * (d - out.mean);
  out.stddev = std::sqrt(sq / static_cast<double>(mean_dist.size()));

  const double lo = out.mean - cfg.d_t * out.stddev;
  const double hi = out.mean + cfg.d_t * out.stddev;
  // A zero sigma collapses the interval to {mu}; the relative slack keeps
  // equal means from being split by summation rounding.
  const double slack = 1e-12 * std::max(1.0, out.mean);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (mean_dist[i] >= lo - slack && mean_dist[i] <= hi + slack) out.kept_indices.push_back(i);
  }
  out.kept = cloud.subset(out.kept_indices);
  out.removed_count = cloud.size() - out.kept_indices.size();
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, const VoxelGridConfig& cfg) {
  cfg.validate();
  PointCloud out;
  if (cloud.empty()) return out;
  const Point3 anchor = bounding_box(cloud.points).min;

  struct Cell {
    Point3 sum = Point3::Zero();
    std::size_t count = 0;
    std::int32_t tag = 0;
  };
  std::map<std::array<std::int64_t, 3>, Cell> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 rel = (cloud.points[i] - anchor) / cfg.leaf_size;
    const std::array<std::int64_t, 3> key{static_cast<std::int64_t>(std::floor(rel.x())),
                                          static_cast<std::int64_t>(std::floor(rel.y())),
                                          static_cast<std::int64_t>(std::floor(rel.z()))};
    Cell& c = cells[key];
    if (c.count == 0 && cloud.has_tags()) c.tag = cloud.tags[i];
    c.sum += cloud.points[i];
    ++c.count;
  }
  out.points.reserve(cells.size());
  for (const auto& [key, c] : cells) {
    out.points.push_back(c.sum / static_cast<double>(c.count));
    if (cloud.has_tags()) out.tags.push_back(c.tag);
  }
  return out;
}

}  // namespace uavscan
