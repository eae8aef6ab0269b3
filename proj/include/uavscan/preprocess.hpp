#pragma once

#include <cstddef>
#include <vector>

#include "uavscan/geometry.hpp"

namespace uavscan {

// Defaults are not tuned to a particular sensor; k follows common practice
// for statistical outlier removal.
struct OutlierFilterConfig {
  std::size_t k_neighbors = 50;
  double d_t = 1.0;  // keep mean distances within mu +- d_t * sigma

  void validate() const;
};

struct VoxelGridConfig {
  double leaf_size = 0.05;  // meters

  void validate() const;
};

struct OutlierFilterResult {
  PointCloud kept;
  std::vector<std::size_t> kept_indices;  // into the input, ascending
  std::size_t removed_count = 0;
  double mean = 0.0;    // mu of per-point mean neighbor distances
  double stddev = 0.0;  // population sigma
};

OutlierFilterResult remove_statistical_outliers(const PointCloud& cloud, const OutlierFilterConfig& cfg);

/// One centroid per occupied voxel. The grid is anchored at the cloud's
/// minimum corner and the output is ordered by (ix, iy, iz). Tags, when
/// present, are taken from the first member of each voxel.
PointCloud voxel_downsample(const PointCloud& cloud, const VoxelGridConfig& cfg);

}  // namespace uavscan
