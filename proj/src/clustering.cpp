#include "uavscan/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "uavscan/error.hpp"
#include "uavscan/kdtree.hpp"

namespace uavscan {

void ClusterConfig::validate() const {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "cluster radius must be > 0");
  if (min_cluster_size < 1) throw Error(ErrorKind::InvalidArgument, "min_cluster_size must be >= 1");
}

Clustering euclidean_cluster(const std::vector<Point3>& points, const ClusterConfig& cfg) {
  cfg.validate();
  Clustering out;
  if (points.empty()) return out;

  const KdTree3 tree(points);
  std::vector<bool> processed(points.size(), false);
  std::deque<std::size_t> queue;
  std::vector<Cluster> found;

  for (std::size_t seed = 0; seed < points.size(); ++seed) {
    if (processed[seed]) continue;
    Cluster cluster;
    queue.push_back(seed);
    processed[seed] = true;
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      cluster.indices.push_back(q);
      for (std::size_t n : tree.radius_search(points[q], cfg.radius)) {
        if (!processed[n]) {
          processed[n] = true;
          queue.push_back(n);
        }
      }
    }
    std::sort(cluster.indices.begin(), cluster.indices.end());
    if (cluster.indices.size() >= cfg.min_cluster_size) {
      found.push_back(std::move(cluster));
    } else {
      out.noise.insert(out.noise.end(), cluster.indices.begin(), cluster.indices.end());
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const Cluster& a, const Cluster& b) {
    if (a.indices.size() != b.indices.size()) return a.indices.size() > b.indices.size();
    return a.indices.front() < b.indices.front();
  });
  std::sort(out.noise.begin(), out.noise.end());
  out.clusters = std::move(found);
  return out;
}

Octree::Octree(const std::vector<Point3>& points, double leaf_resolution) : leaf_(leaf_resolution) {
  if (!(leaf_resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "leaf resolution must be > 0");
  if (points.empty()) return;
  const Aabb box = bounding_box(points);
  origin_ = box.min;
  const double extent = (box.max - box.min).maxCoeff();
  while (leaf_ * static_cast<double>(std::int64_t{1} << depth_) <= extent) ++depth_;

  nodes_.push_back({});
  for (const auto& p : points) {
    const auto cell = cell_of(p);
    std::int32_t node = 0;
    ++nodes_[0].count;
    for (int level = depth_ - 1; level >= 0; --level) {
      const int child = static_cast<int>(((cell[0] >> level) & 1) << 2 | ((cell[1] >> level) & 1) << 1 |
                                         ((cell[2] >> level) & 1));
      if (nodes_[static_cast<std::size_t>(node)].children[static_cast<std::size_t>(child)] < 0) {
        nodes_[static_cast<std::size_t>(node)].children[static_cast<std::size_t>(child)] =
            static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back({});
        if (level == 0) ++leaf_count_;
      }
      node = nodes_[static_cast<std::size_t>(node)].children[static_cast<std::size_t>(child)];
      ++nodes_[static_cast<std::size_t>(node)].count;
    }
  }
  if (depth_ == 0) leaf_count_ = 1;
}

std::array<std::int64_t, 3> Octree::cell_of(const Point3& p) const {
  const std::int64_t last = (std::int64_t{1} << depth_) - 1;
  std::array<std::int64_t, 3> cell{};
  for (int a = 0; a < 3; ++a) {
    const auto i = static_cast<std::int64_t>(std::floor((p[a] - origin_[a]) / leaf_));
    cell[static_cast<std::size_t>(a)] = std::clamp<std::int64_t>(i, 0, last);
  }
  return cell;
}

void Octree::collect(std::int32_t node, int level, std::array<std::int64_t, 3> base,
                     std::vector<Point3>* centers, std::vector<std::size_t>* counts) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (level == 0) {
    if (centers) {
      centers->push_back(origin_ + Point3(static_cast<double>(base[0]) + 0.5, static_cast<double>(base[1]) + 0.5,
                                          static_cast<double>(base[2]) + 0.5) * leaf_);
    }
    if (counts) counts->push_back(n.count);
    return;
  }
  const std::int64_t half = std::int64_t{1} << (level - 1);
  for (int c = 0; c < 8; ++c) {
    const std::int32_t child = n.children[static_cast<std::size_t>(c)];
    if (child < 0) continue;
    std::array<std::int64_t, 3> b = base;
    if (c & 4) b[0] += half;
    if (c & 2) b[1] += half;
    if (c & 1) b[2] += half;
    collect(child, level - 1, b, centers, counts);
  }
}

std::vector<Point3> Octree::leaf_centers() const {
  std::vector<Point3> out;
  if (!nodes_.empty()) collect(0, depth_, {0, 0, 0}, &out, nullptr);
  return out;
}

std::vector<std::size_t> Octree::leaf_point_counts() const {
  std::vector<std::size_t> out;
  if (!nodes_.empty()) collect(0, depth_, {0, 0, 0}, nullptr, &out);
  return out;
}

bool Octree::is_occupied(const Point3& p) const {
  if (nodes_.empty()) return false;
  const double size = root_size();
  for (int a = 0; a < 3; ++a) {
    if (p[a] < origin_[a] || p[a] > origin_[a] + size) return false;
  }
  const auto cell = cell_of(p);
  std::int32_t node = 0;
  for (int level = depth_ - 1; level >= 0; --level) {
    const int child = static_cast<int>(((cell[0] >> level) & 1) << 2 | ((cell[1] >> level) & 1) << 1 |
                                       ((cell[2] >> level) & 1));
    node = nodes_[static_cast<std::size_t>(node)].children[static_cast<std::size_t>(child)];
    if (node < 0) return false;
  }
  return true;
}

Octree octree_from_points(const std::vector<Point3>& points, double leaf_resolution) {
  return Octree(points, leaf_resolution);
}

}  // namespace uavscan
