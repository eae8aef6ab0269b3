#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace uavscan {

/// Static k-d tree over a point set in `Dim` dimensions.
///
/// All queries are exact. Among equidistant candidates the lowest point index
/// wins, so results never depend on traversal order.
template <int Dim>
class KdTree {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  struct Neighbor {
    std::size_t index;
    double distance_sq;
  };

  KdTree() = default;
  explicit KdTree(std::vector<Point> points, std::size_t leaf_size = 12)
      : points_(std::move(points)), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
    if (!points_.empty()) build(0, order_.size());
  }

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const noexcept { return points_; }

  std::optional<Neighbor> nearest(const Point& query) const {
    if (points_.empty()) return std::nullopt;
    Neighbor best{points_.size(), std::numeric_limits<double>::infinity()};
    nearest_impl(0, query, best);
    return best;
  }

  /// The k nearest points ordered by (distance, index). `exclude` drops one
  /// index from consideration (typically the query point itself).
  std::vector<Neighbor> k_nearest(const Point& query, std::size_t k,
                                  std::optional<std::size_t> exclude = std::nullopt) const {
    std::vector<Neighbor> heap;
    if (k == 0 || points_.empty()) return heap;
    heap.reserve(k + 1);
    knn_impl(0, query, k, exclude, heap);
    std::sort_heap(heap.begin(), heap.end(), less);
    return heap;
  }

  /// Indices of all points with distance <= radius, ascending.
  std::vector<std::size_t> radius_search(const Point& query, double radius) const {
    std::vector<std::size_t> out;
    if (points_.empty() || radius < 0.0) return out;
    radius_impl(0, query, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Node {
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  static bool less(const Neighbor& a, const Neighbor& b) {
    return a.distance_sq < b.distance_sq ||
           (a.distance_sq == b.distance_sq && a.index < b.index);
  }

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].begin = static_cast<std::uint32_t>(begin);
    nodes_[id].end = static_cast<std::uint32_t>(end);
    if (end - begin <= leaf_size_) return id;

    Point lo = points_[order_[begin]];
    Point hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) return id;  // all coincident

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    const double split = points_[order_[mid]][axis];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void nearest_impl(std::uint32_t id, const Point& q, Neighbor& best) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Neighbor cand{order_[i], (points_[order_[i]] - q).squaredNorm()};
        if (less(cand, best)) best = cand;
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::uint32_t first = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t second = diff <= 0.0 ? node.right : node.left;
    nearest_impl(first, q, best);
    if (diff * diff <= best.distance_sq) nearest_impl(second, q, best);
  }

  void knn_impl(std::uint32_t id, const Point& q, std::size_t k,
                const std::optional<std::size_t>& exclude, std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        if (exclude && *exclude == idx) continue;
        const Neighbor cand{idx, (points_[idx] - q).squaredNorm()};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), less);
        } else if (less(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), less);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), less);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::uint32_t first = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t second = diff <= 0.0 ? node.right : node.left;
    knn_impl(first, q, k, exclude, heap);
    if (heap.size() < k || diff * diff <= heap.front().distance_sq) {
      knn_impl(second, q, k, exclude, heap);
    }
  }

  void radius_impl(std::uint32_t id, const Point& q, double radius_sq,
                   std::vector<std::size_t>& out) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if ((points_[order_[i]] - q).squaredNorm() <= radius_sq) out.push_back(order_[i]);
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    if (diff <= 0.0 || diff * diff <= radius_sq) radius_impl(node.left, q, radius_sq, out);
    if (diff >= 0.0 || diff * diff <= radius_sq) radius_impl(node.right, q, radius_sq, out);
  }

  std::vector<Point> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_ = 12;
};

using KdTree2 = KdTree<2>;
using KdTree3 = KdTree<3>;

}  // namespace uavscan
