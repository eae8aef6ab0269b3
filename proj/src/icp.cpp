#include "uavscan/icp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "uavscan/error.hpp"
#include "uavscan/kdtree.hpp"

namespace uavscan {

namespace {

struct Pair {
  std::size_t source;
  std::size_t target;
  double distance_sq;
};

// Tracks the residual sequence and decides when to stop.
class ResidualMonitor {
 public:
  explicit ResidualMonitor(const IcpConfig& cfg, IcpTrace* trace) : cfg_(cfg), trace_(trace) {}

  // Returns true when the iteration has converged.
  bool update(double rms, std::size_t pairs) {
    if (trace_) {
      trace_->residuals.push_back(rms);
      trace_->pair_counts.push_back(pairs);
    }
    // A higher residual over a larger match set is not divergence: points
    // entering the gate near its edge raise the mean.
    if (rms > previous_ && pairs <= previous_pairs_) {
      if (++growth_ >= 3) {
        throw Error(ErrorKind::IcpDiverged, "residual grew for 3 consecutive iterations");
      }
    } else {
      growth_ = 0;
    }
    const bool converged = std::abs(previous_ - rms) < cfg_.convergence_eps;
    previous_ = rms;
    previous_pairs_ = pairs;
    if (converged && trace_) trace_->converged = true;
    return converged;
  }

 private:
  const IcpConfig& cfg_;
  IcpTrace* trace_;
  double previous_ = std::numeric_limits<double>::infinity();
  std::size_t previous_pairs_ = 0;
  int growth_ = 0;
};

template <int Dim>
std::vector<Pair> match(const KdTree<Dim>& tree, const std::vector<Eigen::Matrix<double, Dim, 1>>& moved,
                        const IcpConfig& cfg) {
  const double max_sq = cfg.max_correspondence_dist * cfg.max_correspondence_dist;
  std::vector<Pair> pairs;
  pairs.reserve(moved.size());
  for (std::size_t i = 0; i < moved.size(); ++i) {
    const auto nn = tree.nearest(moved[i]);
    if (nn && nn->distance_sq <= max_sq) pairs.push_back({i, nn->index, nn->distance_sq});
  }
  if (cfg.median_reject > 0.0 && pairs.size() > 3) {
    std::vector<double> d2(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) d2[i] = pairs[i].distance_sq;
    auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    const double limit = cfg.median_reject * cfg.median_reject * *mid;
    if (limit > 0.0) {
      std::erase_if(pairs, [&](const Pair& p) { return p.distance_sq > limit; });
    }
  }
  return pairs;
}

double rms_of(const std::vector<Pair>& pairs) {
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.distance_sq;
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

template <int Dim>
bool spans_less_than_two_dims(const std::vector<Eigen::Matrix<double, Dim, 1>>& pts) {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  using Mat = Eigen::Matrix<double, Dim, Dim>;
  if (pts.size() < 3) return true;
  Vec mean = Vec::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat cov = Mat::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> solver(cov, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();  // ascending
  const double largest = ev[Dim - 1];
  return largest <= 0.0 || ev[Dim - 2] <= 1e-12 * largest;
}

}  // namespace

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

Point2 RigidTransform2D::apply(const Point2& p) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x() - s * p.y() + translation.x(), s * p.x() + c * p.y() + translation.y()};
}

void IcpConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "icp max_iterations must be >= 1");
  if (!(convergence_eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "icp convergence_eps must be > 0");
  if (!(max_correspondence_dist > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "icp max_correspondence_dist must be > 0");
  }
  if (!(median_reject >= 0.0)) throw Error(ErrorKind::InvalidArgument, "icp median_reject must be >= 0");
}

namespace {

struct Match2 {
  std::size_t source;
  Point2 target;
  double distance_sq;
};

std::vector<Match2> reject_by_median(std::vector<Match2> pairs, const IcpConfig& cfg) {
  if (cfg.median_reject <= 0.0 || pairs.size() <= 3) return pairs;
  std::vector<double> d2(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) d2[i] = pairs[i].distance_sq;
  auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  const double limit = cfg.median_reject * cfg.median_reject * *mid;
  if (limit > 0.0) std::erase_if(pairs, [&](const Match2& m) { return m.distance_sq > limit; });
  return pairs;
}

// Shared 2D loop. `closest` maps a moved source point to its partner, or
// nullopt when there is none within range.
template <typename Closest>
RigidTransform2D align_2d(std::span<const Point2> source, std::size_t target_size, const RigidTransform2D& init,
                          const IcpConfig& cfg, IcpTrace* trace, Closest&& closest) {
  cfg.validate();
  if (source.size() < 3 || target_size < 3) {
    throw Error(ErrorKind::DegenerateGeometry, "icp needs at least 3 points per set");
  }
  std::vector<Point2> src(source.begin(), source.end());
  if (!cfg.rotation_locked && spans_less_than_two_dims<2>(src)) {
    throw Error(ErrorKind::DegenerateGeometry, "source points are collinear");
  }
  const double max_sq = cfg.max_correspondence_dist * cfg.max_correspondence_dist;

  RigidTransform2D current = init;
  current.angle = cfg.rotation_locked ? init.angle : wrap_angle(init.angle);
  ResidualMonitor monitor(cfg, trace);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::vector<Match2> pairs;
    pairs.reserve(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      const Point2 moved = current.apply(src[i]);
      if (const auto t = closest(moved)) {
        const double d2 = (*t - moved).squaredNorm();
        if (d2 <= max_sq) pairs.push_back({i, *t, d2});
      }
    }
    if (pairs.empty()) {
      throw Error(ErrorKind::IcpDiverged, "no correspondences within max_correspondence_dist");
    }
    pairs = reject_by_median(std::move(pairs), cfg);
    if (pairs.size() < std::max<std::size_t>(cfg.min_pairs, 1)) {
      throw Error(ErrorKind::InsufficientOverlap,
                  std::to_string(pairs.size()) + " matched pairs, need " + std::to_string(cfg.min_pairs));
    }
    double sum_sq = 0.0;
    for (const auto& p : pairs) sum_sq += p.distance_sq;
    if (monitor.update(std::sqrt(sum_sq / static_cast<double>(pairs.size())), pairs.size())) break;

    if (cfg.rotation_locked) {
      const double c = std::cos(current.angle);
      const double s = std::sin(current.angle);
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for (const auto& p : pairs) {
        const Point2& a = src[p.source];
        sum += p.target - Point2(c * a.x() - s * a.y(), s * a.x() + c * a.y());
      }
      current.translation = sum / static_cast<double>(pairs.size());
      continue;
    }

    Point2 mean_s = Point2::Zero();
    Point2 mean_t = Point2::Zero();
    for (const auto& p : pairs) {
      mean_s += src[p.source];
      mean_t += p.target;
    }
    mean_s /= static_cast<double>(pairs.size());
    mean_t /= static_cast<double>(pairs.size());
    double sxy = 0.0;
    double sdot = 0.0;
    for (const auto& p : pairs) {
      const Point2 a = src[p.source] - mean_s;
      const Point2 b = p.target - mean_t;
      sxy += a.x() * b.y() - a.y() * b.x();
      sdot += a.dot(b);
    }
    current.angle = wrap_angle(std::atan2(sxy, sdot));
    const double c = std::cos(current.angle);
    const double s = std::sin(current.angle);
    current.translation = mean_t - Point2(c * mean_s.x() - s * mean_s.y(), s * mean_s.x() + c * mean_s.y());
  }
  return current;
}

Point2 closest_on_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Eigen::Vector2d ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace

RigidTransform2D icp_align_2d(std::span<const Point2> source, std::span<const Point2> target,
                              const RigidTransform2D& init, const IcpConfig& cfg, IcpTrace* trace) {
  const KdTree2 tree(std::vector<Point2>(target.begin(), target.end()));
  return align_2d(source, target.size(), init, cfg, trace, [&](const Point2& q) -> std::optional<Point2> {
    const auto nn = tree.nearest(q);
    if (!nn) return std::nullopt;
    return tree.point(nn->index);
  });
}

RigidTransform2D icp_align_2d(std::span<const Point2> source, const Polyline2& target,
                              const RigidTransform2D& init, const IcpConfig& cfg, IcpTrace* trace) {
  const auto& v = target.vertices;
  if (!target.linked.empty() && target.linked.size() + 1 != v.size()) {
    throw Error(ErrorKind::InvalidArgument, "polyline link flags must number vertices - 1");
  }
  const KdTree2 tree(v);
  return align_2d(source, v.size(), init, cfg, trace, [&](const Point2& q) -> std::optional<Point2> {
    const auto nn = tree.nearest(q);
    if (!nn) return std::nullopt;
    const std::size_t i = nn->index;
    Point2 best = v[i];
    double best_d = nn->distance_sq;
    auto consider = [&](std::size_t a) {
      if (target.linked.empty() || !target.linked[a]) return;
      const Point2 c = closest_on_segment(q, v[a], v[a + 1]);
      const double d = (c - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    };
    if (i > 0) consider(i - 1);
    if (i + 1 < v.size()) consider(i);
    return best;
  });
}

Pose icp_align_3d(const PointCloud& source, const PointCloud& target, const Pose& init,
                  const IcpConfig& cfg, IcpTrace* trace) {
  cfg.validate();
  if (source.size() < 3 || target.size() < 3) {
    throw Error(ErrorKind::DegenerateGeometry, "icp needs at least 3 points per cloud");
  }
  const KdTree3 tree(target.points);
  const auto& src = source.points;

  Pose current = init;
  ResidualMonitor monitor(cfg, trace);
  std::vector<Point3> moved(src.size());

  for (int it = 0; it < cfg.max_iterations; ++it) {
    for (std::size_t i = 0; i < src.size(); ++i) moved[i] = current.apply(src[i]);
    const auto pairs = match(tree, moved, cfg);
    if (pairs.size() < 3) {
      throw Error(ErrorKind::DegenerateGeometry,
                  std::to_string(pairs.size()) + " corresponding points, need at least 3");
    }
    if (pairs.size() < cfg.min_pairs) {
      throw Error(ErrorKind::InsufficientOverlap,
                  std::to_string(pairs.size()) + " matched pairs, need " + std::to_string(cfg.min_pairs));
    }
    if (monitor.update(rms_of(pairs), pairs.size())) break;

    if (cfg.rotation_locked) {
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      for (const auto& p : pairs) sum += tree.point(p.target) - current.rotation * src[p.source];
      current.translation = sum / static_cast<double>(pairs.size());
      continue;
    }

    Point3 mean_s = Point3::Zero();
    Point3 mean_t = Point3::Zero();
    for (const auto& p : pairs) {
      mean_s += src[p.source];
      mean_t += tree.point(p.target);
    }
    mean_s /= static_cast<double>(pairs.size());
    mean_t /= static_cast<double>(pairs.size());

    std::vector<Point3> matched;
    matched.reserve(pairs.size());
    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    for (const auto& p : pairs) {
      matched.push_back(src[p.source]);
      cross += (src[p.source] - mean_s) * (tree.point(p.target) - mean_t).transpose();
    }
    if (spans_less_than_two_dims<3>(matched)) {
      throw Error(ErrorKind::DegenerateGeometry, "corresponding points are collinear");
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d& u = svd.matrixU();
    const Eigen::Matrix3d& v = svd.matrixV();
    Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
    fix(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    current.rotation = v * fix * u.transpose();
    current.translation = mean_t - current.rotation * mean_s;
  }
  return current;
}

OverlapSubsets predict_overlap(const PointCloud& a, const PointCloud& b, const Pose& pose_a,
                               const Pose& pose_b, double margin) {
  if (!(margin >= 0.0)) throw Error(ErrorKind::InvalidArgument, "overlap margin must be >= 0");
  PointCloud ga = transform_cloud(pose_a, a);
  PointCloud gb = transform_cloud(pose_b, b);
  const Aabb box_a = bounding_box(ga.points);
  const Aabb box_b = bounding_box(gb.points);
  if (box_a.empty() || box_b.empty()) throw Error(ErrorKind::NoOverlap, "empty cloud");

  Aabb window;
  window.min = (box_a.min.cwiseMax(box_b.min).array() - margin).matrix();
  window.max = (box_a.max.cwiseMin(box_b.max).array() + margin).matrix();
  if (window.empty()) throw Error(ErrorKind::NoOverlap, "bounding boxes do not intersect");

  OverlapSubsets out;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    if (window.contains(ga.points[i])) out.a_indices.push_back(i);
  }
  for (std::size_t i = 0; i < gb.size(); ++i) {
    if (window.contains(gb.points[i])) out.b_indices.push_back(i);
  }
  if (out.a_indices.empty() || out.b_indices.empty()) {
    throw Error(ErrorKind::NoOverlap, "no points inside the overlap window");
  }
  out.a = ga.subset(out.a_indices);
  out.b = gb.subset(out.b_indices);
  return out;
}

namespace {
PointCloud tagged(PointCloud cloud, std::int32_t tag) {
  cloud.tags.assign(cloud.size(), tag);
  return cloud;
}
}  // namespace

Registration register_clouds(std::span<const Station> stations, const RegistrationConfig& cfg) {
  if (stations.empty()) throw Error(ErrorKind::InvalidArgument, "registration needs at least one station");
  cfg.icp.validate();

  Registration out;
  out.poses.push_back(stations[0].recorded_pose);
  out.merged = tagged(transform_cloud(stations[0].recorded_pose, stations[0].cloud), 0);

  for (std::size_t i = 1; i < stations.size(); ++i) {
    const Station& st = stations[i];
    PointCloud source;
    PointCloud target;
    try {
      auto overlap = predict_overlap(out.merged, st.cloud, Pose::identity(), st.recorded_pose,
                                     cfg.overlap_margin);
      source = std::move(overlap.b);
      target = std::move(overlap.a);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoOverlap) throw;
      source = transform_cloud(st.recorded_pose, st.cloud);
      target = out.merged;
    }

    Pose correction;
    try {
      correction = icp_align_3d(source, target, Pose::identity(), cfg.icp);
    } catch (const Error& e) {
      throw Error(e.kind(), "station " + std::to_string(i) + ": " + e.what(), i);
    }
    const Pose refined = correction.compose(st.recorded_pose);
    out.poses.push_back(refined);
    out.merged.append(tagged(transform_cloud(refined, st.cloud), static_cast<std::int32_t>(i)));
  }
  return out;
}

}  // namespace uavscan
