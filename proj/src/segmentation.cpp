#include "uavscan/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "uavscan/clustering.hpp"
#include "uavscan/error.hpp"
#include "uavscan/polygon.hpp"

namespace uavscan {

PlaneModel canonicalize(PlaneModel model) {
  constexpr double zero_tol = 1e-12;
  bool flip = model.d > zero_tol;
  if (std::abs(model.d) <= zero_tol) {
    for (int i = 0; i < 3; ++i) {
      if (model.normal[i] != 0.0) {
        flip = model.normal[i] < 0.0;
        break;
      }
    }
  }
  if (flip) {
    model.normal = -model.normal;
    model.d = -model.d;
  }
  return model;
}

void RansacConfig::validate() const {
  if (!(distance_threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "distance_threshold must be > 0");
  if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "ransac iterations must be >= 1");
  if (!(min_area > 0.0) || !(max_area > 0.0) || min_area > max_area) {
    throw Error(ErrorKind::InvalidArgument, "area thresholds must satisfy 0 < min_area <= max_area");
  }
  if (area_estimator == AreaEstimator::Density && !(point_density > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "point_density must be > 0");
  }
}

namespace {

std::vector<std::size_t> inliers_of(const std::vector<Point3>& points, const PlaneModel& model, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (model.distance(points[i]) <= threshold) out.push_back(i);
  }
  return out;
}

}  // namespace

PlaneFit ransac_plane(const std::vector<Point3>& points, const RansacConfig& cfg) {
  cfg.validate();
  const std::size_t n = points.size();
  if (n < 3) throw Error(ErrorKind::NoPlaneFound, "fewer than 3 points");

  std::mt19937_64 rng(cfg.rng_seed);
  auto draw = [&] { return static_cast<std::size_t>(rng() % n); };

  // Bound on redraws so an all-collinear cloud terminates.
  const std::size_t max_draws = 100 * static_cast<std::size_t>(cfg.iterations) + 1000;
  std::size_t draws = 0;
  std::size_t best_count = 0;
  PlaneModel best;
  bool have_model = false;

  for (int trial = 0; trial < cfg.iterations && draws < max_draws;) {
    ++draws;
    const std::size_t i0 = draw();
    const std::size_t i1 = draw();
    const std::size_t i2 = draw();
    if (i0 == i1 || i1 == i2 || i0 == i2) continue;
    const Eigen::Vector3d a = points[i1] - points[i0];
    const Eigen::Vector3d b = points[i2] - points[i0];
    const Eigen::Vector3d cross = a.cross(b);
    if (cross.norm() <= 1e-9 * a.norm() * b.norm()) continue;

    PlaneModel model;
    model.normal = cross.normalized();
    model.d = -model.normal.dot(points[i0]);
    std::size_t count = 0;
    for (const auto& p : points) count += model.distance(p) <= cfg.distance_threshold ? 1 : 0;
    if (count > best_count) {
      best_count = count;
      best = model;
      have_model = true;
    }
    ++trial;
  }
  if (!have_model) throw Error(ErrorKind::NoPlaneFound, "no non-collinear sample found");

  PlaneFit fit;
  fit.model = canonicalize(best);
  fit.inliers = inliers_of(points, fit.model, cfg.distance_threshold);
  if (fit.inliers.size() >= 3) {
    std::vector<Point3> in;
    in.reserve(fit.inliers.size());
    for (std::size_t i : fit.inliers) in.push_back(points[i]);
    try {
      // Always refit: a tilted sample plane can hold the same inliers plus clutter.
      fit.model = refine_plane(in);
      fit.inliers = inliers_of(points, fit.model, cfg.distance_threshold);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateGeometry) throw;
    }
  }
  if (fit.inliers.size() < cfg.min_inliers) {
    throw Error(ErrorKind::NoPlaneFound, "best plane has " + std::to_string(fit.inliers.size()) +
                                             " inliers, need " + std::to_string(cfg.min_inliers));
  }
  return fit;
}

PlaneModel refine_plane(const std::vector<Point3>& points) {
  if (points.size() < 3) throw Error(ErrorKind::DegenerateGeometry, "plane fit needs 3 points");
  Point3 centroid = Point3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) cov += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const auto& ev = solver.eigenvalues();
  if (!(ev[2] > 0.0) || ev[1] <= 1e-12 * ev[2]) {
    throw Error(ErrorKind::DegenerateGeometry, "points are collinear or coincident");
  }
  PlaneModel model;
  model.normal = solver.eigenvectors().col(0).normalized();
  model.d = -model.normal.dot(centroid);
  return canonicalize(model);
}

PlaneBasis plane_basis(const PlaneModel& model) {
  PlaneBasis basis;
  basis.normal = model.normal;
  basis.origin = -model.d * model.normal;
  int axis = 0;
  model.normal.cwiseAbs().minCoeff(&axis);
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
  basis.u = (e - e.dot(model.normal) * model.normal).normalized();
  basis.v = model.normal.cross(basis.u);
  return basis;
}

PlaneProjection project_to_plane(const std::vector<Point3>& points, const PlaneModel& model) {
  PlaneProjection out;
  out.basis = plane_basis(model);
  out.coords.reserve(points.size());
  for (const auto& p : points) out.coords.push_back(out.basis.project(p));
  return out;
}

std::vector<Point2> PlanarSurface::boundary_2d() const {
  const PlaneBasis basis = plane_basis(model);
  std::vector<Point2> out;
  out.reserve(boundary.size());
  for (const auto& p : boundary) out.push_back(basis.project(p));
  return out;
}

double surface_area(const PlanarSurface& surface) {
  const double area = polygon_area(surface.boundary_2d());
  return area < 1e-6 ? 0.0 : area;
}

SurfaceExtraction extract_surfaces(const PointCloud& cloud, const RansacConfig& cfg, double cluster_eps) {
  cfg.validate();
  ClusterConfig trim;
  trim.radius = cluster_eps;
  trim.min_cluster_size = 1;
  trim.validate();

  SurfaceExtraction out;
  std::vector<std::size_t> working(cloud.size());
  for (std::size_t i = 0; i < working.size(); ++i) working[i] = i;
  std::vector<bool> accepted(cloud.size(), false);

  for (std::uint64_t round = 0; working.size() >= 3; ++round) {
    std::vector<Point3> pts;
    pts.reserve(working.size());
    for (std::size_t i : working) pts.push_back(cloud.points[i]);

    RansacConfig round_cfg = cfg;
    round_cfg.rng_seed = cfg.rng_seed + round * 0x9E3779B97F4A7C15ULL;
    PlaneFit fit;
    try {
      fit = ransac_plane(pts, round_cfg);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoPlaneFound) break;
      throw;
    }

    // Keep only the largest connected component of the inliers.
    std::vector<Point3> inlier_pts;
    inlier_pts.reserve(fit.inliers.size());
    for (std::size_t i : fit.inliers) inlier_pts.push_back(pts[i]);
    const Clustering parts = euclidean_cluster(inlier_pts, trim);
    const Cluster& largest = parts.clusters.front();

    PlanarSurface surface;
    surface.model = fit.model;
    std::vector<Point3> member_pts;
    member_pts.reserve(largest.indices.size());
    for (std::size_t k : largest.indices) {
      surface.inliers.push_back(working[fit.inliers[k]]);
      member_pts.push_back(inlier_pts[k]);
    }
    std::sort(surface.inliers.begin(), surface.inliers.end());
    surface.inlier_count = surface.inliers.size();

    const PlaneProjection proj = project_to_plane(member_pts, surface.model);
    try {
      for (const auto& q : convex_hull_2d(proj.coords)) surface.boundary.push_back(proj.basis.lift(q));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateGeometry) throw;
    }
    if (cfg.area_estimator == AreaEstimator::Hull) {
      surface.area = surface_area(surface);
    } else {
      surface.area = static_cast<double>(surface.inlier_count) / cfg.point_density;
    }

    const bool big_enough = surface.area >= cfg.min_area && surface.boundary.size() >= 3 &&
                            surface.inlier_count >= cfg.min_inliers;
    const bool small_enough = surface.area <= cfg.max_area;
    if (big_enough && small_enough) {
      for (std::size_t i : surface.inliers) accepted[i] = true;
      out.surfaces.push_back(std::move(surface));
    } else {
      auto& bin = big_enough ? out.rejected_large : out.rejected_small;
      bin.insert(bin.end(), surface.inliers.begin(), surface.inliers.end());
    }

    std::vector<bool> drop(cloud.size(), false);
    for (std::size_t k : largest.indices) drop[working[fit.inliers[k]]] = true;
    std::erase_if(working, [&](std::size_t i) { return drop[i]; });
  }

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!accepted[i]) out.remainder.push_back(i);
  }
  std::sort(out.rejected_small.begin(), out.rejected_small.end());
  std::sort(out.rejected_large.begin(), out.rejected_large.end());
  return out;
}

}  // namespace uavscan
