#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/SVD>

#include "doctest.h"
#include "uavscan/error.hpp"
#include "uavscan/polygon.hpp"
#include "uavscan/scene.hpp"
#include "uavscan/segmentation.hpp"

using namespace uavscan;

namespace {

double angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::acos(std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0)) * 180.0 / std::numbers::pi;
}

std::vector<Point3> plane_with_clutter(std::uint64_t seed, int plane_pts, int clutter) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Point3> pts;
  for (int i = 0; i < plane_pts; ++i) pts.push_back({u(rng), u(rng), 0.0});
  for (int i = 0; i < clutter; ++i) pts.push_back({u(rng), u(rng), u(rng)});
  return pts;
}

PointCloud rectangle(double w, double h, double spacing, Point3 offset = Point3::Zero()) {
  PointCloud c;
  for (double x = 0; x <= w + 1e-9; x += spacing)
    for (double y = 0; y <= h + 1e-9; y += spacing) c.push_back(offset + Point3(x, y, 0));
  return c;
}

}  // namespace

TEST_CASE("RANSAC finds z=0 under 5 percent clutter") {
  const auto pts = plane_with_clutter(1, 500, 25);
  RansacConfig cfg;
  const PlaneFit fit = ransac_plane(pts, cfg);
  CHECK(angle_deg(fit.model.normal, {0, 0, 1}) <= 1.0);
  CHECK(std::abs(fit.model.d) < 0.05);
  for (std::size_t i : fit.inliers) CHECK(fit.model.distance(pts[i]) <= cfg.distance_threshold);
}

TEST_CASE("RANSAC on three exact points") {
  RansacConfig cfg;
  cfg.min_inliers = 3;
  const PlaneFit fit = ransac_plane({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, cfg);
  CHECK(std::abs(std::abs(fit.model.normal.z()) - 1.0) <= 1e-12);
  CHECK(std::abs(fit.model.d) <= 1e-12);
  CHECK(fit.inliers.size() == 3);
}

TEST_CASE("RANSAC on collinear points finds nothing") {
  std::vector<Point3> line;
  for (int i = 0; i < 300; ++i) line.push_back({i * 0.1, 2 * i * 0.1, 1.0});
  RansacConfig cfg;
  try {
    ransac_plane(line, cfg);
    FAIL("expected NoPlaneFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoPlaneFound);
  }
}

TEST_CASE("RANSAC is deterministic per seed") {
  const auto pts = plane_with_clutter(2, 300, 150);
  RansacConfig cfg;
  cfg.rng_seed = 99;
  const PlaneFit a = ransac_plane(pts, cfg);
  const PlaneFit b = ransac_plane(pts, cfg);
  CHECK(a.model.normal == b.model.normal);
  CHECK(a.model.d == b.model.d);
  CHECK(a.inliers == b.inliers);
}

TEST_CASE("refine_plane") {
  SUBCASE("exact plane points have zero residual") {
    std::vector<Point3> pts;
    const Eigen::Vector3d n = Eigen::Vector3d(1, 2, 2).normalized();
    const Eigen::Vector3d a = n.unitOrthogonal(), b = n.cross(a);
    for (int i = 0; i < 50; ++i) pts.push_back(3.0 * n + (i % 7) * a + (i / 7) * 0.5 * b);
    const PlaneModel m = refine_plane(pts);
    for (const auto& p : pts) CHECK(m.distance(p) <= 1e-12);
    CHECK(m.d <= 0.0);
  }
  SUBCASE("symmetric perturbation cancels") {
    std::vector<Point3> pts;
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y) {
        pts.push_back({x - 2.0, y - 2.0, 0.01});
        pts.push_back({x - 2.0, y - 2.0, -0.01});
      }
    const PlaneModel m = refine_plane(pts);
    CHECK(std::abs(m.normal.z() - 1.0) <= 1e-12);
    CHECK(std::abs(m.d) <= 1e-12);
  }
  SUBCASE("matches an SVD fit on noisy data") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3);
    std::normal_distribution<double> noise(0, 0.05);
    std::vector<Point3> pts;
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng), y = u(rng);
      pts.push_back({x, y, 0.3 * x - 0.2 * y + 1.0 + noise(rng)});
    }
    Eigen::MatrixXd m(pts.size(), 3);
    Point3 mean = Point3::Zero();
    for (const auto& p : pts) mean += p;
    mean /= pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = (pts[i] - mean).transpose();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    const Eigen::Vector3d expect = svd.matrixV().col(2);
    const PlaneModel got = refine_plane(pts);
    CHECK(angle_deg(got.normal, expect) <= 1e-6);
    double rms = 0;
    for (const auto& p : pts) rms += got.distance(p) * got.distance(p);
    CHECK(std::sqrt(rms / pts.size()) <= 0.2);
  }
  CHECK_THROWS_AS(refine_plane({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}), Error);
}

TEST_CASE("canonical sign") {
  CHECK(canonicalize({{0, 0, -1}, 2.0}).d == -2.0);
  CHECK(canonicalize({{0, 0, -1}, 2.0}).normal.z() == 1.0);
  CHECK(canonicalize({{0, -1, 0}, 0.0}).normal.y() == 1.0);
}

TEST_CASE("plane projection") {
  const PlaneModel z0{{0, 0, 1}, 0.0};
  const std::vector<Point3> pts{{1, 2, 0}, {-3, 0.5, 0}, {4, 4, 1}};
  const PlaneProjection proj = project_to_plane(pts, z0);
  CHECK(proj.coords[0] == Point2(1, 2));
  CHECK(proj.coords[1] == Point2(-3, 0.5));
  CHECK(proj.coords[2] == Point2(4, 4));  // off-plane point lands on its foot

  const PlaneModel tilted = canonicalize({Eigen::Vector3d(1, -2, 3).normalized(), -1.5});
  const PlaneBasis basis = plane_basis(tilted);
  CHECK(std::abs(basis.u.dot(basis.normal)) <= 1e-12);
  CHECK(std::abs(basis.u.norm() - 1) <= 1e-12);
  CHECK((basis.v - basis.normal.cross(basis.u)).norm() <= 1e-12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const Point3 p(u(rng), u(rng), u(rng));
    const Point3 foot = p - tilted.signed_distance(p) * tilted.normal;
    CHECK((basis.lift(basis.project(p)) - foot).norm() <= 1e-9);
  }
}

TEST_CASE("surface area") {
  PlanarSurface s;
  s.model = {{0, 0, 1}, 0.0};
  s.boundary = {{0, 0, 0}, {2, 0, 0}, {2, 3, 0}, {0, 3, 0}};
  CHECK(surface_area(s) == doctest::Approx(6.0));
  s.boundary = {{0, 0, 0}, {1, 0, 0}, {1, 1e-7, 0}};
  CHECK(surface_area(s) == 0.0);
}

TEST_CASE("hull area agrees with Monte Carlo") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Point2> pts(30);
    for (auto& p : pts) p = {u(rng) * 2, u(rng)};
    const auto hull = convex_hull_2d(pts);
    PlanarSurface s;
    s.model = {{0, 0, 1}, 0.0};
    for (const auto& q : hull) s.boundary.push_back(plane_basis(s.model).lift(q));
    const int samples = 400000;
    int inside = 0;
    for (int i = 0; i < samples; ++i) inside += point_in_polygon({u(rng) * 2, u(rng)}, hull);
    const double mc = 8.0 * inside / samples;
    CHECK(std::abs(surface_area(s) - mc) <= 0.01 * mc);
  }
}

TEST_CASE("extract_surfaces on a single rectangle") {
  const PointCloud c = rectangle(6, 4, 0.1);
  const SurfaceExtraction ex = extract_surfaces(c, RansacConfig{});
  REQUIRE(ex.surfaces.size() == 1);
  const PlanarSurface& s = ex.surfaces[0];
  CHECK(s.boundary.size() == 4);
  CHECK(s.area == doctest::Approx(24.0).epsilon(1e-9));
  CHECK(ex.remainder.empty());
}

TEST_CASE("extract_surfaces on a hollow cube") {
  SceneSpec cube = *builtin_scene("cube");
  const PointCloud c = generate_scene(cube, 1);
  const SurfaceExtraction ex = extract_surfaces(c, RansacConfig{});
  CHECK(ex.surfaces.size() == 6);
  std::set<std::size_t> seen;
  for (const auto& s : ex.surfaces) {
    const PlaneProjection proj = project_to_plane({}, s.model);
    const auto poly = s.boundary_2d();
    for (std::size_t i : s.inliers) {
      CHECK(seen.insert(i).second);  // pairwise disjoint
      CHECK(s.model.distance(c.points[i]) <= 0.2);
      const Point2 q = proj.basis.project(c.points[i]);
      // Inside or on the boundary, allowing rounding.
      bool inside = point_in_polygon(q, poly);
      if (!inside) {
        for (std::size_t k = 0; k < poly.size() && !inside; ++k) {
          const Point2 a = poly[k], b = poly[(k + 1) % poly.size()];
          inside = std::abs(orient(a, b, q)) <= 1e-9 * (b - a).norm();
        }
      }
      CHECK(inside);
    }
  }
  CHECK(seen.size() + ex.remainder.size() == c.size());
}

TEST_CASE("detached coplanar patch is trimmed away") {
  PointCloud c = rectangle(4, 3, 0.1);
  const std::size_t main_count = c.size();
  const PointCloud patch = rectangle(1, 1, 0.1, {6, 0, 0});
  c.append(patch);
  const SurfaceExtraction ex = extract_surfaces(c, RansacConfig{});
  REQUIRE(ex.surfaces.size() == 1);
  for (const auto& v : ex.surfaces[0].boundary) CHECK(v.x() <= 4.0 + 1e-9);
  for (std::size_t i = main_count; i < c.size(); ++i) {
    CHECK(std::find(ex.remainder.begin(), ex.remainder.end(), i) != ex.remainder.end());
  }
  CHECK(ex.surfaces[0].area == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("area limits and estimator") {
  const PointCloud c = rectangle(6, 4, 0.1);
  RansacConfig cfg;
  cfg.max_area = 10.0;
  SurfaceExtraction ex = extract_surfaces(c, cfg);
  CHECK(ex.surfaces.empty());
  CHECK(ex.rejected_large.size() == c.size());
  cfg = {};
  cfg.min_area = 30.0;
  ex = extract_surfaces(c, cfg);
  CHECK(ex.surfaces.empty());
  CHECK(ex.rejected_small.size() == c.size());
  cfg = {};
  cfg.area_estimator = AreaEstimator::Density;
  cfg.point_density = 100.0;
  ex = extract_surfaces(c, cfg);
  REQUIRE(ex.surfaces.size() == 1);
  CHECK(ex.surfaces[0].area == doctest::Approx(c.size() / 100.0));
}

TEST_CASE("extract_surfaces is deterministic") {
  const PointCloud c = generate_scene(*builtin_scene("cube"), 2);
  const SurfaceExtraction a = extract_surfaces(c, RansacConfig{});
  const SurfaceExtraction b = extract_surfaces(c, RansacConfig{});
  REQUIRE(a.surfaces.size() == b.surfaces.size());
  for (std::size_t i = 0; i < a.surfaces.size(); ++i) {
    CHECK(a.surfaces[i].model.normal == b.surfaces[i].model.normal);
    CHECK(a.surfaces[i].boundary == b.surfaces[i].boundary);
    CHECK(a.surfaces[i].inliers == b.surfaces[i].inliers);
  }
  CHECK(a.remainder == b.remainder);
}

TEST_CASE("config validation") {
  RansacConfig cfg;
  cfg.distance_threshold = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.min_area = 5;
  cfg.max_area = 4;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
