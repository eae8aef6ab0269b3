#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "uavscan/error.hpp"
#include "uavscan/preprocess.hpp"

using namespace uavscan;

namespace {

PointCloud lattice(int n, double spacing, Point3 offset = Point3::Zero()) {
  PointCloud c;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) c.push_back(offset + spacing * Point3(x, y, z));
  return c;
}

}  // namespace

TEST_CASE("planted outliers are removed, k=8") {
  PointCloud c = lattice(10, 0.1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(0, 2 * 3.141592653589793);
  const Point3 center(0.45, 0.45, 0.45);
  for (int i = 0; i < 10; ++i) {
    const double a = ang(rng), b = ang(rng);
    c.push_back(center + 5.0 * Point3(std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b)));
  }
  const OutlierFilterResult r = remove_statistical_outliers(c, {8, 1.0});
  std::size_t grid_kept = 0;
  for (std::size_t i : r.kept_indices) {
    CHECK(i < 1010);
    if (i < 1000) ++grid_kept;
  }
  for (std::size_t i = 1000; i < 1010; ++i) {
    CHECK(std::find(r.kept_indices.begin(), r.kept_indices.end(), i) == r.kept_indices.end());
  }
  CHECK(grid_kept >= 990);
  CHECK(r.removed_count + r.kept.size() == c.size());
}

TEST_CASE("equidistant points are all kept") {
  // k+1 points of a regular simplex-like ring: every mean distance is equal.
  PointCloud c;
  c.push_back({0, 0, 0});
  c.push_back({1, 0, 0});
  c.push_back({0.5, std::sqrt(3.0) / 2, 0});
  c.push_back({0.5, std::sqrt(3.0) / 6, std::sqrt(6.0) / 3});
  const OutlierFilterResult r = remove_statistical_outliers(c, {3, 1.0});
  CHECK(r.kept.size() == 4);
  CHECK(r.removed_count == 0);
}

TEST_CASE("too small clouds are rejected") {
  const PointCloud c = lattice(2, 1.0);  // 8 points
  CHECK_THROWS_AS(remove_statistical_outliers(c, {8, 1.0}), Error);
  try {
    remove_statistical_outliers(c, {8, 1.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CloudTooSmall);
  }
  CHECK_NOTHROW(remove_statistical_outliers(c, {7, 1.0}));
}

TEST_CASE("outlier filter is a subset and translation invariant") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  PointCloud c;
  // Coordinates on a 2^-20 grid, so the shift below is exact.
  auto q = [](double v) { return std::ldexp(std::round(std::ldexp(v, 20)), -20); };
  for (int i = 0; i < 600; ++i) c.push_back({q(n(rng)), q(n(rng)), q(0.2 * n(rng))}, i);
  const OutlierFilterResult a = remove_statistical_outliers(c, {20, 1.5});
  for (std::size_t k = 0; k < a.kept.size(); ++k) {
    CHECK(a.kept.points[k] == c.points[a.kept_indices[k]]);
    CHECK(a.kept.tags[k] == c.tags[a.kept_indices[k]]);
  }
  PointCloud moved = c;
  for (auto& p : moved.points) p += Point3(64, -128, 32);
  const OutlierFilterResult b = remove_statistical_outliers(moved, {20, 1.5});
  CHECK(a.kept_indices == b.kept_indices);
}

TEST_CASE("voxel centroid") {
  PointCloud c;
  c.push_back({0, 0, 0});
  c.push_back({0.05, 0, 0});
  const PointCloud v = voxel_downsample(c, {0.1});
  REQUIRE(v.size() == 1);
  CHECK(v.points[0].x() == doctest::Approx(0.025));
  CHECK(v.points[0].y() == 0.0);
}

TEST_CASE("sparse input is unchanged up to order") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 50);
  std::set<std::tuple<int, int, int>> cells;
  PointCloud c;
  while (c.size() < 200) {
    auto key = std::make_tuple(u(rng), u(rng), u(rng));
    if (cells.insert(key).second) c.push_back(Point3(std::get<0>(key), std::get<1>(key), std::get<2>(key)) * 1.0);
  }
  const PointCloud v = voxel_downsample(c, {0.5});
  REQUIRE(v.size() == c.size());
  std::multiset<std::tuple<double, double, double>> a, b;
  for (const auto& p : c.points) a.insert({p.x(), p.y(), p.z()});
  for (const auto& p : v.points) b.insert({p.x(), p.y(), p.z()});
  CHECK(a == b);
}

TEST_CASE("10^3 unit lattice at leaf 2 gives 125 voxels") {
  const PointCloud v = voxel_downsample(lattice(10, 1.0), {2.0});
  CHECK(v.size() == 125);
}

TEST_CASE("voxel output lies inside its voxel and is idempotent on aligned data") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 3);
  PointCloud c;
  for (int i = 0; i < 2000; ++i) c.push_back({u(rng), u(rng), u(rng)});
  const double leaf = 0.4;
  const PointCloud v = voxel_downsample(c, {leaf});
  CHECK(v.size() <= c.size());
  Point3 lo = c.points[0];
  for (const auto& p : c.points) lo = lo.cwiseMin(p);
  for (const auto& p : v.points) {
    for (int a = 0; a < 3; ++a) CHECK(p[a] >= lo[a] - 1e-12);
  }
  const PointCloud aligned = voxel_downsample(lattice(6, 1.0), {1.0});
  CHECK(voxel_downsample(aligned, {1.0}).points == aligned.points);
  CHECK(voxel_downsample(PointCloud{}, {1.0}).empty());
  CHECK_THROWS_AS(voxel_downsample(c, {0.0}), Error);
}
