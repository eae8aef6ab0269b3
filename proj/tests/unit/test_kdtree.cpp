#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "uavscan/kdtree.hpp"

using namespace uavscan;

TEST_CASE("nearest equals linear scan, 3D") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-10, 10);
    std::vector<Point3> pts(1000);
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    const KdTree3 tree(pts);
    for (int q = 0; q < 200; ++q) {
      const Point3 query{u(rng), u(rng), u(rng)};
      CHECK(tree.nearest(query)->index == oracle::nearest_linear(pts, query));
    }
  }
}

TEST_CASE("ties resolve to the lowest index") {
  // Integer lattice with duplicates: many equidistant candidates.
  std::vector<Point2> pts;
  for (int rep = 0; rep < 3; ++rep)
    for (int x = 0; x < 10; ++x)
      for (int y = 0; y < 10; ++y) pts.push_back({double(x), double(y)});
  const KdTree2 tree(pts, 4);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> h(0, 18);
  for (int q = 0; q < 500; ++q) {
    const Point2 query{h(rng) * 0.5, h(rng) * 0.5};
    CHECK(tree.nearest(query)->index == oracle::nearest_linear(pts, query));
  }
}

TEST_CASE("k_nearest matches sorted brute force, honoring exclude") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point3> pts(300);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  const KdTree3 tree(pts);
  for (std::size_t q = 0; q < pts.size(); q += 7) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != q) all.push_back({(pts[i] - pts[q]).squaredNorm(), i});
    std::sort(all.begin(), all.end());
    const auto got = tree.k_nearest(pts[q], 10, q);
    REQUIRE(got.size() == 10);
    for (std::size_t k = 0; k < 10; ++k) CHECK(got[k].index == all[k].second);
  }
  CHECK(tree.k_nearest(pts[0], 1000).size() == pts.size());
}

TEST_CASE("radius search is a closed ball") {
  std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {1.0000001, 0, 0}};
  const KdTree3 tree(pts);
  CHECK(tree.radius_search({0, 0, 0}, 1.0) == std::vector<std::size_t>{0, 1});
  CHECK(tree.radius_search({0, 0, 0}, 2.0) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(tree.radius_search({5, 5, 5}, 1.0).empty());

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<Point3> cloud(800);
  for (auto& p : cloud) p = {u(rng), u(rng), u(rng)};
  const KdTree3 t2(cloud);
  for (int q = 0; q < 50; ++q) {
    const Point3 query{u(rng), u(rng), u(rng)};
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if ((cloud[i] - query).squaredNorm() <= 0.8 * 0.8) expect.push_back(i);
    CHECK(t2.radius_search(query, 0.8) == expect);
  }
}

TEST_CASE("empty tree") {
  const KdTree3 tree(std::vector<Point3>{});
  CHECK_FALSE(tree.nearest({0, 0, 0}).has_value());
  CHECK(tree.radius_search({0, 0, 0}, 1).empty());
}
