#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "uavscan/error.hpp"
#include "uavscan/geometry.hpp"

using namespace uavscan;
using std::numbers::pi;

namespace {

bool near(const Point3& a, const Point3& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-pi, pi), pos(-20, 20);
  Pose p;
  p.rotation = rotation_rpy(ang(rng), ang(rng) / 2, ang(rng));
  p.translation = {pos(rng), pos(rng), pos(rng)};
  return p;
}

}  // namespace

TEST_CASE("polar_to_local examples") {
  CHECK(near(polar_to_local({1.0, 0.0}), {-1, 0, 0}, 1e-15));
  CHECK(near(polar_to_local({2.0, pi / 2}), {0, 0, -2}, 1e-15));
  CHECK(near(polar_to_local({std::sqrt(2.0), pi / 4}), {-1, 0, -1}, 1e-15));
}

TEST_CASE("polar_to_local keeps y at zero and preserves range") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0, 30), a(-0.75 * pi, 0.75 * pi);
  for (int i = 0; i < 1000; ++i) {
    const PolarPoint p{r(rng), a(rng)};
    const Point3 q = polar_to_local(p);
    CHECK(q.y() == 0.0);
    CHECK(q.norm() == doctest::Approx(p.range).epsilon(1e-12));
  }
}

TEST_CASE("transform_point examples") {
  Pose id;
  CHECK(near(transform_point(id, {1, 2, 3}), {1, 2, 3}, 0));
  Pose yaw;
  yaw.rotation = rotation_about_z(pi / 2);
  CHECK(near(transform_point(yaw, {1, 0, 0}), {0, 1, 0}, 1e-15));
  Pose shift;
  shift.translation = {1, 1, 1};
  CHECK(near(transform_point(shift, {-1, 0, -1}), {0, 1, 0}, 0));
}

TEST_CASE("rigid motion preserves distances and inverts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-50, 50);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose pose = random_pose(rng);
    REQUIRE(is_valid(pose));
    PointCloud cloud;
    for (int i = 0; i < 40; ++i) cloud.push_back({c(rng), c(rng), c(rng)}, i);
    const PointCloud moved = transform_cloud(pose, cloud);
    REQUIRE(moved.tags == cloud.tags);
    for (int i = 1; i < 40; ++i) {
      CHECK(std::abs((moved.points[i] - moved.points[i - 1]).norm() - (cloud.points[i] - cloud.points[i - 1]).norm()) <=
            1e-9);
    }
    const PointCloud back = transform_cloud(pose.inverse(), moved);
    for (int i = 0; i < 40; ++i) CHECK(near(back.points[i], cloud.points[i], 1e-9));
    const PointCloud same = transform_cloud(pose.compose(pose.inverse()), cloud);
    for (int i = 0; i < 40; ++i) CHECK(near(same.points[i], cloud.points[i], 1e-9));
  }
}

TEST_CASE("transform_cloud identity and translation") {
  PointCloud c;
  c.push_back({0, 0, 0});
  c.push_back({1.5, -2, 3});
  CHECK(transform_cloud(Pose::identity(), c).points == c.points);
  Pose t;
  t.translation = {1, 0, 0};
  PointCloud single;
  single.push_back({0, 0, 0});
  CHECK(near(transform_cloud(t, single).points[0], {1, 0, 0}, 0));
}

TEST_CASE("rotation validity") {
  CHECK(is_rotation(rotation_rpy(0.3, -0.2, 1.0)));
  Rotation reflect = Rotation::Identity();
  reflect(2, 2) = -1;
  CHECK_FALSE(is_rotation(reflect));
  Rotation scaled = Rotation::Identity() * 1.001;
  CHECK_FALSE(is_rotation(scaled));
}

TEST_CASE("cloud validation") {
  PointCloud c;
  c.push_back({0, 0, 0});
  CHECK_NOTHROW(validate(c));
  c.points.push_back({std::nan(""), 0, 0});
  CHECK_THROWS_AS(validate(c), Error);
  PointCloud partial;
  partial.push_back({0, 0, 0}, 1);
  partial.points.push_back({1, 1, 1});
  CHECK_THROWS_AS(validate(partial), Error);
}

TEST_CASE("subset keeps tags") {
  PointCloud c;
  for (int i = 0; i < 5; ++i) c.push_back({double(i), 0, 0}, 10 + i);
  const PointCloud s = c.subset({1, 3});
  REQUIRE(s.size() == 2);
  CHECK(s.tags == std::vector<std::int32_t>{11, 13});
  CHECK(s.points[1].x() == 3.0);
}
