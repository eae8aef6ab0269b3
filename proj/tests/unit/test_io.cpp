#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "uavscan/error.hpp"
#include "uavscan/io.hpp"
#include "uavscan/pipeline.hpp"
#include "uavscan/text_format.hpp"

using namespace uavscan;

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(parse_double(format_double(0.1)) == 0.1);
  CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK_FALSE(parse_double("nan").has_value());
}

TEST_CASE("cloud text round-trip is bit exact") {
  PointCloud c;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 10);
  for (int i = 0; i < 500; ++i) c.push_back({n(rng), n(rng), n(rng)}, i % 7);
  std::stringstream ss;
  write_cloud(ss, c);
  const PointCloud back = read_cloud(ss);
  CHECK(back.points == c.points);
  CHECK(back.tags == c.tags);

  PointCloud untagged;
  untagged.push_back({1, 2, 3});
  std::stringstream s2;
  write_cloud(s2, untagged);
  CHECK_FALSE(read_cloud(s2).has_tags());
}

TEST_CASE("malformed cloud files") {
  auto kind_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_cloud(in);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;  // sentinel: no error
  };
  CHECK(kind_of("") == ErrorKind::MalformedRecord);
  CHECK(kind_of("2\n#\n1 2 3\n") == ErrorKind::MalformedRecord);
  CHECK(kind_of("1\n#\n1 2\n") == ErrorKind::MalformedRecord);
  CHECK(kind_of("1\n#\n1 2 zz\n") == ErrorKind::MalformedRecord);
  CHECK(kind_of("x\n#\n") == ErrorKind::MalformedRecord);
  CHECK(kind_of("1\n#\n1 2 3\n") == ErrorKind::Io);
}

TEST_CASE("surfaces json round-trip") {
  PlanarSurface s;
  s.model = canonicalize({Eigen::Vector3d(1, 2, 3).normalized(), 0.7});
  const PlaneBasis b = plane_basis(s.model);
  s.boundary = {b.lift({0, 0}), b.lift({1, 0}), b.lift({0.3, 0.9})};
  s.area = surface_area(s);
  s.inlier_count = 42;
  const auto back = surfaces_from_json(json::parse(surfaces_to_json({s}).dump()));
  REQUIRE(back.size() == 1);
  CHECK(back[0].model.normal == s.model.normal);
  CHECK(back[0].model.d == s.model.d);
  CHECK(back[0].boundary == s.boundary);
  CHECK(back[0].area == s.area);
  CHECK(back[0].inlier_count == 42);
  json bad = surfaces_to_json({s});
  bad["version"] = 99;
  CHECK_THROWS_AS(surfaces_from_json(bad), Error);
}

TEST_CASE("pose json") {
  Pose p;
  p.rotation = rotation_rpy(0.1, -0.2, 0.3);
  p.translation = {1, -2, 3.5};
  const Pose back = pose_from_json(json::parse(to_json(p).dump()));
  CHECK(back.rotation == p.rotation);
  CHECK(back.translation == p.translation);
  const Pose yaw = pose_from_json(json::parse(R"({"yaw": 0.5, "translation": [1, 2, 3]})"));
  CHECK(yaw.rotation.isApprox(rotation_about_z(0.5)));
}

TEST_CASE("scene json round-trip") {
  for (const auto& name : builtin_scene_names()) {
    const SceneSpec s = *builtin_scene(name);
    const SceneSpec back = scene_from_json(json::parse(scene_to_json(s).dump()));
    CHECK(scene_to_json(back) == scene_to_json(s));
    CHECK(generate_scene(back, 3).points == generate_scene(s, 3).points);
  }
}

TEST_CASE("config json round-trip and strictness") {
  PipelineConfig cfg;
  cfg.ransac.distance_threshold = 0.07;
  cfg.planning.weights.a3 = 2.5;
  cfg.write_svg = false;
  const PipelineConfig back = config_from_json(json::parse(config_to_json(cfg).dump()));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(back.ransac.distance_threshold == 0.07);
  CHECK(back.planning.weights.a3 == 2.5);

  const PipelineConfig partial = config_from_json(json::parse(R"({"outlier": {"k_neighbors": 12}})"));
  CHECK(partial.outlier.k_neighbors == 12);
  CHECK(config_to_json(partial)["voxel"] == config_to_json(PipelineConfig{})["voxel"]);

  CHECK_THROWS_AS(config_from_json(json::parse(R"({"outlier": {"k": 12}})")), Error);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"bogus": 1})")), Error);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"voxel": {"leaf_size": -1}})")), Error);
}

TEST_CASE("waypoints csv") {
  std::ostringstream out;
  write_waypoints_csv(out, {{1, 2, 3}, {0.5, -1, 0}});
  CHECK(out.str() == "1,2,3\n0.5,-1,0\n");
}
