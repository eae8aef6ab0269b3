// Acceptance checks. Prints one PASS/FAIL line per criterion; pass criterion
// numbers as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tempdir.hpp"
#include "uavscan/clustering.hpp"
#include "uavscan/error.hpp"
#include "uavscan/icp.hpp"
#include "uavscan/kdtree.hpp"
#include "uavscan/pipeline.hpp"
#include "uavscan/planning.hpp"
#include "uavscan/polygon.hpp"
#include "uavscan/preprocess.hpp"
#include "uavscan/scene.hpp"
#include "uavscan/segmentation.hpp"

using namespace uavscan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Hypothesis scenes.
Outcome hypothesis_matrix() {
  const auto t0 = Clock::now();
  struct Expect {
    const char* scene;
    int surfaces;  // -1: at least one
    bool plans_ok;
  };
  const Expect table[] = {{"single_point", 0, true},
                          {"single_line", 0, true},
                          {"single_surface", 1, true},
                          {"cube", 6, true},
                          {"crossed_cube", -1, false}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& e : table) {
    testutil::TempDir dir;
    const PipelineResult r = run_pipeline(generate_scene(*builtin_scene(e.scene), 1), PipelineConfig{}, dir.path());
    bool row = false;
    const auto n = static_cast<int>(r.surfaces.size());
    if (e.plans_ok) {
      const bool plans = std::all_of(r.plans.begin(), r.plans.end(), [](const SurfacePlan& p) {
        return p.ok() && !p.plan.stops.empty();
      });
      row = r.exit_code == ExitCode::Success && n == e.surfaces && plans && r.plans.size() == r.surfaces.size();
    } else {
      const bool blocked = !r.plans.empty() && std::all_of(r.plans.begin(), r.plans.end(), [](const SurfacePlan& p) {
        return p.error == ErrorKind::StopPointBlocked;
      });
      row = n > 0 && blocked && r.exit_code == ExitCode::StageFailure && r.failed_stage == "plan";
    }
    std::size_t ok_plans = 0;
    for (const auto& p : r.plans) ok_plans += p.ok();
    detail << e.scene << "=" << n << " surfaces/" << ok_plans << " plans ok" << (row ? "" : "(!)") << "; ";
    ok = ok && row;
  }
  const double secs = seconds_since(t0);
  detail << fmt("%.2f s", secs);
  return {ok && secs < 30.0, detail.str()};
}

// 2. Coverage count and leg costs against Dijkstra on a 0.5 m grid.
Outcome coverage_count() {
  const SceneSpec scene = *builtin_scene("large_surface");  // 22 x 10 m in the x-z plane
  const PointCloud cloud = generate_scene(scene, 1);
  PlanarSurface surface;
  surface.model = canonicalize({{0, 1, 0}, 0.0});
  const PlaneBasis basis = plane_basis(surface.model);
  std::vector<Point2> flat;
  for (const Point3& p : std::vector<Point3>{{-11, 0, 0}, {11, 0, 0}, {11, 0, 10}, {-11, 0, 10}}) {
    flat.push_back(basis.project(p));
  }
  if (signed_area(flat) < 0) std::reverse(flat.begin(), flat.end());
  for (const auto& q : flat) surface.boundary.push_back(basis.lift(q));
  surface.area = surface_area(surface);

  PipelineConfig cfg;
  cfg.planning.voxel_edge = 0.5;
  const PlanningResult planned = plan_surfaces({surface}, cloud, cfg);
  const SurfacePlan& sp = planned.plans.front();
  if (!sp.ok()) return {false, "planning failed: " + sp.message};
  const FlightPlan& plan = sp.plan;
  const OccupancyGrid& grid = planned.inflated;
  const std::size_t n = plan.stops.size();
  const bool count_ok = n >= 1123 && n <= 1169;

  std::size_t violations = 0;
  if (plan.stop_waypoint.size() != n || plan.legs.size() + 1 != n) ++violations;
  if (plan.waypoints.size() != plan.waypoint_voxels.size()) ++violations;
  for (std::size_t i = 0; i < plan.waypoint_voxels.size(); ++i) {
    const Voxel& v = plan.waypoint_voxels[i];
    if (!grid.in_bounds(v) || grid.occupied(v) || plan.waypoints[i] != grid.center(v)) ++violations;
    if (i > 0) {
      const Voxel& u = plan.waypoint_voxels[i - 1];
      if (std::max({std::abs(u.x - v.x), std::abs(u.y - v.y), std::abs(u.z - v.z)}) != 1) ++violations;
    }
  }
  for (std::size_t k = 0; k < n && violations == 0; ++k) {
    if (grid.voxel_of(plan.stops[k].position) != plan.waypoint_voxels[plan.stop_waypoint[k]]) ++violations;
  }
  std::size_t mismatches = 0;
  double total = 0.0;
  for (const PlanLeg& leg : plan.legs) {
    const double expect = oracle::dijkstra_cost(grid, plan.waypoint_voxels[leg.first_waypoint],
                                                plan.waypoint_voxels[leg.last_waypoint], cfg.planning.weights);
    if (std::abs(expect - leg.cost) > 1e-9 * std::max(1.0, expect)) ++mismatches;
    total += leg.cost;
  }
  if (std::abs(total - plan.total_cost) > 1e-6) ++violations;
  return {count_ok && violations == 0 && mismatches == 0,
          fmt("stops=%zu (target 1123..1169), waypoints=%zu, legs=%zu, invariant violations=%zu, Dijkstra "
              "mismatches=%zu",
              n, plan.waypoints.size(), plan.legs.size(), violations, mismatches)};
}

// 3. Four-station closure on the bridge scene.
struct ClosureRun {
  double closure = 0.0;  // RMS displacement of the last station's points, meters
  double seconds = 0.0;
};

ClosureRun bridge_closure(double pose_noise) {
  const auto t0 = Clock::now();
  const SceneSpec scene = *builtin_scene("bridge");
  const std::vector<Point3> positions{{-12, -9, 1.5}, {12, -9, 1.5}, {12, 9, 1.5}, {-12, 9, 1.5}};
  const std::vector<double> yaws{0.2, 1.4, 2.9, -1.9};
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Station> stations;
  std::vector<Pose> truth;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Pose p;
    p.rotation = rotation_about_z(yaws[i]);
    p.translation = positions[i];
    truth.push_back(p);
    // Each station sees its own sample of the scene within 22 m.
    const PointCloud world = generate_scene(scene, 100 + i);
    Station st;
    const Pose inv = p.inverse();
    for (const auto& q : world.points) {
      if ((q - positions[i]).norm() <= 22.0) st.cloud.push_back(inv.apply(q));
    }
    st.recorded_pose = p;
    if (i > 0 && pose_noise > 0.0) {
      Eigen::Vector3d dir(normal(rng), normal(rng), normal(rng));
      st.recorded_pose.translation += pose_noise * dir.normalized();
    }
    stations.push_back(std::move(st));
  }
  RegistrationConfig cfg;
  cfg.icp.max_iterations = 100;
  cfg.icp.convergence_eps = 1e-7;
  cfg.icp.max_correspondence_dist = 0.5;
  const Registration reg = register_clouds(stations, cfg);
  // First-versus-last closure: where station 0 places the last station's
  // points, estimated against truth.
  const Pose est_rel = reg.poses.front().inverse().compose(reg.poses.back());
  const Pose true_rel = truth.front().inverse().compose(truth.back());
  double sq = 0.0;
  const PointCloud& last = stations.back().cloud;
  for (const auto& q : last.points) sq += (est_rel.apply(q) - true_rel.apply(q)).squaredNorm();
  return {std::sqrt(sq / static_cast<double>(last.size())), seconds_since(t0)};
}

Outcome registration_closure() {
  const ClosureRun noisy = bridge_closure(0.05);
  const ClosureRun clean = bridge_closure(0.0);
  const bool ok = noisy.closure <= 0.10 && clean.closure <= 0.001 && noisy.seconds < 60 && clean.seconds < 60;
  return {ok, fmt("5 cm noise: closure %.4f m (%.1f s); noiseless: closure %.6f m (%.1f s)", noisy.closure,
                  noisy.seconds, clean.closure, clean.seconds)};
}

// 4. RANSAC fidelity.
Outcome ransac_fidelity() {
  int good = 0;
  double worst_angle = 0, worst_offset = 0;
  for (int run = 0; run < 100; ++run) {
    std::mt19937_64 rng(7000 + run);
    std::uniform_real_distribution<double> u(-5.0, 5.0), small(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Vector3d n = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
    const Point3 p0(small(rng), small(rng), small(rng));
    const PlaneModel truth = canonicalize({n, -n.dot(p0)});
    const PlaneBasis b = plane_basis(truth);
    std::vector<Point3> pts;
    while (pts.size() < 700) {
      const Point3 q = b.lift(b.project(p0) + Point2(u(rng), u(rng))) + 0.01 * normal(rng) * truth.normal;
      if (q.cwiseAbs().maxCoeff() <= 5.0) pts.push_back(q);
    }
    for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng), u(rng)});
    std::shuffle(pts.begin(), pts.end(), rng);
    RansacConfig cfg;
    cfg.distance_threshold = 0.20;
    cfg.iterations = 200;
    cfg.rng_seed = static_cast<std::uint64_t>(run) + 1;
    const PlaneModel m = ransac_plane(pts, cfg).model;
    double cosang = std::abs(m.normal.dot(truth.normal));
    const double angle = std::acos(std::min(1.0, cosang)) * 180.0 / std::numbers::pi;
    const double offset = std::abs(m.normal.dot(truth.normal) > 0 ? m.d - truth.d : m.d + truth.d);
    worst_angle = std::max(worst_angle, angle);
    worst_offset = std::max(worst_offset, offset);
    good += angle <= 1.0 && offset <= 0.05;
  }
  return {good >= 95, fmt("%d/100 runs within 1 deg and 5 cm (worst %.3f deg, %.4f m)", good, worst_angle,
                          worst_offset)};
}

// 5. Oracle equivalences.
Outcome oracle_equivalences() {
  std::size_t kd_bad = 0, cluster_bad = 0, hull_bad = 0, astar_bad = 0, astar_queries = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Eigen::Vector3d> pts(1000);
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    const KdTree<3> tree(pts);
    for (int q = 0; q < 200; ++q) {
      const Eigen::Vector3d query(u(rng) * 1.2 - 1, u(rng) * 1.2 - 1, u(rng) * 1.2 - 1);
      const auto hit = tree.nearest(query);
      kd_bad += !hit || hit->index != oracle::nearest_linear(pts, query);
    }
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Eigen::Vector3d> pts(500);
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    const double eps = 0.8 + 0.4 * static_cast<double>(seed % 5) / 4.0;
    const Clustering c = euclidean_cluster(pts, {eps, 1});
    const auto expect = oracle::eps_components(pts, eps);
    bool same = c.clusters.size() == expect.size() && c.noise.empty();
    for (std::size_t i = 0; same && i < expect.size(); ++i) same = c.clusters[i].indices == expect[i];
    cluster_bad += !same;
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(2000 + seed);
    std::vector<Point2> pts(1000);
    if (seed % 2 == 0) {
      std::normal_distribution<double> g(0.0, 3.0);
      for (auto& p : pts) p = {g(rng), g(rng)};
    } else {
      // Small integer lattice: many duplicates and collinear hull points.
      std::uniform_int_distribution<int> g(0, 30);
      for (auto& p : pts) p = {g(rng), g(rng)};
    }
    auto hull = convex_hull_2d(pts);
    auto expect = oracle::brute_hull_vertices(pts);
    auto lex = [](const Point2& a, const Point2& b) { return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y(); };
    std::sort(hull.begin(), hull.end(), lex);
    std::sort(expect.begin(), expect.end(), lex);
    hull_bad += hull != expect;
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(3000 + seed);
    OccupancyGrid g(Point3::Zero(), 1.0, {20, 20, 20});
    std::bernoulli_distribution occ(0.2);
    for (std::size_t i = 0; i < g.voxel_count(); ++i) {
      if (occ(rng)) g.set_occupied(g.from_linear(i));
    }
    std::uniform_int_distribution<int> c(0, 19);
    for (int q = 0; q < 4; ++q) {
      const Voxel s{c(rng), c(rng), c(rng)}, t{c(rng), c(rng), c(rng)};
      if (g.occupied(s) || g.occupied(t)) continue;
      ++astar_queries;
      const double expect = oracle::dijkstra_cost(g, s, t, {});
      try {
        astar_bad += std::abs(astar(g, s, t, {}).cost - expect) > 1e-12;
      } catch (const Error& e) {
        astar_bad += !(e.kind() == ErrorKind::NoPath && std::isinf(expect));
      }
    }
  }
  return {kd_bad + cluster_bad + hull_bad + astar_bad == 0,
          fmt("kd-tree mismatches %zu/20000 queries, clustering %zu/100, hull %zu/100, A* %zu/%zu queries", kd_bad,
              cluster_bad, hull_bad, astar_bad, astar_queries)};
}

// 6. Filter properties.
Outcome filter_properties() {
  PointCloud c;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) c.push_back({i * 0.1, j * 0.1, k * 0.1});
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Point3 center(0.45, 0.45, 0.45);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d dir = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
    // 5 m beyond the grid's bounding sphere.
    c.push_back(center + (5.0 + std::sqrt(3.0) * 0.45) * dir);
  }
  const OutlierFilterResult r = remove_statistical_outliers(c, {50, 1.0});
  std::size_t grid_kept = 0, outliers_kept = 0;
  for (std::size_t i : r.kept_indices) (i < 1000 ? grid_kept : outliers_kept) += 1;

  PointCloud lattice;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) lattice.push_back({double(i), double(j), double(k)});
  const std::size_t voxels = voxel_downsample(lattice, {2.0}).size();
  return {grid_kept >= 990 && outliers_kept == 0 && voxels == 125,
          fmt("grid retained %zu/1000, outliers removed %zu/10, 10^3 lattice at leaf 2 -> %zu points", grid_kept,
              10 - outliers_kept, voxels)};
}

// 7. Determinism of `run`.
Outcome determinism() {
  testutil::TempDir dir;
  write_cloud(dir / "bridge.xyz", generate_scene(*builtin_scene("cube"), 5));
  write_cloud(dir / "crossed.xyz", generate_scene(*builtin_scene("crossed_cube"), 5));
  std::size_t files = 0, differing = 0;
  for (const char* input : {"bridge.xyz", "crossed.xyz"}) {
    const auto a = dir / (std::string(input) + ".a");
    const auto b = dir / (std::string(input) + ".b");
    run_pipeline(dir / input, PipelineConfig{}, a);
    run_pipeline(dir / input, PipelineConfig{}, b);
    for (const auto& e : fs::directory_iterator(a)) {
      const std::string name = e.path().filename().string();
      if (name == "timing.json") continue;  // wall-clock times
      ++files;
      differing += testutil::slurp(e.path()) != testutil::slurp(b / name);
    }
  }
  return {files > 0 && differing == 0, fmt("%zu artifact files compared, %zu differ", files, differing)};
}

// 8. Desk-scale end-to-end runtime.
Outcome runtime() {
  testutil::TempDir dir;
  const PointCloud cloud = generate_scene(*builtin_scene("bridge"), 8);
  write_cloud(dir / "bridge.xyz", cloud);
  const auto t0 = Clock::now();
  const PipelineResult r = run_pipeline(dir / "bridge.xyz", PipelineConfig{}, dir / "out");
  const double secs = seconds_since(t0);
  std::ostringstream stages;
  for (const auto& t : r.timings) stages << t.stage << " " << fmt("%.2f", t.seconds) << "s, ";
  std::size_t ok_plans = 0;
  for (const auto& p : r.plans) ok_plans += p.ok();
  const bool timed = fs::exists(dir / "out" / "timing.json") && !r.timings.empty();
  return {r.exit_code == ExitCode::Success && secs < 180.0 && timed && cloud.size() >= 50000,
          fmt("%zu points, %zu surfaces, %zu plans ok, total %.1f s [", cloud.size(), r.surfaces.size(), ok_plans,
              secs) +
              stages.str() + "]"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"hypothesis-scene matrix", hypothesis_matrix},
      {"coverage count and leg costs", coverage_count},
      {"registration closure", registration_closure},
      {"RANSAC fidelity", ransac_fidelity},
      {"oracle equivalences", oracle_equivalences},
      {"filter properties", filter_properties},
      {"run determinism", determinism},
      {"end-to-end runtime", runtime}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
