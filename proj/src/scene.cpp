#include "uavscan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "uavscan/error.hpp"

namespace uavscan {

namespace {

void add_box_faces(const BoxPrimitive& box, std::vector<RectanglePrimitive>& out) {
  const Rotation r = rotation_about_z(box.yaw);
  const Eigen::Vector3d ex = r.col(0);
  const Eigen::Vector3d ey = r.col(1);
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d h = 0.5 * box.size;
  for (double s : {1.0, -1.0}) {
    out.push_back({box.center + s * h.x() * ex, ey, ez, box.size.y(), box.size.z()});
    out.push_back({box.center + s * h.y() * ey, ex, ez, box.size.x(), box.size.z()});
    out.push_back({box.center + s * h.z() * ez, ex, ey, box.size.x(), box.size.y()});
  }
}

struct FaceVisitor {
  std::vector<RectanglePrimitive>& out;
  void operator()(const PointPrimitive&) const {}
  void operator()(const SegmentPrimitive&) const {}
  void operator()(const RectanglePrimitive& r) const { out.push_back(r); }
  void operator()(const BoxPrimitive& b) const { add_box_faces(b, out); }
  void operator()(const CrossedCubePrimitive& c) const {
    add_box_faces({c.center, Eigen::Vector3d::Constant(c.edge), 0.0}, out);
    out.push_back({c.center, Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ(), c.plane_size, c.plane_size});
    out.push_back({c.center, Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ(), c.plane_size, c.plane_size});
  }
};

std::vector<RectanglePrimitive> faces_of(const Primitive& prim) {
  std::vector<RectanglePrimitive> out;
  std::visit(FaceVisitor{out}, prim);
  return out;
}

// Evenly spaced offsets across [-extent/2, extent/2], centered.
std::vector<double> lattice_offsets(double extent, double spacing) {
  const auto n = static_cast<std::size_t>(std::floor(extent / spacing + 1e-9)) + 1;
  const double start = -0.5 * static_cast<double>(n - 1) * spacing;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * spacing;
  return out;
}

class Sampler {
 public:
  Sampler(const SceneSpec& spec, std::uint64_t seed, PointCloud& out, std::int32_t tag)
      : spec_(spec), rng_(seed), out_(out), tag_(tag) {}

  void point(const Point3& p) {
    Point3 q = p;
    if (spec_.noise_sigma > 0.0) {
      for (int a = 0; a < 3; ++a) q[a] += noise();
    }
    out_.push_back(q, tag_);
  }

  void segment(const Point3& a, const Point3& b) {
    const Eigen::Vector3d dir = b - a;
    const double length = dir.norm();
    const double linear_density = std::sqrt(spec_.density);
    // Fixed perpendicular for the noise direction.
    const Eigen::Vector3d unit = dir / length;
    Eigen::Vector3d perp = unit.cross(Eigen::Vector3d::UnitZ());
    if (perp.norm() < 1e-6) perp = unit.cross(Eigen::Vector3d::UnitX());
    perp.normalize();
    auto emit = [&](double s) { out_.push_back(a + (0.5 + s / length) * dir + noise() * perp, tag_); };
    if (spec_.sampling == Sampling::Lattice) {
      for (double s : lattice_offsets(length, 1.0 / linear_density)) emit(s);
    } else {
      std::uniform_real_distribution<double> along(-0.5 * length, 0.5 * length);
      const auto n = std::poisson_distribution<long>(length * linear_density)(rng_);
      for (long i = 0; i < n; ++i) emit(along(rng_));
    }
  }

  void rectangle(const RectanglePrimitive& r) {
    const Eigen::Vector3d normal = r.u_axis.cross(r.v_axis);
    auto emit = [&](double a, double b) {
      out_.push_back(r.center + a * r.u_axis + b * r.v_axis + noise() * normal, tag_);
    };
    if (spec_.sampling == Sampling::Lattice) {
      const double spacing = 1.0 / std::sqrt(spec_.density);
      const auto us = lattice_offsets(r.width, spacing);
      const auto vs = lattice_offsets(r.height, spacing);
      for (double a : us) {
        for (double b : vs) emit(a, b);
      }
    } else {
      std::uniform_real_distribution<double> du(-0.5 * r.width, 0.5 * r.width);
      std::uniform_real_distribution<double> dv(-0.5 * r.height, 0.5 * r.height);
      const auto n = std::poisson_distribution<long>(r.width * r.height * spec_.density)(rng_);
      for (long i = 0; i < n; ++i) {
        const double a = du(rng_);
        const double b = dv(rng_);
        emit(a, b);
      }
    }
  }

 private:
  double noise() {
    if (spec_.noise_sigma <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, spec_.noise_sigma)(rng_);
  }

  const SceneSpec& spec_;
  std::mt19937_64 rng_;
  PointCloud& out_;
  std::int32_t tag_;
};

double distance_to_rectangle(const RectanglePrimitive& r, const Point3& p) {
  const Eigen::Vector3d d = p - r.center;
  const double a = std::clamp(d.dot(r.u_axis), -0.5 * r.width, 0.5 * r.width);
  const double b = std::clamp(d.dot(r.v_axis), -0.5 * r.height, 0.5 * r.height);
  return (d - a * r.u_axis - b * r.v_axis).norm();
}

// Ray parameter of the hit, or infinity.
double intersect(const RectanglePrimitive& r, const Point3& origin, const Eigen::Vector3d& dir) {
  const Eigen::Vector3d n = r.u_axis.cross(r.v_axis);
  const double denom = n.dot(dir);
  if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
  const double t = n.dot(r.center - origin) / denom;
  if (!(t > 1e-9)) return std::numeric_limits<double>::infinity();
  const Eigen::Vector3d rel = origin + t * dir - r.center;
  if (std::abs(rel.dot(r.u_axis)) > 0.5 * r.width || std::abs(rel.dot(r.v_axis)) > 0.5 * r.height) {
    return std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace

void SceneSpec::validate() const {
  if (!(density > 0.0)) throw Error(ErrorKind::InvalidArgument, "scene density must be > 0");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const bool ok = std::visit(
        [](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, PointPrimitive>) {
            return p.position.allFinite();
          } else if constexpr (std::is_same_v<T, SegmentPrimitive>) {
            return (p.end - p.start).norm() > 0.0;
          } else if constexpr (std::is_same_v<T, RectanglePrimitive>) {
            return p.width > 0.0 && p.height > 0.0 && std::abs(p.u_axis.norm() - 1.0) < 1e-9 &&
                   std::abs(p.v_axis.norm() - 1.0) < 1e-9 && std::abs(p.u_axis.dot(p.v_axis)) < 1e-9;
          } else if constexpr (std::is_same_v<T, BoxPrimitive>) {
            return (p.size.array() > 0.0).all();
          } else {
            return p.edge > 0.0 && p.plane_size > 0.0;
          }
        },
        primitives[i]);
    if (!ok) throw Error(ErrorKind::InvalidArgument, "invalid scene primitive", i);
  }
}

std::vector<RectanglePrimitive> scene_faces(const SceneSpec& spec) {
  std::vector<RectanglePrimitive> out;
  for (const auto& p : spec.primitives) {
    auto f = faces_of(p);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

PointCloud generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  PointCloud cloud;
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    Sampler sampler(spec, seed + 0x9E3779B97F4A7C15ULL * (i + 1), cloud, static_cast<std::int32_t>(i));
    const Primitive& prim = spec.primitives[i];
    if (const auto* p = std::get_if<PointPrimitive>(&prim)) {
      sampler.point(p->position);
    } else if (const auto* s = std::get_if<SegmentPrimitive>(&prim)) {
      sampler.segment(s->start, s->end);
    } else {
      for (const auto& face : faces_of(prim)) sampler.rectangle(face);
    }
  }
  return cloud;
}

std::vector<std::string> builtin_scene_names() {
  return {"single_point", "single_line", "single_surface", "cube", "crossed_cube",
          "room",         "wall",        "bridge",         "large_surface"};
}

std::optional<SceneSpec> builtin_scene(const std::string& name) {
  SceneSpec s;
  s.density = 100.0;
  s.noise_sigma = 0.01;
  const Eigen::Vector3d ex = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ey = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  if (name == "single_point") {
    s.primitives.push_back(PointPrimitive{{0.0, 0.0, 1.0}});
  } else if (name == "single_line") {
    s.primitives.push_back(SegmentPrimitive{{0.0, 0.0, 1.0}, {10.0, 0.0, 1.0}});
  } else if (name == "single_surface") {
    s.primitives.push_back(RectanglePrimitive{{0.0, 0.0, 2.0}, ex, ez, 6.0, 4.0});
  } else if (name == "cube") {
    s.primitives.push_back(BoxPrimitive{{0.0, 0.0, 1.5}, Eigen::Vector3d::Constant(3.0), 0.0});
  } else if (name == "crossed_cube") {
    s.primitives.push_back(CrossedCubePrimitive{{0.0, 0.0, 1.5}, 3.0, 8.0});
  } else if (name == "room") {
    s.primitives.push_back(BoxPrimitive{{0.0, 0.0, 1.5}, {10.0, 7.0, 3.0}, 0.0});
    s.primitives.push_back(BoxPrimitive{{2.5, -1.5, 1.5}, {0.6, 0.6, 3.0}, 0.0});
  } else if (name == "wall") {
    s.primitives.push_back(RectanglePrimitive{{5.0, 0.0, 1.0}, ey, ez, 10.0, 6.0});
  } else if (name == "bridge") {
    s.primitives.push_back(BoxPrimitive{{0.0, 0.0, 4.25}, {22.0, 10.0, 0.5}, 0.0});  // deck
    s.primitives.push_back(BoxPrimitive{{-6.0, 0.0, 2.0}, {1.0, 6.0, 4.0}, 0.0});    // piers
    s.primitives.push_back(BoxPrimitive{{6.0, 0.0, 2.0}, {1.0, 6.0, 4.0}, 0.0});
    s.primitives.push_back(RectanglePrimitive{{0.0, 0.0, 0.0}, ex, ey, 34.0, 22.0});  // ground
    s.primitives.push_back(BoxPrimitive{{3.0, -8.0, 0.75}, {1.0, 1.0, 1.5}, 0.3});    // obstacles
    s.primitives.push_back(BoxPrimitive{{-10.0, 7.0, 0.5}, {2.0, 1.0, 1.0}, 0.0});
  } else if (name == "large_surface") {
    s.primitives.push_back(RectanglePrimitive{{0.0, 0.0, 5.0}, ex, ez, 22.0, 10.0});
  } else {
    return std::nullopt;
  }
  return s;
}

double distance_to_scene(const SceneSpec& spec, const Point3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : scene_faces(spec)) best = std::min(best, distance_to_rectangle(f, p));
  return best;
}

std::size_t DeviceParams::beams() const {
  return static_cast<std::size_t>(std::floor(-2.0 * meta.angle_min / meta.angle_inc + 1e-9)) + 1;
}

SimulatedLog simulate_yaw_scan(const SceneSpec& scene, const YawScanSpec& spec, std::uint64_t seed) {
  scene.validate();
  if (spec.scans < 1) throw Error(ErrorKind::InvalidArgument, "simulation needs at least one scan");
  if (!(spec.device.meta.angle_inc > 0.0) || !(spec.device.meta.range_max > 0.0) ||
      !(spec.device.scan_period > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid device parameters");
  }
  const auto faces = scene_faces(scene);
  const std::size_t beams = spec.device.beams();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  SimulatedLog out;
  out.station = spec.station;
  out.log.meta = spec.device.meta;

  auto cast = [&](const Point3& origin, const Eigen::Vector3d& dir) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& f : faces) t = std::min(t, intersect(f, origin, dir));
    if (!(t < spec.device.meta.range_max)) return spec.device.meta.range_max;
    if (spec.device.range_noise > 0.0) t = std::max(0.0, t + spec.device.range_noise * unit_normal(rng));
    return t;
  };

  for (int k = 0; k < spec.scans; ++k) {
    const double t = k * spec.device.scan_period;
    Pose body;
    body.rotation = rotation_about_z(spec.yaw_total * k / spec.scans);
    body.translation = static_cast<double>(k) * spec.drift_per_scan;
    const Pose world = spec.station.compose(body);
    out.truth.push_back({t, body});
    out.log.imu.push_back({t, body.rotation});

    std::vector<double> vertical(beams);
    std::vector<double> horizontal(beams);
    const Point3 v_origin = world.apply(spec.vertical_offset);
    const Point3 h_origin = world.apply(spec.horizontal_offset);
    for (std::size_t j = 0; j < beams; ++j) {
      const double a = spec.device.meta.bearing(j);
      const Eigen::Vector3d v_dir = world.rotation * Eigen::Vector3d(-std::cos(a), 0.0, -std::sin(a));
      const Eigen::Vector3d h_dir = world.rotation * Eigen::Vector3d(std::cos(a), std::sin(a), 0.0);
      vertical[j] = cast(v_origin, v_dir);
      horizontal[j] = cast(h_origin, h_dir);
    }
    out.log.horizontal.push_back(make_scan(t, ScanKind::Horizontal, std::move(horizontal), out.log.meta));
    out.log.vertical.push_back(make_scan(t, ScanKind::Vertical, std::move(vertical), out.log.meta));
  }
  return out;
}

}  // namespace uavscan
