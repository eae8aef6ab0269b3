#include "uavscan/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "uavscan/error.hpp"
#include "uavscan/text_format.hpp"

namespace uavscan {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

[[noreturn]] void bad_json(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

void check_version(const json& doc, const char* kind) {
  if (!doc.is_object()) bad_json(std::string(kind) + ": expected a JSON object");
  if (doc.contains("version") && doc["version"].get<int>() > kSchemaVersion) {
    bad_json(std::string(kind) + ": unsupported schema version");
  }
}

}  // namespace

void write_cloud(std::ostream& out, const PointCloud& cloud, std::string_view comment) {
  validate(cloud);
  out << cloud.size() << '\n' << "# " << comment << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    if (cloud.has_tags()) out << ' ' << cloud.tags[i];
    out << '\n';
  }
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, std::string_view comment) {
  auto out = open_out(path);
  write_cloud(out, cloud, comment);
}

PointCloud read_cloud(std::istream& in) {
  std::string line;
  auto malformed = [](std::size_t line_no, const std::string& why) {
    return Error(ErrorKind::MalformedRecord, "cloud line " + std::to_string(line_no) + ": " + why, line_no);
  };
  if (!std::getline(in, line)) throw malformed(1, "missing point count");
  std::size_t count = 0;
  try {
    std::size_t used = 0;
    count = std::stoul(line, &used);
    if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw malformed(1, "bad point count");
  } catch (const std::logic_error&) {
    throw malformed(1, "bad point count");
  }
  if (!std::getline(in, line)) throw malformed(2, "missing comment line");

  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t line_no = i + 3;
    if (!std::getline(in, line)) throw malformed(line_no, "expected " + std::to_string(count) + " points");
    std::istringstream fields(line);
    std::string tok[5];
    std::size_t n = 0;
    while (n < 5 && fields >> tok[n]) ++n;
    if (n != 3 && n != 4) throw malformed(line_no, "expected 'x y z [tag]'");
    Point3 p;
    for (int a = 0; a < 3; ++a) {
      const auto v = parse_double(tok[a]);
      if (!v || !std::isfinite(*v)) throw malformed(line_no, "bad coordinate");
      p[a] = *v;
    }
    if ((n == 4) != (i == 0 ? n == 4 : cloud.has_tags())) throw malformed(line_no, "tag column must cover every point");
    if (n == 4) {
      try {
        cloud.push_back(p, static_cast<std::int32_t>(std::stol(tok[3])));
      } catch (const std::logic_error&) {
        throw malformed(line_no, "bad tag");
      }
    } else {
      cloud.push_back(p);
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw malformed(count + 3, "trailing data");
  }
  return cloud;
}

PointCloud read_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_cloud(in);
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : cloud.points) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  }
}

void write_waypoints_csv(std::ostream& out, const std::vector<Point3>& waypoints) {
  for (const auto& p : waypoints) {
    out << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
  }
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(1) << '\n';
}

json to_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

Point3 point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) bad_json("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const Pose& pose) {
  json rot = json::array();
  for (int k = 0; k < 9; ++k) rot.push_back(pose.rotation(k / 3, k % 3));
  return {{"rotation", rot}, {"translation", to_json(Point3(pose.translation))}};
}

Pose pose_from_json(const json& j) {
  Pose pose;
  if (j.contains("rotation")) {
    const json& r = j["rotation"];
    if (!r.is_array() || r.size() != 9) bad_json("pose rotation must have 9 row-major entries");
    for (int k = 0; k < 9; ++k) pose.rotation(k / 3, k % 3) = r[static_cast<std::size_t>(k)].get<double>();
  } else if (j.contains("yaw")) {
    pose.rotation = rotation_about_z(j["yaw"].get<double>());
  }
  if (j.contains("translation")) pose.translation = point_from_json(j["translation"]);
  if (!is_valid(pose)) bad_json("pose rotation is not orthonormal");
  return pose;
}

json surfaces_to_json(const std::vector<PlanarSurface>& surfaces) {
  json planes = json::array();
  for (const auto& s : surfaces) {
    json boundary = json::array();
    for (const auto& p : s.boundary) boundary.push_back(to_json(p));
    planes.push_back({{"normal", to_json(Point3(s.model.normal))},
                      {"d", s.model.d},
                      {"boundary", boundary},
                      {"area", s.area},
                      {"inlier_count", s.inlier_count}});
  }
  return {{"version", kSchemaVersion}, {"planes", planes}};
}

std::vector<PlanarSurface> surfaces_from_json(const json& doc) {
  check_version(doc, "surfaces");
  std::vector<PlanarSurface> out;
  try {
    for (const auto& p : doc.at("planes")) {
      PlanarSurface s;
      s.model.normal = point_from_json(p.at("normal"));
      s.model.d = p.at("d").get<double>();
      if (std::abs(s.model.normal.norm() - 1.0) > 1e-9) bad_json("plane normal is not unit length");
      for (const auto& v : p.at("boundary")) s.boundary.push_back(point_from_json(v));
      s.area = p.at("area").get<double>();
      s.inlier_count = p.value("inlier_count", std::size_t{0});
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    bad_json(std::string("surfaces: ") + e.what());
  }
  return out;
}

json clustering_to_json(const Clustering& clustering, const PointCloud& cloud) {
  json clusters = json::array();
  for (const auto& c : clustering.clusters) {
    Aabb box;
    for (std::size_t i : c.indices) box.extend(cloud.points.at(i));
    clusters.push_back({{"size", c.indices.size()},
                        {"indices", c.indices},
                        {"bbox", {{"min", to_json(box.min)}, {"max", to_json(box.max)}}}});
  }
  return {{"version", kSchemaVersion}, {"clusters", clusters}, {"noise", clustering.noise}};
}

json flight_plan_to_json(const FlightPlan& plan) {
  json stops = json::array();
  for (const auto& s : plan.stops) {
    stops.push_back({{"position", to_json(s.position)},
                     {"facing", to_json(Point3(s.facing))},
                     {"row", s.row},
                     {"col", s.col}});
  }
  json waypoints = json::array();
  for (const auto& w : plan.waypoints) waypoints.push_back(to_json(w));
  json legs = json::array();
  for (const auto& l : plan.legs) {
    legs.push_back({{"from_stop", l.from_stop},
                    {"to_stop", l.to_stop},
                    {"first_waypoint", l.first_waypoint},
                    {"last_waypoint", l.last_waypoint},
                    {"cost", l.cost}});
  }
  return {{"stops", stops},
          {"stop_waypoint", plan.stop_waypoint},
          {"waypoints", waypoints},
          {"legs", legs},
          {"total_cost", plan.total_cost}};
}

json pose_track_to_json(const std::vector<StampedPose>& poses) {
  json arr = json::array();
  for (const auto& p : poses) {
    json entry = to_json(p.pose);
    entry["t"] = p.timestamp;
    arr.push_back(entry);
  }
  return arr;
}

namespace {

json vec_json(const Eigen::Vector3d& v) { return to_json(Point3(v)); }

struct PrimitiveToJson {
  json operator()(const PointPrimitive& p) const { return {{"type", "point"}, {"position", vec_json(p.position)}}; }
  json operator()(const SegmentPrimitive& p) const {
    return {{"type", "segment"}, {"start", vec_json(p.start)}, {"end", vec_json(p.end)}};
  }
  json operator()(const RectanglePrimitive& p) const {
    return {{"type", "rectangle"}, {"center", vec_json(p.center)}, {"u_axis", vec_json(p.u_axis)},
            {"v_axis", vec_json(p.v_axis)}, {"width", p.width}, {"height", p.height}};
  }
  json operator()(const BoxPrimitive& p) const {
    return {{"type", "box"}, {"center", vec_json(p.center)}, {"size", vec_json(p.size)}, {"yaw", p.yaw}};
  }
  json operator()(const CrossedCubePrimitive& p) const {
    return {{"type", "crossed_cube"}, {"center", vec_json(p.center)}, {"edge", p.edge}, {"plane_size", p.plane_size}};
  }
};

}  // namespace

json scene_to_json(const SceneSpec& scene) {
  json prims = json::array();
  for (const auto& p : scene.primitives) prims.push_back(std::visit(PrimitiveToJson{}, p));
  return {{"version", kSchemaVersion},
          {"density", scene.density},
          {"noise_sigma", scene.noise_sigma},
          {"sampling", scene.sampling == Sampling::Lattice ? "lattice" : "random"},
          {"primitives", prims}};
}

SceneSpec scene_from_json(const json& doc) {
  check_version(doc, "scene");
  SceneSpec s;
  try {
    s.density = doc.value("density", s.density);
    s.noise_sigma = doc.value("noise_sigma", s.noise_sigma);
    const std::string sampling = doc.value("sampling", std::string("random"));
    if (sampling != "random" && sampling != "lattice") bad_json("scene sampling must be 'random' or 'lattice'");
    s.sampling = sampling == "lattice" ? Sampling::Lattice : Sampling::Random;
    for (const auto& p : doc.at("primitives")) {
      const std::string type = p.at("type").get<std::string>();
      if (type == "point") {
        s.primitives.push_back(PointPrimitive{point_from_json(p.at("position"))});
      } else if (type == "segment") {
        s.primitives.push_back(SegmentPrimitive{point_from_json(p.at("start")), point_from_json(p.at("end"))});
      } else if (type == "rectangle") {
        s.primitives.push_back(RectanglePrimitive{point_from_json(p.at("center")), point_from_json(p.at("u_axis")),
                                                  point_from_json(p.at("v_axis")), p.at("width").get<double>(),
                                                  p.at("height").get<double>()});
      } else if (type == "box") {
        s.primitives.push_back(
            BoxPrimitive{point_from_json(p.at("center")), point_from_json(p.at("size")), p.value("yaw", 0.0)});
      } else if (type == "crossed_cube") {
        s.primitives.push_back(CrossedCubePrimitive{point_from_json(p.at("center")), p.at("edge").get<double>(),
                                                    p.at("plane_size").get<double>()});
      } else {
        bad_json("unknown primitive type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    bad_json(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace uavscan
