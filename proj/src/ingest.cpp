#include "uavscan/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "uavscan/error.hpp"
#include "uavscan/text_format.hpp"

namespace uavscan {

std::size_t ScanLog::dropped_readings() const {
  std::size_t n = 0;
  for (const auto& s : vertical) n += s.dropped();
  for (const auto& s : horizontal) n += s.dropped();
  return n;
}

LaserScan make_scan(double timestamp, ScanKind kind, std::vector<double> ranges,
                    const ScanMetadata& meta) {
  LaserScan scan;
  scan.timestamp = timestamp;
  scan.kind = kind;
  scan.valid.resize(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const bool ok = ranges[i] > 0.0 && ranges[i] < meta.range_max;
    scan.valid[i] = ok;
    if (ok) scan.points.push_back({ranges[i], meta.bearing(i)});
  }
  scan.ranges = std::move(ranges);
  return scan;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class LogParser {
 public:
  explicit LogParser(const ParseOptions& options) : options_(options) {}

  void feed(std::string_view line) {
    ++line_no_;
    const auto tokens = split_ws(line);
    if (tokens.empty()) return;
    if (tokens[0].front() == '#') {
      header(tokens);
      return;
    }
    if (tokens[0] == "V" || tokens[0] == "H") {
      scan(tokens);
    } else if (tokens[0] == "I") {
      imu(tokens);
    } else if (tokens[0] == "A") {
      altitude(tokens);
    } else {
      fail("unknown record type '" + std::string(tokens[0]) + "'");
    }
  }

  ScanLog finish() {
    if (log_.vertical.empty() && log_.horizontal.empty()) {
      throw Error(ErrorKind::EmptyLog, "log contains no scans");
    }
    double first_scan = std::numeric_limits<double>::infinity();
    if (!log_.vertical.empty()) first_scan = log_.vertical.front().timestamp;
    if (!log_.horizontal.empty()) first_scan = std::min(first_scan, log_.horizontal.front().timestamp);
    if (log_.imu.empty() || log_.imu.front().timestamp > first_scan) {
      throw Error(ErrorKind::MalformedRecord, "no IMU sample at or before the first scan", first_scan_line_);
    }
    return std::move(log_);
  }

 private:
  [[noreturn]] void fail(const std::string& reason) const {
    throw Error(ErrorKind::MalformedRecord, "line " + std::to_string(line_no_) + ": " + reason, line_no_);
  }

  double number(std::string_view token) const {
    const auto v = parse_double(token);
    if (!v || !std::isfinite(*v)) fail("bad number '" + std::string(token) + "'");
    return *v;
  }

  void header(const std::vector<std::string_view>& tokens) {
    // "# key value" or "#key value"
    std::vector<std::string_view> rest(tokens.begin(), tokens.end());
    if (rest[0] == "#") {
      rest.erase(rest.begin());
    } else {
      rest[0].remove_prefix(1);
    }
    if (rest.size() != 2) return;  // free-form comment
    std::optional<double>* slot = nullptr;
    if (rest[0] == "angle_min") slot = &angle_min_;
    if (rest[0] == "angle_inc") slot = &angle_inc_;
    if (rest[0] == "range_max") slot = &range_max_;
    if (!slot) return;
    if (saw_scan_) fail("metadata header after the first scan record");
    *slot = number(rest[1]);
    if (slot == &angle_inc_ && !(*angle_inc_ > 0.0)) fail("angle_inc must be > 0");
    if (slot == &range_max_ && !(*range_max_ > 0.0)) fail("range_max must be > 0");
  }

  double timestamp(std::string_view token) const {
    const double t = number(token);
    if (t < 0.0) fail("negative timestamp");
    return t;
  }

  template <typename T>
  void check_order(const std::vector<T>& stream, double t) const {
    if (!stream.empty() && !(t > stream.back().timestamp)) {
      throw Error(ErrorKind::UnsortedTimestamps,
                  "line " + std::to_string(line_no_) + ": timestamp not increasing", line_no_);
    }
  }

  void scan(const std::vector<std::string_view>& tokens) {
    if (!angle_min_ || !angle_inc_ || !range_max_) {
      fail("scan record before angle_min/angle_inc/range_max headers");
    }
    if (!saw_scan_) {
      log_.meta = {*angle_min_, *angle_inc_, *range_max_};
      saw_scan_ = true;
      first_scan_line_ = line_no_;
    }
    if (tokens.size() < 3) fail("scan record needs a timestamp and at least one range");
    const double t = timestamp(tokens[1]);
    const std::size_t beams = tokens.size() - 2;
    const double last_bearing = log_.meta.bearing(beams - 1);
    constexpr double slack = 1e-9;
    if (log_.meta.angle_min < -options_.half_arc - slack || last_bearing > options_.half_arc + slack) {
      fail("bearing out of the detection arc");
    }
    std::vector<double> ranges;
    ranges.reserve(beams);
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      const double r = number(tokens[i]);
      if (r < 0.0) fail("negative range");
      ranges.push_back(r);
    }
    const ScanKind kind = tokens[0] == "V" ? ScanKind::Vertical : ScanKind::Horizontal;
    auto& stream = kind == ScanKind::Vertical ? log_.vertical : log_.horizontal;
    check_order(stream, t);
    stream.push_back(make_scan(t, kind, std::move(ranges), log_.meta));
  }

  void imu(const std::vector<std::string_view>& tokens) {
    if (tokens.size() != 11) fail("IMU record needs a timestamp and 9 matrix entries");
    ImuSample s;
    s.timestamp = timestamp(tokens[1]);
    for (int k = 0; k < 9; ++k) s.rotation(k / 3, k % 3) = number(tokens[static_cast<std::size_t>(2 + k)]);
    if (!is_rotation(s.rotation, options_.rotation_tol)) fail("IMU matrix is not a rotation");
    check_order(log_.imu, s.timestamp);
    log_.imu.push_back(s);
  }

  void altitude(const std::vector<std::string_view>& tokens) {
    if (tokens.size() != 3) fail("altitude record needs a timestamp and a height");
    AltitudeSample s{timestamp(tokens[1]), number(tokens[2])};
    check_order(log_.altitude, s.timestamp);
    log_.altitude.push_back(s);
  }

  const ParseOptions& options_;
  ScanLog log_;
  std::size_t line_no_ = 0;
  std::size_t first_scan_line_ = 0;
  bool saw_scan_ = false;
  std::optional<double> angle_min_;
  std::optional<double> angle_inc_;
  std::optional<double> range_max_;
};

}  // namespace

ScanLog parse_scan_log(std::istream& in, const ParseOptions& options) {
  LogParser parser(options);
  std::string line;
  while (std::getline(in, line)) parser.feed(line);
  return parser.finish();
}

ScanLog parse_scan_log(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse_scan_log(in, options);
}

void write_scan_log(std::ostream& out, const ScanLog& log) {
  out << "# uavscan scan log v1\n";
  out << "# angle_min " << format_double(log.meta.angle_min) << '\n';
  out << "# angle_inc " << format_double(log.meta.angle_inc) << '\n';
  out << "# range_max " << format_double(log.meta.range_max) << '\n';

  // Merge the streams by timestamp; at equal times I < A < H < V.
  std::size_t i = 0, a = 0, h = 0, v = 0;
  const double inf = std::numeric_limits<double>::infinity();
  auto ts = [&](const auto& stream, std::size_t k) { return k < stream.size() ? stream[k].timestamp : inf; };
  auto write_scan = [&](const LaserScan& s, char tag) {
    out << tag << ' ' << format_double(s.timestamp);
    for (double r : s.ranges) out << ' ' << format_double(r);
    out << '\n';
  };
  while (i < log.imu.size() || a < log.altitude.size() || h < log.horizontal.size() ||
         v < log.vertical.size()) {
    const double t = std::min({ts(log.imu, i), ts(log.altitude, a), ts(log.horizontal, h), ts(log.vertical, v)});
    if (ts(log.imu, i) == t) {
      const auto& s = log.imu[i++];
      out << "I " << format_double(s.timestamp);
      for (int k = 0; k < 9; ++k) out << ' ' << format_double(s.rotation(k / 3, k % 3));
      out << '\n';
    } else if (ts(log.altitude, a) == t) {
      const auto& s = log.altitude[a++];
      out << "A " << format_double(s.timestamp) << ' ' << format_double(s.z) << '\n';
    } else if (ts(log.horizontal, h) == t) {
      write_scan(log.horizontal[h++], 'H');
    } else {
      write_scan(log.vertical[v++], 'V');
    }
  }
}

void write_scan_log(const std::filesystem::path& path, const ScanLog& log) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_scan_log(out, log);
}

const Pose* PoseTrack::find(double timestamp) const {
  const auto it = std::lower_bound(poses.begin(), poses.end(), timestamp,
                                   [](const StampedPose& p, double t) { return p.timestamp < t; });
  if (it == poses.end() || it->timestamp != timestamp) return nullptr;
  return &it->pose;
}

Point3 horizontal_to_local(const PolarPoint& p, const Eigen::Vector3d& offset) {
  return Point3(p.range * std::cos(p.bearing), p.range * std::sin(p.bearing), 0.0) + offset;
}

PoseTrack estimate_pose_track(const ScanLog& log, const IngestConfig& cfg) {
  cfg.icp.validate();
  if (log.horizontal.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "pose tracking needs at least 2 horizontal scans");
  }
  if (log.imu.empty()) throw Error(ErrorKind::InvalidArgument, "pose tracking needs IMU samples");

  // Horizontal scans, de-rotated into the global orientation. Neighboring
  // beams are linked into segments unless the gap looks like an occlusion
  // edge (more than kLinkFactor beam spacings apart at that range).
  constexpr double kLinkFactor = 10.0;
  const double inc = log.meta.angle_inc;
  auto levelled = [&](const LaserScan& scan) {
    const Rotation& r = log.imu[nearest_sample(log.imu, scan.timestamp)].rotation;
    Polyline2 line;
    line.vertices.reserve(scan.points.size());
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
      const PolarPoint& p = scan.points[i];
      const Point3 g = r * horizontal_to_local(p, cfg.horizontal_offset);
      line.vertices.emplace_back(g.x(), g.y());
      if (i == 0) continue;
      const PolarPoint& q = scan.points[i - 1];
      const bool adjacent = p.bearing - q.bearing < 1.5 * inc;
      const double gap = (line.vertices[i] - line.vertices[i - 1]).norm();
      line.linked.push_back(adjacent && gap <= kLinkFactor * inc * std::min(p.range, q.range));
    }
    return line;
  };

  std::vector<Eigen::Vector2d> offsets(log.horizontal.size(), Eigen::Vector2d::Zero());
  Polyline2 previous = levelled(log.horizontal[0]);
  for (std::size_t k = 1; k < log.horizontal.size(); ++k) {
    Polyline2 current = levelled(log.horizontal[k]);
    RigidTransform2D step;
    try {
      step = icp_align_2d(current.vertices, previous, RigidTransform2D{}, cfg.icp);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::IcpDiverged || e.kind() == ErrorKind::InsufficientOverlap ||
          e.kind() == ErrorKind::DegenerateGeometry) {
        throw Error(e.kind(), "horizontal scan pair " + std::to_string(k - 1) + "-" +
                                  std::to_string(k) + ": " + e.what(), k - 1);
      }
      throw;
    }
    // current + t lands on previous, so the platform moved by t.
    offsets[k] = offsets[k - 1] + step.translation;
    previous = std::move(current);
  }

  PoseTrack track;
  track.poses.reserve(log.vertical.size());
  for (const auto& scan : log.vertical) {
    StampedPose sp;
    sp.timestamp = scan.timestamp;
    sp.pose.rotation = log.imu[nearest_sample(log.imu, scan.timestamp)].rotation;
    const auto& xy = offsets[nearest_sample(log.horizontal, scan.timestamp)];
    double z = 0.0;
    if (!log.altitude.empty()) z = log.altitude[nearest_sample(log.altitude, scan.timestamp)].z;
    sp.pose.translation = Eigen::Vector3d(xy.x(), xy.y(), z);
    track.poses.push_back(sp);
  }
  // Anchor the global frame at the platform position of the first scan.
  if (!track.poses.empty()) {
    const Eigen::Vector3d origin = track.poses.front().pose.translation;
    for (auto& p : track.poses) p.pose.translation -= origin;
  }
  return track;
}

BuiltCloud build_cloud(const ScanLog& log, const PoseTrack& track, const IngestConfig& cfg) {
  BuiltCloud out;
  for (std::size_t s = 0; s < log.vertical.size(); ++s) {
    const LaserScan& scan = log.vertical[s];
    const Pose* pose = track.find(scan.timestamp);
    if (!pose) {
      throw Error(ErrorKind::MissingPose, "no pose for vertical scan at t=" + format_double(scan.timestamp), s);
    }
    for (const auto& p : scan.points) {
      out.cloud.push_back(pose->apply(polar_to_local(p) + cfg.vertical_offset), static_cast<std::int32_t>(s));
    }
    out.dropped += scan.dropped();
  }
  return out;
}

}  // namespace uavscan
