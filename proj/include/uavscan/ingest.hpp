#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "uavscan/geometry.hpp"
#include "uavscan/icp.hpp"

namespace uavscan {

enum class ScanKind { Vertical, Horizontal };

/// Beam geometry shared by every scan in a log.
struct ScanMetadata {
  double angle_min = -kDefaultHalfArc;             // radians, bearing of beam 0
  double angle_inc = 0.25 * std::numbers::pi / 180;  // radians
  double range_max = 30.0;                         // meters

  double bearing(std::size_t beam) const { return angle_min + static_cast<double>(beam) * angle_inc; }
};

/// One sweep of a 2D scanner. `ranges` holds the raw readings; `valid` marks
/// the readings in (0, range_max) and `points` holds exactly those, in beam order.
struct LaserScan {
  double timestamp = 0.0;
  ScanKind kind = ScanKind::Vertical;
  std::vector<double> ranges;
  std::vector<bool> valid;
  std::vector<PolarPoint> points;

  std::size_t dropped() const noexcept { return ranges.size() - points.size(); }
};

struct ImuSample {
  double timestamp = 0.0;
  Rotation rotation = Rotation::Identity();
};

struct AltitudeSample {
  double timestamp = 0.0;
  double z = 0.0;  // meters
};

struct ScanLog {
  ScanMetadata meta;
  std::vector<LaserScan> vertical;
  std::vector<LaserScan> horizontal;
  std::vector<ImuSample> imu;
  std::vector<AltitudeSample> altitude;  // optional `A` records

  std::size_t dropped_readings() const;
};

struct ParseOptions {
  double half_arc = kDefaultHalfArc;  // detection arc is [-half_arc, half_arc]
  double rotation_tol = 1e-9;
};

/// Builds the valid-point view of a scan from its raw ranges.
LaserScan make_scan(double timestamp, ScanKind kind, std::vector<double> ranges,
                    const ScanMetadata& meta);

ScanLog parse_scan_log(std::istream& in, const ParseOptions& options = {});
ScanLog parse_scan_log(const std::filesystem::path& path, const ParseOptions& options = {});

void write_scan_log(std::ostream& out, const ScanLog& log);
void write_scan_log(const std::filesystem::path& path, const ScanLog& log);

struct StampedPose {
  double timestamp = 0.0;
  Pose pose;
};

/// One pose per vertical scan, in timestamp order.
struct PoseTrack {
  std::vector<StampedPose> poses;

  const Pose* find(double timestamp) const;
};

struct IngestConfig {
  IcpConfig icp = [] {
    IcpConfig c;
    c.rotation_locked = true;
    c.max_correspondence_dist = 0.5;
    c.convergence_eps = 1e-6;
    c.min_pairs = 10;
    c.median_reject = 3.0;
    return c;
  }();
  // Scanner mounting offsets from the UAV center, in the body frame.
  Eigen::Vector3d vertical_offset = Eigen::Vector3d::Zero();
  Eigen::Vector3d horizontal_offset = Eigen::Vector3d::Zero();
};

/// Horizontal-scanner reading in the body frame: (r cos a, r sin a, 0) + offset.
Point3 horizontal_to_local(const PolarPoint& p, const Eigen::Vector3d& offset = Eigen::Vector3d::Zero());

/// Index of the sample nearest to `t`; ties resolve to the earlier sample.
template <typename Sample>
std::size_t nearest_sample(const std::vector<Sample>& samples, double t) {
  const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const Sample& s, double v) { return s.timestamp < v; });
  if (it == samples.begin()) return 0;
  if (it == samples.end()) return samples.size() - 1;
  const auto hi = static_cast<std::size_t>(it - samples.begin());
  return (t - samples[hi - 1].timestamp) <= (samples[hi].timestamp - t) ? hi - 1 : hi;
}

PoseTrack estimate_pose_track(const ScanLog& log, const IngestConfig& cfg = {});

struct BuiltCloud {
  PointCloud cloud;         // tagged with vertical scan index
  std::size_t dropped = 0;  // invalid readings skipped
};

BuiltCloud build_cloud(const ScanLog& log, const PoseTrack& track, const IngestConfig& cfg = {});

}  // namespace uavscan
