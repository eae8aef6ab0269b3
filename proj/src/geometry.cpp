#include "uavscan/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "uavscan/error.hpp"

namespace uavscan {

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::compose(const Pose& rhs) const {
  Pose out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool is_rotation(const Rotation& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Rotation::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

bool is_valid(const Pose& pose, double tol) {
  return is_rotation(pose.rotation, tol) && pose.translation.allFinite();
}

Rotation rotation_about_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Rotation r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Rotation rotation_rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

void PointCloud::append(const PointCloud& other) {
  if (has_tags() != other.has_tags() && !empty() && !other.empty()) {
    throw Error(ErrorKind::InvalidArgument, "cannot append tagged and untagged clouds");
  }
  points.insert(points.end(), other.points.begin(), other.points.end());
  tags.insert(tags.end(), other.tags.begin(), other.tags.end());
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& indices) const {
  PointCloud out;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(points.at(i));
  if (has_tags()) {
    out.tags.reserve(indices.size());
    for (std::size_t i : indices) out.tags.push_back(tags[i]);
  }
  return out;
}

void validate(const PointCloud& cloud) {
  if (cloud.has_tags() && cloud.tags.size() != cloud.points.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "tag column covers " + std::to_string(cloud.tags.size()) + " of " +
                    std::to_string(cloud.points.size()) + " points");
  }
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!cloud.points[i].allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "non-finite point", i);
    }
  }
}

Aabb bounding_box(const std::vector<Point3>& points) {
  Aabb box;
  for (const auto& p : points) box.extend(p);
  return box;
}

Point3 polar_to_local(const PolarPoint& p) {
  return {-p.range * std::cos(p.bearing), 0.0, -p.range * std::sin(p.bearing)};
}

Point3 transform_point(const Pose& pose, const Point3& local) { return pose.apply(local); }

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(pose.apply(p));
  out.tags = cloud.tags;
  return out;
}

}  // namespace uavscan
