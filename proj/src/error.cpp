#include "uavscan/error.hpp"

namespace uavscan {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::UnsortedTimestamps: return "UnsortedTimestamps";
    case ErrorKind::EmptyLog: return "EmptyLog";
    case ErrorKind::MissingPose: return "MissingPose";
    case ErrorKind::IcpDiverged: return "IcpDiverged";
    case ErrorKind::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::CloudTooSmall: return "CloudTooSmall";
    case ErrorKind::NoPlaneFound: return "NoPlaneFound";
    case ErrorKind::UnreachableStandoff: return "UnreachableStandoff";
    case ErrorKind::EmptySurface: return "EmptySurface";
    case ErrorKind::NoPath: return "NoPath";
    case ErrorKind::StartOrGoalOccupied: return "StartOrGoalOccupied";
    case ErrorKind::StopPointBlocked: return "StopPointBlocked";
    case ErrorKind::NonPlanarEdit: return "NonPlanarEdit";
    case ErrorKind::SelfIntersectingPolygon: return "SelfIntersectingPolygon";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {
std::string compose(ErrorKind kind, const std::string& message,
                    std::optional<std::size_t> index) {
  std::string out(to_string(kind));
  if (index) out += " [" + std::to_string(*index) + "]";
  if (!message.empty()) out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(compose(kind, message, index)),
      kind_(kind),
      index_(index) {}

}  // namespace uavscan
