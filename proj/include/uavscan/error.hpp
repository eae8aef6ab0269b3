#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uavscan {

enum class ErrorKind {
  InvalidArgument,
  MalformedRecord,
  UnsortedTimestamps,
  EmptyLog,
  MissingPose,
  IcpDiverged,
  InsufficientOverlap,
  DegenerateGeometry,
  NoOverlap,
  CloudTooSmall,
  NoPlaneFound,
  UnreachableStandoff,
  EmptySurface,
  NoPath,
  StartOrGoalOccupied,
  StopPointBlocked,
  NonPlanarEdit,
  SelfIntersectingPolygon,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported through this type. `index` carries
// the record line, scan pair, station, leg or stop index when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace uavscan
