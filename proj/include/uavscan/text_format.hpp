#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace uavscan {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict decimal parse of the whole token; nan and inf are rejected.
std::optional<double> parse_double(std::string_view token);

}  // namespace uavscan
