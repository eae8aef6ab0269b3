#pragma once

#include <filesystem>
#include <vector>

#include "uavscan/geometry.hpp"
#include "uavscan/segmentation.hpp"

namespace uavscan {

enum class View { Top, Side };  // Top: x-y, Side: x-z

struct RenderInput {
  const PointCloud* cloud = nullptr;
  const std::vector<PlanarSurface>* surfaces = nullptr;
  const std::vector<Point3>* waypoints = nullptr;
};

std::string render_svg(const RenderInput& input, View view, int width_px = 900);
void write_svg(const std::filesystem::path& path, const RenderInput& input, View view);

}  // namespace uavscan
