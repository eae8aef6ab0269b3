#include "uavscan/render.hpp"

#include <algorithm>
#include <cstdio>
#include <Eigen/Geometry>
#include <fstream>
#include <sstream>

#include "uavscan/error.hpp"

namespace uavscan {

namespace {

constexpr std::size_t kMaxDrawnPoints = 20000;
constexpr const char* kSurfaceColors[] = {"#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Point2 project(const Point3& p, View view) {
  return view == View::Top ? Point2(p.x(), p.y()) : Point2(p.x(), p.z());
}

}  // namespace

std::string render_svg(const RenderInput& input, View view, int width_px) {
  Eigen::AlignedBox<double, 2> box;
  auto grow = [&](const Point3& p) { box.extend(project(p, view)); };
  if (input.cloud) for (const auto& p : input.cloud->points) grow(p);
  if (input.surfaces) for (const auto& s : *input.surfaces) for (const auto& p : s.boundary) grow(p);
  if (input.waypoints) for (const auto& p : *input.waypoints) grow(p);
  if (box.isEmpty()) box.extend(Point2(0, 0));

  const double pad = 20.0;
  const Point2 lo = box.min();
  const Point2 extent = (box.max() - box.min()).cwiseMax(Point2(1e-6, 1e-6));
  const double scale = (width_px - 2 * pad) / std::max(extent.x(), extent.y());
  const double height_px = extent.y() * scale + 2 * pad;
  auto sx = [&](const Point2& q) { return num(pad + (q.x() - lo.x()) * scale); };
  auto sy = [&](const Point2& q) { return num(height_px - pad - (q.y() - lo.y()) * scale); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\"" << num(height_px)
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << pad << "\" y=\"14\" font-size=\"12\" font-family=\"sans-serif\">"
      << (view == View::Top ? "top (x-y)" : "side (x-z)") << ", 1 m = " << num(scale) << " px</text>\n";

  if (input.cloud && !input.cloud->empty()) {
    const std::size_t n = input.cloud->size();
    const std::size_t stride = (n + kMaxDrawnPoints - 1) / kMaxDrawnPoints;
    svg << "<path stroke=\"#777\" stroke-width=\"1\" stroke-linecap=\"round\" d=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      const Point2 q = project(input.cloud->points[i], view);
      svg << 'M' << sx(q) << ' ' << sy(q) << "h0 ";
    }
    svg << "\"/>\n";
  }
  if (input.surfaces) {
    std::size_t k = 0;
    for (const auto& s : *input.surfaces) {
      svg << "<polygon fill=\"none\" stroke=\"" << kSurfaceColors[k++ % std::size(kSurfaceColors)]
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.boundary) {
        const Point2 q = project(p, view);
        svg << sx(q) << ',' << sy(q) << ' ';
      }
      svg << "\"/>\n";
    }
  }
  if (input.waypoints && !input.waypoints->empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#0a0\" stroke-width=\"0.6\" points=\"";
    for (const auto& p : *input.waypoints) {
      const Point2 q = project(p, view);
      svg << sx(q) << ',' << sy(q) << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::filesystem::path& path, const RenderInput& input, View view) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << render_svg(input, view);
}

}  // namespace uavscan
