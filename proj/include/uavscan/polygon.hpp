#pragma once

#include <span>
#include <vector>

#include "uavscan/geometry.hpp"

namespace uavscan {

/// z-component of (b - a) x (c - a); positive for a counter-clockwise turn.
double orient(const Point2& a, const Point2& b, const Point2& c);

/// Shoelace signed area, positive for counter-clockwise vertex order.
double signed_area(std::span<const Point2> polygon);
double polygon_area(std::span<const Point2> polygon);

/// Even-odd rule; points on an edge count as inside.
bool point_in_polygon(const Point2& p, std::span<const Point2> polygon);

/// Closed-segment intersection test, collinear overlaps included.
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

/// At least 3 vertices, no zero-length edge, no two edges touching except
/// adjacent edges at their shared vertex.
bool is_simple_polygon(std::span<const Point2> polygon);

/// Whether the axis-aligned rectangle centered at `center` shares any point
/// with the polygon (interior or boundary).
bool rect_intersects_polygon(const Point2& center, double half_width, double half_height,
                             std::span<const Point2> polygon);

/// Counter-clockwise hull starting at the lowest-x (then lowest-y) vertex,
/// with collinear points dropped. Throws DegenerateGeometry when the input
/// has fewer than 3 non-collinear points.
std::vector<Point2> convex_hull_2d(std::span<const Point2> points);

}  // namespace uavscan
