#include "uavscan/planning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>

#include "uavscan/error.hpp"
#include "uavscan/polygon.hpp"

namespace uavscan {

void CameraSpec::validate() const {
  if (image_width < 1 || image_height < 1) throw Error(ErrorKind::InvalidArgument, "image size must be >= 1 pixel");
  const double pi = std::numbers::pi;
  if (!(fov_horizontal > 0.0 && fov_horizontal < pi) || !(fov_vertical > 0.0 && fov_vertical < pi)) {
    throw Error(ErrorKind::InvalidArgument, "fields of view must lie in (0, pi)");
  }
  if (gimbal_dof < 0) throw Error(ErrorKind::InvalidArgument, "gimbal_dof must be >= 0");
}

void InspectionTask::validate() const {
  if (!(footprint_width > 0.0) || !(footprint_height > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "photo footprint must be positive");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorKind::InvalidArgument, "overlap must be in [0, 1)");
}

void AStarWeights::validate() const {
  if (!(a1 > 0.0) || !(a2 > 0.0) || !(a3 > 0.0)) throw Error(ErrorKind::InvalidArgument, "A* weights must be > 0");
}

// --- occupancy grid ---------------------------------------------------------

OccupancyGrid::OccupancyGrid(const Point3& origin, double edge, std::array<int, 3> dims)
    : origin_(origin), edge_(edge), dims_(dims) {
  if (!(edge > 0.0)) throw Error(ErrorKind::InvalidArgument, "voxel edge must be > 0");
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw Error(ErrorKind::InvalidArgument, "grid dims must be >= 1");
  cells_.assign(static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
                    static_cast<std::size_t>(dims[2]),
                0);
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

bool OccupancyGrid::in_bounds(const Voxel& v) const {
  return v.x >= 0 && v.y >= 0 && v.z >= 0 && v.x < dims_[0] && v.y < dims_[1] && v.z < dims_[2];
}

Voxel OccupancyGrid::from_linear(std::size_t index) const {
  const auto nz = static_cast<std::size_t>(dims_[2]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(index / (ny * nz)), static_cast<int>((index / nz) % ny), static_cast<int>(index % nz)};
}

std::optional<Voxel> OccupancyGrid::voxel_of(const Point3& p) const {
  const Point3 rel = (p - origin_) / edge_;
  const double fx = std::floor(rel.x());
  const double fy = std::floor(rel.y());
  const double fz = std::floor(rel.z());
  if (fx < 0 || fy < 0 || fz < 0 || fx >= dims_[0] || fy >= dims_[1] || fz >= dims_[2]) return std::nullopt;
  return Voxel{static_cast<int>(fx), static_cast<int>(fy), static_cast<int>(fz)};
}

Point3 OccupancyGrid::center(const Voxel& v) const {
  return origin_ + Point3(v.x + 0.5, v.y + 0.5, v.z + 0.5) * edge_;
}

OccupancyGrid build_occupancy(const PointCloud& cloud, double voxel_edge, double margin) {
  if (!(voxel_edge > 0.0)) throw Error(ErrorKind::InvalidArgument, "voxel edge must be > 0");
  if (!(margin >= 0.0)) throw Error(ErrorKind::InvalidArgument, "margin must be >= 0");
  Aabb box = bounding_box(cloud.points);
  if (box.empty()) box.min = box.max = Point3::Zero();
  const Point3 origin = box.min.array() - margin;
  const Point3 size = (box.max - box.min).array() + 2.0 * margin;
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) dims[static_cast<std::size_t>(a)] = static_cast<int>(std::floor(size[a] / voxel_edge)) + 1;
  OccupancyGrid grid(origin, voxel_edge, dims);
  for (const auto& p : cloud.points) {
    if (const auto v = grid.voxel_of(p)) grid.set_occupied(*v);
  }
  return grid;
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorKind::InvalidArgument, "inflation radius must be >= 0");
  OccupancyGrid out = grid;
  const double e = grid.edge();
  const int reach = static_cast<int>(std::floor(radius / e));
  const double limit = radius * radius * (1.0 + 1e-12);
  std::vector<Voxel> offsets;
  for (int dx = -reach; dx <= reach; ++dx) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dz = -reach; dz <= reach; ++dz) {
        if ((dx * dx + dy * dy + dz * dz) * e * e <= limit) offsets.push_back({dx, dy, dz});
      }
    }
  }
  for (std::size_t i = 0; i < grid.voxel_count(); ++i) {
    if (!grid.cells()[i]) continue;
    const Voxel v = grid.from_linear(i);
    for (const auto& o : offsets) {
      const Voxel n{v.x + o.x, v.y + o.y, v.z + o.z};
      if (grid.in_bounds(n)) out.set_occupied(n);
    }
  }
  return out;
}

// --- A* ---------------------------------------------------------------------

VoxelPath astar(const OccupancyGrid& grid, const Voxel& start, const Voxel& goal, const AStarWeights& weights) {
  weights.validate();
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw Error(ErrorKind::InvalidArgument, "start or goal outside the grid");
  }
  if (grid.occupied(start) || grid.occupied(goal)) {
    throw Error(ErrorKind::StartOrGoalOccupied, "start or goal voxel is occupied");
  }
  const double min_weight = std::min({weights.a1, weights.a2, weights.a3});
  auto heuristic = [&](const Voxel& v) {
    const int cheb = std::max({std::abs(v.x - goal.x), std::abs(v.y - goal.y), std::abs(v.z - goal.z)});
    return min_weight * cheb;
  };

  struct Entry {
    double f;
    std::size_t index;
    bool operator>(const Entry& o) const { return f > o.f || (f == o.f && index > o.index); }
  };
  struct NodeState {
    double g;
    std::size_t parent;
    bool closed;
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::unordered_map<std::size_t, NodeState> state;

  const std::size_t start_id = grid.linear(start);
  const std::size_t goal_id = grid.linear(goal);
  state[start_id] = {0.0, start_id, false};
  open.push({heuristic(start), start_id});

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    NodeState& cur = state[top.index];
    if (cur.closed) continue;
    cur.closed = true;
    const double g = cur.g;
    if (top.index == goal_id) {
      VoxelPath path;
      path.cost = g;
      for (std::size_t id = goal_id;; id = state[id].parent) {
        path.voxels.push_back(grid.from_linear(id));
        if (id == start_id) break;
      }
      std::reverse(path.voxels.begin(), path.voxels.end());
      return path;
    }
    const Voxel v = grid.from_linear(top.index);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Voxel n{v.x + dx, v.y + dy, v.z + dz};
          if (!grid.in_bounds(n) || grid.occupied(n)) continue;
          const std::size_t id = grid.linear(n);
          const double tentative = g + weights.step_cost(dx, dy, dz);
          auto [it, inserted] = state.try_emplace(id, NodeState{tentative, top.index, false});
          if (!inserted) {
            if (it->second.closed || tentative >= it->second.g) continue;
            it->second.g = tentative;
            it->second.parent = top.index;
          }
          open.push({tentative + heuristic(n), id});
        }
      }
    }
  }
  throw Error(ErrorKind::NoPath, "goal unreachable from start");
}

// --- coverage ---------------------------------------------------------------

double standoff_distance(double footprint_width, const CameraSpec& camera) {
  return 0.5 * footprint_width / std::tan(0.5 * camera.fov_horizontal);
}

namespace {

// Number of footprints of size `footprint` spaced by `step` needed to span `extent`.
int lattice_count(double extent, double footprint, double step) {
  if (extent <= footprint) return 1;
  return static_cast<int>(std::ceil((extent - footprint) / step - 1e-9)) + 1;
}

}  // namespace

std::vector<StopPoint> plan_coverage(const InspectionTask& task, const CameraSpec& camera,
                                     const CoverageOptions& options) {
  task.validate();
  camera.validate();
  const std::vector<Point2> polygon = task.surface.boundary_2d();
  if (polygon.size() < 3 || polygon_area(polygon) <= 0.0) {
    throw Error(ErrorKind::EmptySurface, "surface boundary is degenerate");
  }
  const double standoff = standoff_distance(task.footprint_width, camera);
  if (standoff > options.max_standoff) {
    throw Error(ErrorKind::UnreachableStandoff, "standoff " + std::to_string(standoff) +
                                                    " m exceeds the maximum " + std::to_string(options.max_standoff) + " m");
  }
  const double vertical_span = 2.0 * standoff * std::tan(0.5 * camera.fov_vertical);
  if (vertical_span < task.footprint_height * (1.0 - 1e-9)) {
    throw Error(ErrorKind::InvalidArgument, "footprint height exceeds the vertical field of view at the standoff");
  }

  Point2 lo = polygon.front();
  Point2 hi = polygon.front();
  for (const auto& p : polygon) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double fw = task.footprint_width;
  const double fh = task.footprint_height;
  const double step_u = fw * (1.0 - task.overlap);
  const double step_v = fh;
  const int cols = lattice_count(hi.x() - lo.x(), fw, step_u);
  const int rows = lattice_count(hi.y() - lo.y(), fh, step_v);
  const double span_u = fw + (cols - 1) * step_u;
  const double span_v = fh + (rows - 1) * step_v;
  const double u0 = lo.x() + 0.5 * ((hi.x() - lo.x()) - span_u) + 0.5 * fw;
  const double v0 = lo.y() + 0.5 * ((hi.y() - lo.y()) - span_v) + 0.5 * fh;

  struct Cell {
    Point2 center;
    int row;
    int col;
  };
  std::vector<Cell> cells;
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      const int c = (r % 2 == 0) ? k : cols - 1 - k;
      const Point2 center(u0 + c * step_u, v0 + r * step_v);
      if (rect_intersects_polygon(center, 0.5 * fw, 0.5 * fh, polygon)) cells.push_back({center, r, c});
    }
  }

  const PlaneBasis basis = plane_basis(task.surface.model);
  double side = 1.0;
  if (options.grid) {
    auto blocked = [&](double s) {
      std::size_t n = 0;
      for (const auto& cell : cells) {
        const auto v = options.grid->voxel_of(basis.lift(cell.center) + s * standoff * basis.normal);
        if (!v || options.grid->occupied(*v)) ++n;
      }
      return n;
    };
    if (blocked(-1.0) < blocked(1.0)) side = -1.0;
  }

  std::vector<StopPoint> stops;
  stops.reserve(cells.size());
  for (const auto& cell : cells) {
    StopPoint sp;
    sp.position = basis.lift(cell.center) + side * standoff * basis.normal;
    sp.facing = -side * basis.normal;
    sp.row = cell.row;
    sp.col = cell.col;
    stops.push_back(sp);
  }
  return stops;
}

// --- waypoints --------------------------------------------------------------

FlightPlan generate_waypoints(const std::vector<StopPoint>& stops, const OccupancyGrid& inflated,
                              const AStarWeights& weights) {
  weights.validate();
  if (stops.empty()) throw Error(ErrorKind::InvalidArgument, "no stop points to connect");
  std::vector<Voxel> stop_voxels;
  stop_voxels.reserve(stops.size());
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const auto v = inflated.voxel_of(stops[i].position);
    if (!v) throw Error(ErrorKind::InvalidArgument, "stop point outside the occupancy grid", i);
    if (inflated.occupied(*v)) throw Error(ErrorKind::StopPointBlocked, "stop point voxel is occupied", i);
    stop_voxels.push_back(*v);
  }

  FlightPlan plan;
  plan.stops = stops;
  plan.waypoint_voxels.push_back(stop_voxels.front());
  plan.stop_waypoint.push_back(0);
  for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
    VoxelPath path;
    try {
      path = astar(inflated, stop_voxels[k], stop_voxels[k + 1], weights);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoPath) throw Error(ErrorKind::NoPath, "leg " + std::to_string(k), k);
      throw;
    }
    PlanLeg leg;
    leg.from_stop = k;
    leg.to_stop = k + 1;
    leg.first_waypoint = plan.waypoint_voxels.size() - 1;
    plan.waypoint_voxels.insert(plan.waypoint_voxels.end(), path.voxels.begin() + 1, path.voxels.end());
    leg.last_waypoint = plan.waypoint_voxels.size() - 1;
    leg.cost = path.cost;
    plan.total_cost += path.cost;
    plan.legs.push_back(leg);
    plan.stop_waypoint.push_back(leg.last_waypoint);
  }
  plan.waypoints.reserve(plan.waypoint_voxels.size());
  for (const auto& v : plan.waypoint_voxels) plan.waypoints.push_back(inflated.center(v));
  return plan;
}

}  // namespace uavscan
