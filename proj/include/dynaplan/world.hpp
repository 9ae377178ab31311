#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dynaplan/geometry.hpp"

namespace dynaplan {

enum class ObstacleKind { fixed, moving, hidden };

struct Obstacle {
  int id = 0;
  Rect shape;
  double vx = 0.0;  ///< world units per simulated second
  double vy = 0.0;
  ObstacleKind kind = ObstacleKind::fixed;
  bool visible = true;
};

/// Snapshot of the simulated world at one instant. Stepping functions return
/// new values instead of mutating in place.
struct WorldState {
  Rect bounds;
  std::vector<Obstacle> obstacles;
  Point robot_pos;
  double robot_half = 1.0;   ///< half side of the square robot
  double robot_speed = 1.0;  ///< world units per simulated second
  Point goal;
  double sim_time = 0.0;
  double sensor_radius = 6.0;  ///< hidden obstacles appear within this range
  bool inflate_obstacles = false;

  bool goal_reached() const {
    return distance(robot_pos, goal) <= robot_half;
  }
};

/// Ordered waypoint sequence from the current robot position to the goal.
struct Path {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  const Point& front() const { return points.front(); }
  const Point& back() const { return points.back(); }
};

struct FeasReport {
  bool feasible = true;
  std::optional<int> first_collision_vertex;  ///< first colliding segment i
  std::optional<int> blocking_obstacle;       ///< id, earliest hit on that segment
  int total_intersections = 0;                ///< mu
  int unfeasible_segments = 0;
  double eta = 0.0;  ///< mu / unfeasible_segments, 0 when all segments clear
};

struct MetricsCounters {
  long long collision_checks = 0;
  long long nn_lookups = 0;
};

/// Obstacle shape as seen by collision queries; grows by robot_half when the
/// world is configured to inflate instead of treating the robot as a point.
inline Rect effective_shape(const WorldState& w, const Obstacle& o) {
  return w.inflate_obstacles ? o.shape.inflated(w.robot_half) : o.shape;
}

/// One segment-versus-world query: true when s misses every visible obstacle.
/// Counts one collision check.
bool segment_free(const WorldState& w, const Segment& s, MetricsCounters& m);

/// Number of visible obstacles intersected by s. Counts one collision check.
int segment_hit_count(const WorldState& w, const Segment& s,
                      MetricsCounters& m);

/// Earliest contact along s with any visible obstacle, as (t, obstacle id).
/// Counts one collision check.
std::optional<std::pair<double, int>> first_hit(const WorldState& w,
                                                const Segment& s,
                                                MetricsCounters& m);

FeasReport check_path(const WorldState& w, const Path& p, MetricsCounters& m);

/// Sum of Euclidean segment lengths.
double eval_path(const Path& p);

/// Translate moving obstacles by dt; a move that would leave the bounds or
/// enter a visible fixed obstacle reflects the offending velocity component
/// and retries once per axis. Advances sim_time.
WorldState step_world(const WorldState& w, double dt);

/// Reveal every hidden obstacle whose shape lies within sensor_radius of the
/// robot. Revelation is irreversible.
WorldState update_visibility(const WorldState& w);

/// Move the robot along p at robot_speed for dt seconds, consuming waypoints
/// as they are reached. The returned path starts at the new robot position;
/// the robot never moves past the goal.
std::pair<WorldState, Path> advance_robot(const WorldState& w, const Path& p,
                                          double dt);

}  // namespace dynaplan
