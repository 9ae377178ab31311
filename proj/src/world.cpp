#include "dynaplan/world.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace dynaplan {

bool segment_free(const WorldState& w, const Segment& s, MetricsCounters& m) {
  ++m.collision_checks;
  for (const Obstacle& o : w.obstacles) {
    if (!o.visible) continue;
    if (segment_intersects_rect(s, effective_shape(w, o))) return false;
  }
  return true;
}

int segment_hit_count(const WorldState& w, const Segment& s,
                      MetricsCounters& m) {
  ++m.collision_checks;
  int hits = 0;
  for (const Obstacle& o : w.obstacles) {
    if (!o.visible) continue;
    if (segment_intersects_rect(s, effective_shape(w, o))) ++hits;
  }
  return hits;
}

std::optional<std::pair<double, int>> first_hit(const WorldState& w,
                                                const Segment& s,
                                                MetricsCounters& m) {
  ++m.collision_checks;
  std::optional<std::pair<double, int>> best;
  for (const Obstacle& o : w.obstacles) {
    if (!o.visible) continue;
    auto t = segment_rect_entry(s, effective_shape(w, o));
    if (t && (!best || *t < best->first)) best = {*t, o.id};
  }
  return best;
}

FeasReport check_path(const WorldState& w, const Path& p, MetricsCounters& m) {
  FeasReport rep;
  for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
    const Segment seg{p.points[i], p.points[i + 1]};
    ++m.collision_checks;
    int hits = 0;
    double best_t = 2.0;
    int best_id = -1;
    for (const Obstacle& o : w.obstacles) {
      if (!o.visible) continue;
      auto t = segment_rect_entry(seg, effective_shape(w, o));
      if (!t) continue;
      ++hits;
      if (*t < best_t) {
        best_t = *t;
        best_id = o.id;
      }
    }
    if (hits > 0) {
      rep.total_intersections += hits;
      ++rep.unfeasible_segments;
      if (!rep.first_collision_vertex) {
        rep.first_collision_vertex = static_cast<int>(i);
        rep.blocking_obstacle = best_id;
      }
    }
  }
  rep.feasible = rep.total_intersections == 0;
  rep.eta = rep.unfeasible_segments > 0
                ? static_cast<double>(rep.total_intersections) /
                      rep.unfeasible_segments
                : 0.0;
  return rep;
}

double eval_path(const Path& p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.points.size(); ++i)
    total += distance(p.points[i], p.points[i + 1]);
  return total;
}

namespace {

bool placement_blocked(const WorldState& w, const Rect& candidate,
                       int self_id) {
  if (!rect_contains_rect(w.bounds, candidate)) return true;
  for (const Obstacle& o : w.obstacles) {
    if (o.id == self_id || !o.visible || o.kind == ObstacleKind::moving)
      continue;
    if (rects_overlap(candidate, o.shape)) return true;
  }
  return false;
}

}  // namespace

WorldState step_world(const WorldState& w, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_world: dt must be > 0");
  WorldState next = w;
  for (Obstacle& o : next.obstacles) {
    if (o.kind != ObstacleKind::moving) continue;
    // Axes handled independently; one reflection retry per axis per step.
    Rect moved = o.shape;
    moved.min_x = o.shape.min_x + o.vx * dt;
    if (placement_blocked(w, moved, o.id)) {
      o.vx = -o.vx;
      moved.min_x = o.shape.min_x + o.vx * dt;
      if (!rect_contains_rect(w.bounds, moved))
        moved.min_x = std::clamp(moved.min_x, w.bounds.min_x,
                                 w.bounds.max_x() - moved.width);
    }
    moved.min_y = o.shape.min_y + o.vy * dt;
    if (placement_blocked(w, moved, o.id)) {
      o.vy = -o.vy;
      moved.min_y = o.shape.min_y + o.vy * dt;
      if (!rect_contains_rect(w.bounds, moved))
        moved.min_y = std::clamp(moved.min_y, w.bounds.min_y,
                                 w.bounds.max_y() - moved.height);
    }
    o.shape = moved;
  }
  next.sim_time = w.sim_time + dt;
  return next;
}

WorldState update_visibility(const WorldState& w) {
  WorldState next = w;
  for (Obstacle& o : next.obstacles) {
    if (o.kind != ObstacleKind::hidden || o.visible) continue;
    if (point_rect_distance(w.robot_pos, o.shape) <= w.sensor_radius)
      o.visible = true;
  }
  return next;
}

std::pair<WorldState, Path> advance_robot(const WorldState& w, const Path& p,
                                          double dt) {
  assert(p.points.size() >= 2);
  WorldState next = w;
  Path out = p;
  double remaining = w.robot_speed * dt;
  Point pos = out.points.front();
  while (remaining > 0.0 && out.points.size() >= 2) {
    const Point& target = out.points[1];
    const double d = distance(pos, target);
    if (d <= remaining) {
      pos = target;
      remaining -= d;
      out.points.erase(out.points.begin());
    } else {
      pos = lerp(pos, target, remaining / d);
      remaining = 0.0;
    }
  }
  if (out.points.size() < 2) out.points = {pos, pos};
  out.points.front() = pos;
  next.robot_pos = pos;
  return {next, out};
}

}  // namespace dynaplan
