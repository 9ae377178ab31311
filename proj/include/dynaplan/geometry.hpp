#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace dynaplan {

/// A point in the plane, in world units. All stored coordinates must be finite.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dx * dx + dy * dy;
}

inline Point lerp(const Point& a, const Point& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

inline Point midpoint(const Point& a, const Point& b) {
  return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5};
}

/// Straight segment between two points. Zero-length segments are allowed and
/// behave as points.
struct Segment {
  Point a;
  Point b;
};

/// Closed axis-aligned rectangle. width and height must be positive.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double width = 0.0;
  double height = 0.0;

  double max_x() const { return min_x + width; }
  double max_y() const { return min_y + height; }
  Point center() const { return {min_x + width * 0.5, min_y + height * 0.5}; }

  Rect inflated(double margin) const {
    return {min_x - margin, min_y - margin, width + 2.0 * margin,
            height + 2.0 * margin};
  }
};

inline bool point_in_rect(const Point& p, const Rect& r) {
  return p.x >= r.min_x && p.x <= r.max_x() && p.y >= r.min_y &&
         p.y <= r.max_y();
}

/// Strict interior overlap of two rectangles; shared edges do not count.
inline bool rects_overlap(const Rect& a, const Rect& b) {
  return a.min_x < b.max_x() && a.max_x() > b.min_x && a.min_y < b.max_y() &&
         a.max_y() > b.min_y;
}

inline bool rect_contains_rect(const Rect& outer, const Rect& inner) {
  return inner.min_x >= outer.min_x && inner.max_x() <= outer.max_x() &&
         inner.min_y >= outer.min_y && inner.max_y() <= outer.max_y();
}

/// Parameter interval [t0, t1] of s inside the closed rectangle, computed by
/// Liang-Barsky clipping. Empty when the segment misses the rectangle.
inline std::optional<std::pair<double, double>> clip_segment_to_rect(
    const Segment& s, const Rect& r) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {s.a.x - r.min_x, r.max_x() - s.a.x, s.a.y - r.min_y,
                       r.max_y() - s.a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      if (t > t0) t0 = t;
    } else {
      if (t < t1) t1 = t;
    }
  }
  if (t0 > t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

/// True iff the segment shares at least one point with the closed rectangle.
inline bool segment_intersects_rect(const Segment& s, const Rect& r) {
  return clip_segment_to_rect(s, r).has_value();
}

/// Parameter along s of the first contact with the closed rectangle, if any.
inline std::optional<double> segment_rect_entry(const Segment& s,
                                                const Rect& r) {
  auto span = clip_segment_to_rect(s, r);
  if (!span) return std::nullopt;
  return span->first;
}

inline double point_segment_distance(const Point& p, const Segment& s) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, s.a);
  double t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {s.a.x + t * dx, s.a.y + t * dy});
}

inline double point_rect_distance(const Point& p, const Rect& r) {
  const double dx = std::max({r.min_x - p.x, 0.0, p.x - r.max_x()});
  const double dy = std::max({r.min_y - p.y, 0.0, p.y - r.max_y()});
  return std::hypot(dx, dy);
}

/// Minimum Euclidean distance between s and the closed rectangle; exactly 0
/// when they intersect. For disjoint shapes the minimum is attained either at
/// a rectangle corner or at a segment endpoint.
inline double segment_rect_distance(const Segment& s, const Rect& r) {
  if (segment_intersects_rect(s, r)) return 0.0;
  const Point corners[4] = {{r.min_x, r.min_y},
                            {r.max_x(), r.min_y},
                            {r.max_x(), r.max_y()},
                            {r.min_x, r.max_y()}};
  double best = std::min(point_rect_distance(s.a, r),
                         point_rect_distance(s.b, r));
  for (const Point& c : corners)
    best = std::min(best, point_segment_distance(c, s));
  return best;
}

}  // namespace dynaplan
