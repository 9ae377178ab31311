#include "dynaplan/render.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace dynaplan {

namespace {

struct Box {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(const Point& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void add(const Rect& r) {
    add(Point{r.min_x, r.min_y});
    add(Point{r.max_x(), r.max_y()});
  }
};

void emit_rect(std::ostringstream& s, const Rect& r, const SvgTransform& t,
               bool dashed) {
  s << "<rect x=\"" << t.px(r.min_x) << "\" y=\"" << t.py(r.max_y())
    << "\" width=\"" << r.width * t.scale << "\" height=\""
    << r.height * t.scale << "\" fill=\"" << (dashed ? "none" : "#9aa0a6")
    << "\" stroke=\"#5f6368\"";
  if (dashed) s << " stroke-dasharray=\"4 3\"";
  s << "/>\n";
}

void emit_polyline(std::ostringstream& s, const std::vector<Point>& pts,
                   const SvgTransform& t, const char* color) {
  if (pts.size() < 2) return;
  s << "<polyline fill=\"none\" stroke=\"" << color
    << "\" stroke-width=\"2\" points=\"";
  for (const Point& p : pts) s << t.px(p.x) << ',' << t.py(p.y) << ' ';
  s << "\"/>\n";
}

void emit_cross(std::ostringstream& s, const Point& p, const SvgTransform& t) {
  const double c = 6.0;
  const double x = t.px(p.x), y = t.py(p.y);
  s << "<line x1=\"" << x - c << "\" y1=\"" << y - c << "\" x2=\"" << x + c
    << "\" y2=\"" << y + c << "\" stroke=\"#d93025\" stroke-width=\"2\"/>\n"
    << "<line x1=\"" << x - c << "\" y1=\"" << y + c << "\" x2=\"" << x + c
    << "\" y2=\"" << y - c << "\" stroke=\"#d93025\" stroke-width=\"2\"/>\n";
}

std::string svg_open(const SvgTransform& t) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << t.width_px
    << "\" height=\"" << t.height_px << "\" viewBox=\"0 0 " << t.width_px
    << ' ' << t.height_px << "\">\n";
  return s.str();
}

const std::vector<Point>* last_path(const std::vector<TraceRecord>& trace) {
  for (auto it = trace.rbegin(); it != trace.rend(); ++it)
    if (!it->path.empty()) return &it->path;
  return nullptr;
}

}  // namespace

SvgTransform fit_transform(const std::vector<TraceRecord>& trace,
                           double width_px) {
  Box box;
  for (const TraceRecord& rec : trace) {
    box.add(rec.robot);
    for (const TraceObstacle& o : rec.obstacles) box.add(o.shape);
    for (const Point& p : rec.path) box.add(p);
  }
  if (box.min_x > box.max_x) box = Box{0, 0, 1, 1};
  SvgTransform t;
  const double w = std::max(box.max_x - box.min_x, 1e-9);
  const double h = std::max(box.max_y - box.min_y, 1e-9);
  t.scale = (width_px - 2.0 * t.margin) / w;
  t.min_x = box.min_x;
  t.max_y = box.max_y;
  t.width_px = width_px;
  t.height_px = h * t.scale + 2.0 * t.margin;
  return t;
}

std::string render_tick_svg(const TraceRecord& rec, const SvgTransform& t) {
  std::ostringstream s;
  s << svg_open(t);
  for (const TraceObstacle& o : rec.obstacles)
    emit_rect(s, o.shape, t, !o.visible);
  emit_polyline(s, rec.path, t, "#1a73e8");
  if (!rec.path.empty()) emit_cross(s, rec.path.back(), t);
  s << "<circle cx=\"" << t.px(rec.robot.x) << "\" cy=\"" << t.py(rec.robot.y)
    << "\" r=\"4\" fill=\"#188038\"/>\n</svg>\n";
  return s.str();
}

std::string render_overview_svg(const std::vector<TraceRecord>& trace,
                                double width_px) {
  const SvgTransform t = fit_transform(trace, width_px);
  std::ostringstream s;
  s << svg_open(t);
  if (!trace.empty())
    for (const TraceObstacle& o : trace.back().obstacles)
      emit_rect(s, o.shape, t, !o.visible);
  std::vector<Point> trajectory;
  trajectory.reserve(trace.size());
  for (const TraceRecord& rec : trace) trajectory.push_back(rec.robot);
  emit_polyline(s, trajectory, t, "#188038");
  if (const std::vector<Point>* path = last_path(trace)) {
    emit_polyline(s, *path, t, "#1a73e8");
    emit_cross(s, path->back(), t);
  }
  if (!trace.empty()) {
    const Point& r = trace.back().robot;
    s << "<circle cx=\"" << t.px(r.x) << "\" cy=\"" << t.py(r.y)
      << "\" r=\"4\" fill=\"#188038\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace dynaplan
