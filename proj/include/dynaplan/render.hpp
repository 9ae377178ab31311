#pragma once

#include <string>
#include <vector>

#include "dynaplan/bench.hpp"

namespace dynaplan {

/// Linear world-to-viewport mapping with a flipped y axis.
struct SvgTransform {
  double scale = 1.0;
  double min_x = 0.0;
  double max_y = 0.0;
  double margin = 10.0;
  double width_px = 820.0;
  double height_px = 820.0;

  double px(double wx) const { return margin + (wx - min_x) * scale; }
  double py(double wy) const { return margin + (max_y - wy) * scale; }
};

/// Transform fitting the bounding box of everything in the trace into a
/// viewport width_px pixels wide.
SvgTransform fit_transform(const std::vector<TraceRecord>& trace,
                           double width_px = 800.0);

/// One frame: obstacles (hidden ones dashed), the planner path, the robot,
/// and a goal cross at the path end of the last pathful record.
std::string render_tick_svg(const TraceRecord& rec, const SvgTransform& t);

/// Whole trial: final obstacle layout plus the robot trajectory polyline
/// (one vertex per tick).
std::string render_overview_svg(const std::vector<TraceRecord>& trace,
                                double width_px = 800.0);

}  // namespace dynaplan
