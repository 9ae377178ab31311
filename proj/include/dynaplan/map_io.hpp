#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dynaplan/rng.hpp"
#include "dynaplan/world.hpp"

namespace dynaplan {

enum class MapFormat { rects, pbm };

struct MapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse a world description. The rects grammar is line oriented with '#'
/// comments:
///   bounds MINX MINY W H        (first non-comment line, exactly once)
///   robot X Y HALF SPEED        (once)
///   goal X Y                    (once)
///   rect X Y W H [moving VX VY | hidden]
/// PBM (P1 or P4): a black pixel occupies the unit cell (col, rows-1-row);
/// horizontal runs of black pixels merge into single rectangles and the image
/// implies bounds 0 0 cols rows.
WorldState load_map(std::istream& in, MapFormat format,
                    const std::string& name = "<stream>");

WorldState load_map_file(const std::string& path);

/// Throws MapError when the robot or goal sits inside a visible fixed
/// obstacle or outside the bounds.
void validate_world(const WorldState& w, const std::string& name);

enum class Environment { dynamic, partial, unknown };

/// Apply an experiment environment to a freshly loaded map.
///   dynamic: spawn n_moving robot-sized obstacles at free positions with
///            speeds uniform in [0.10, 0.55] of the robot speed and uniform
///            random headings, sampled once from rng.
///   partial: keep declared kinds; hidden obstacles reveal on approach.
///   unknown: every non-moving obstacle starts hidden.
WorldState setup_environment(WorldState w, Environment env, int n_moving,
                             Rng& rng);

}  // namespace dynaplan
