#include "dynaplan/map_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace dynaplan {

namespace {

[[noreturn]] void fail(const std::string& name, int line,
                       const std::string& what) {
  throw MapError(name + ":" + std::to_string(line) + ": " + what);
}

WorldState load_rects(std::istream& in, const std::string& name) {
  WorldState w;
  bool have_bounds = false, have_robot = false, have_goal = false;
  int next_id = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "bounds") {
      if (have_bounds) fail(name, lineno, "duplicate bounds");
      if (!(ls >> w.bounds.min_x >> w.bounds.min_y >> w.bounds.width >>
            w.bounds.height))
        fail(name, lineno, "bounds expects MINX MINY W H");
      have_bounds = true;
    } else if (!have_bounds) {
      fail(name, lineno, "bounds must come first");
    } else if (kw == "robot") {
      if (have_robot) fail(name, lineno, "duplicate robot");
      if (!(ls >> w.robot_pos.x >> w.robot_pos.y >> w.robot_half >>
            w.robot_speed))
        fail(name, lineno, "robot expects X Y HALF SPEED");
      have_robot = true;
    } else if (kw == "goal") {
      if (have_goal) fail(name, lineno, "duplicate goal");
      if (!(ls >> w.goal.x >> w.goal.y)) fail(name, lineno, "goal expects X Y");
      have_goal = true;
    } else if (kw == "rect") {
      Obstacle o;
      o.id = next_id++;
      if (!(ls >> o.shape.min_x >> o.shape.min_y >> o.shape.width >>
            o.shape.height))
        fail(name, lineno, "rect expects X Y W H");
      if (o.shape.width <= 0.0 || o.shape.height <= 0.0)
        fail(name, lineno, "rect needs positive extent");
      std::string mod;
      if (ls >> mod) {
        if (mod == "moving") {
          if (!(ls >> o.vx >> o.vy))
            fail(name, lineno, "moving expects VX VY");
          o.kind = ObstacleKind::moving;
        } else if (mod == "hidden") {
          o.kind = ObstacleKind::hidden;
          o.visible = false;
        } else {
          fail(name, lineno, "unknown rect modifier '" + mod + "'");
        }
      }
      w.obstacles.push_back(o);
    } else {
      fail(name, lineno, "unknown keyword '" + kw + "'");
    }
  }
  if (!have_bounds) fail(name, lineno, "missing bounds");
  if (!have_robot) fail(name, lineno, "missing robot");
  if (!have_goal) fail(name, lineno, "missing goal");
  w.sensor_radius = 6.0 * w.robot_half;
  validate_world(w, name);
  return w;
}

int pbm_token(std::istream& in, const std::string& name) {
  // P1 body: whitespace-separated digits, '#' comments to end of line.
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (c == '0') return 0;
    if (c == '1') return 1;
    if (!std::isspace(static_cast<unsigned char>(c)))
      throw MapError(name + ": unexpected character in P1 body");
  }
  throw MapError(name + ": truncated P1 body");
}

WorldState load_pbm(std::istream& in, const std::string& name) {
  std::string magic;
  in >> magic;
  if (magic != "P1" && magic != "P4")
    throw MapError(name + ": expected PBM magic P1 or P4");
  auto read_dim = [&](const char* what) {
    // Header fields may be separated by comments.
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      long v;
      if (!(in >> v) || v <= 0)
        throw MapError(name + std::string(": bad PBM ") + what);
      return static_cast<int>(v);
    }
  };
  const int cols = read_dim("width");
  const int rows = read_dim("height");

  std::vector<std::vector<bool>> black(rows, std::vector<bool>(cols, false));
  if (magic == "P1") {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) black[r][c] = pbm_token(in, name) == 1;
  } else {
    in.get();  // single whitespace after header
    const int row_bytes = (cols + 7) / 8;
    for (int r = 0; r < rows; ++r) {
      for (int byte = 0; byte < row_bytes; ++byte) {
        const int ch = in.get();
        if (ch == EOF)
          throw MapError(name + ": truncated P4 body at row " +
                         std::to_string(r));
        for (int bit = 0; bit < 8; ++bit) {
          const int c = byte * 8 + bit;
          if (c < cols) black[r][c] = (ch >> (7 - bit)) & 1;
        }
      }
    }
  }

  WorldState w;
  w.bounds = {0.0, 0.0, static_cast<double>(cols), static_cast<double>(rows)};
  int next_id = 0;
  for (int r = 0; r < rows; ++r) {
    const double y = static_cast<double>(rows - 1 - r);
    int c = 0;
    while (c < cols) {
      if (!black[r][c]) {
        ++c;
        continue;
      }
      int run = 0;
      while (c + run < cols && black[r][c + run]) ++run;
      Obstacle o;
      o.id = next_id++;
      o.shape = {static_cast<double>(c), y, static_cast<double>(run), 1.0};
      w.obstacles.push_back(o);
      c += run;
    }
  }
  // PBM carries no robot/goal; callers override before running. Defaults sit
  // at opposite corners of the grid.
  w.robot_pos = {0.5, 0.5};
  w.robot_half = 0.4;
  w.robot_speed = 1.0;
  w.goal = {cols - 0.5, rows - 0.5};
  w.sensor_radius = 6.0 * w.robot_half;
  return w;
}

}  // namespace

WorldState load_map(std::istream& in, MapFormat format,
                    const std::string& name) {
  return format == MapFormat::rects ? load_rects(in, name)
                                    : load_pbm(in, name);
}

WorldState load_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError(path + ": cannot open");
  const bool pbm = path.size() >= 4 && path.compare(path.size() - 4, 4,
                                                    ".pbm") == 0;
  return load_map(in, pbm ? MapFormat::pbm : MapFormat::rects, path);
}

void validate_world(const WorldState& w, const std::string& name) {
  if (!point_in_rect(w.robot_pos, w.bounds))
    throw MapError(name + ": robot outside bounds");
  if (!point_in_rect(w.goal, w.bounds))
    throw MapError(name + ": goal outside bounds");
  for (const Obstacle& o : w.obstacles) {
    if (!o.visible || o.kind == ObstacleKind::moving) continue;
    if (point_in_rect(w.robot_pos, o.shape))
      throw MapError(name + ": robot inside obstacle " + std::to_string(o.id));
    if (point_in_rect(w.goal, o.shape))
      throw MapError(name + ": goal inside obstacle " + std::to_string(o.id));
  }
}

WorldState setup_environment(WorldState w, Environment env, int n_moving,
                             Rng& rng) {
  if (env == Environment::unknown) {
    for (Obstacle& o : w.obstacles) {
      if (o.kind == ObstacleKind::moving) continue;
      o.kind = ObstacleKind::hidden;
      o.visible = false;
    }
    return w;
  }
  if (env == Environment::partial) return w;

  // dynamic: scatter robot-sized movers over free space.
  int next_id = 0;
  for (const Obstacle& o : w.obstacles) next_id = std::max(next_id, o.id + 1);
  const double side = 2.0 * w.robot_half;
  const double keepout = 4.0 * w.robot_half;
  for (int k = 0; k < n_moving; ++k) {
    Obstacle o;
    o.id = next_id++;
    o.kind = ObstacleKind::moving;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      o.shape = {rng.uniform(w.bounds.min_x, w.bounds.max_x() - side),
                 rng.uniform(w.bounds.min_y, w.bounds.max_y() - side), side,
                 side};
      const bool clear_of_static = [&] {
        for (const Obstacle& s : w.obstacles)
          if (s.kind != ObstacleKind::moving &&
              rects_overlap(o.shape, s.shape))
            return false;
        return true;
      }();
      if (clear_of_static &&
          point_rect_distance(w.robot_pos, o.shape) > keepout &&
          point_rect_distance(w.goal, o.shape) > keepout)
        break;
    }
    const double speed = rng.uniform(0.10, 0.55) * w.robot_speed;
    const double heading = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    o.vx = speed * std::cos(heading);
    o.vy = speed * std::sin(heading);
    w.obstacles.push_back(o);
  }
  return w;
}

}  // namespace dynaplan
