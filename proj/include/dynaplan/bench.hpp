#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynaplan/map_io.hpp"
#include "dynaplan/planner.hpp"
#include "dynaplan/world.hpp"

namespace dynaplan {

struct ScenarioSpec {
  std::string map_path;
  Environment environment = Environment::dynamic;
  int n_moving = 30;
  double cutoff = 300.0;  ///< simulated seconds
  double tick_dt = 0.1;
  bool iterations_mode = true;
  double budget_value = 300.0;  ///< iterations per tick, or ms per tick
  long long seed = 1;
  std::optional<Point> robot_override;
  std::optional<Point> goal_override;
};

struct TrialResult {
  std::string planner;
  std::string map;
  std::string environment;
  int trial = 0;
  long long seed = 0;
  bool success = false;
  long long collision_checks = 0;
  long long nn_lookups = 0;
  double sim_time = 0.0;
  double wall_time_ms = 0.0;  ///< reported as 0 in iterations mode
  double path_length = 0.0;
};

struct TraceObstacle {
  int id = 0;
  Rect shape;
  bool visible = true;
};

struct TraceRecord {
  long long tick = 0;
  Point robot;
  std::vector<TraceObstacle> obstacles;
  std::vector<Point> path;
  std::pair<int, int> tree_sizes{0, 0};
};

using TraceSink = std::function<void(const TraceRecord&)>;

std::string environment_name(Environment e);
Environment parse_environment(const std::string& s);

/// One simulated navigation run: per tick the world updates (visibility,
/// obstacle motion), the planner gets one budget slice, and the robot
/// advances along the returned path. Deterministic in iterations mode.
TrialResult run_trial(const ScenarioSpec& spec, const std::string& planner_id,
                      int trial, long long seed,
                      const TraceSink* sink = nullptr);

/// Trials 0..n-1 with per-trial seed spec.seed + trial, executed on up to
/// jobs worker threads. Results ordered by trial index. A trace sink, when
/// given, only observes trial 0.
std::vector<TrialResult> run_trials(const ScenarioSpec& spec,
                                    const std::string& planner_id, int trials,
                                    int jobs, const TraceSink* sink = nullptr);

struct SummaryRow {
  std::string planner;
  int trials = 0;
  double success_rate = 0.0;  ///< percent
  double mean_cc = 0.0;
  double mean_nn = 0.0;
  double mean_time = 0.0;  ///< over successful trials
  double sd_time = 0.0;    ///< sample standard deviation
};

/// Per-planner summary. Throws std::invalid_argument on empty input.
std::vector<SummaryRow> aggregate(const std::vector<TrialResult>& results);

void write_csv(std::ostream& out, const std::vector<TrialResult>& results);
std::vector<TrialResult> read_csv(std::istream& in);

void write_trace_line(std::ostream& out, const TraceRecord& rec);
/// Throws std::runtime_error naming the 1-based line number on bad input.
std::vector<TraceRecord> read_trace(std::istream& in);

}  // namespace dynaplan
