#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynaplan/rng.hpp"
#include "dynaplan/world.hpp"

namespace dynaplan {

/// Per-tick planning allowance. In iterations mode each take() spends one
/// planner iteration (a grow step, a generation step, or an arc+mut pair);
/// in wallclock mode take() succeeds until the slice of milliseconds is gone.
class Budget {
 public:
  static Budget iterations(int per_tick);
  static Budget wallclock(double ms_per_tick);

  void begin_tick();
  bool take();
  bool deterministic() const { return iterations_ >= 0; }

 private:
  int iterations_ = -1;  // -1: wallclock mode
  double ms_ = 0.0;
  int left_ = 0;
  long long deadline_ns_ = 0;
};

struct PlannerAction {
  enum class Kind { move, wait };
  Kind kind = Kind::wait;
  Path path;         ///< meaningful for move
  bool track = true; ///< whether moving along path should be reported back

  static PlannerAction wait() { return {}; }
  static PlannerAction move(Path p, bool track = true) {
    return {Kind::move, std::move(p), track};
  }
};

/// Common driver interface: the harness calls cycle once per tick with the
/// ids of obstacles that moved or appeared since the previous tick, then
/// advances the robot along the returned path (if any) and reports the
/// consumed path back through path_advanced when the action was tracked.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlannerAction cycle(const WorldState& w,
                              const std::vector<int>& changed, Budget& budget,
                              Rng& rng, MetricsCounters& m) = 0;
  virtual void path_advanced(const Path& p) {}
  virtual std::pair<int, int> tree_sizes() const { return {0, 0}; }
  virtual const Path* current_path() const { return nullptr; }
};

/// Planner ids accepted by the harness: rrt, drrt-adv, drrt-noadv,
/// mprrt-adv, mprrt-noadv, epn, rrt-epn, multistage.
std::unique_ptr<Planner> make_planner(const std::string& name);
const std::vector<std::string>& planner_names();

}  // namespace dynaplan
