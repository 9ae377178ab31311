#pragma once

#include <optional>

#include "dynaplan/epn.hpp"
#include "dynaplan/planner.hpp"
#include "dynaplan/rrt.hpp"

namespace dynaplan {

/// Half-width of the uniform offset interval used by arc and mut.
inline double repair_vicinity(const WorldState& w) { return 4.0 * w.robot_half; }

/// Arc repair: offsets path[first_col] and path[first_col+1] by one shared
/// uniform delta on a coin-flipped axis and inserts the two new nodes between
/// them when all three bridging segments are collision free. Returns the path
/// unchanged on rejection.
Path arc(const Path& p, int first_col, double vicinity, const WorldState& w,
         Rng& rng, MetricsCounters& m);

/// Mutation repair: adds independent uniform x and y offsets to the interior
/// node nearest to first_col; kept only when the two adjacent segments stay
/// collision free.
Path mut(const Path& p, int first_col, double vicinity, const WorldState& w,
         Rng& rng, MetricsCounters& m);

/// Greedy shortcut: repeatedly deletes intermediate nodes whose bypass
/// segment is collision free, until no deletion applies.
Path post_process(const Path& p, const WorldState& w, MetricsCounters& m);

/// Multi-stage navigator: bidirectional RRT for the initial path, then
/// arc+mut informed local search at the first collision plus the greedy
/// shortcut pass every cycle. A path blocked by the same obstacle for one
/// clock second is discarded and planning restarts from the robot.
class MultiStagePlanner : public Planner {
 public:
  PlannerAction cycle(const WorldState& w, const std::vector<int>& changed,
                      Budget& budget, Rng& rng, MetricsCounters& m) override;
  void path_advanced(const Path& p) override;
  std::pair<int, int> tree_sizes() const override;
  const Path* current_path() const override;

  long long restarts() const { return restarts_; }

 private:
  enum class Phase { initial_rrt, navigating };

  void start_search(const WorldState& w);

  Phase phase_ = Phase::initial_rrt;
  std::optional<Tree> ta_, tb_;
  std::optional<Path> path_;
  std::optional<Path> candidate_;  // best bridge found while still searching
  int settle_ticks_ = 0;           // ticks grown since the first bridge
  std::optional<std::pair<int, double>> blocking_;  // obstacle id, first seen
  long long restarts_ = 0;
};

/// Combined planner: bidirectional RRT seeds one individual of an EP/N
/// population which then navigates; two clock seconds without any feasible
/// individual trigger one fresh RRT path injected over the worst individual.
class RrtEpnPlanner : public Planner {
 public:
  PlannerAction cycle(const WorldState& w, const std::vector<int>& changed,
                      Budget& budget, Rng& rng, MetricsCounters& m) override;
  std::pair<int, int> tree_sizes() const override;
  const Path* current_path() const override;

  const EpnPopulation* population() const { return pop_ ? &*pop_ : nullptr; }
  long long injections() const { return injections_; }

 private:
  enum class Phase { initial_rrt, navigating };

  Phase phase_ = Phase::initial_rrt;
  std::optional<Tree> ta_, tb_;
  std::optional<EpnPopulation> pop_;
  std::optional<Path> best_path_;
  double last_feasible_clock_ = 0.0;
  long long injections_ = 0;
};

}  // namespace dynaplan
