#pragma once

#include <deque>
#include <optional>

#include "dynaplan/planner.hpp"
#include "dynaplan/rrt.hpp"

namespace dynaplan {

inline constexpr int kWaypointCacheCapacity = 100;
inline constexpr double kDrrtVicinityBias = 0.4;
inline constexpr double kForestProb = 0.1;
inline constexpr double kMprrtGoalProb = 0.1;
inline constexpr double kWaypointProb = 0.6;
inline constexpr int kForestMax = 25;
inline constexpr int kForestMinSave = 5;

/// Fixed-capacity pool of waypoints from previously delivered paths.
struct WaypointCache {
  std::vector<Point> slots;
  int count = 0;
  int capacity = kWaypointCacheCapacity;
};

/// Insert every path vertex; once full each insertion overwrites a uniformly
/// random slot.
void cache_store(WaypointCache& c, const Path& path, Rng& rng);

/// Goal with probability kGoalBias, a cached waypoint with kWaypointProb
/// (falling through to uniform when the cache is empty), else uniform.
Point choose_target(const WaypointCache& c, const Point& goal,
                    const WorldState& w, Rng& rng);
/// Branch-forcing variant: p replaces the first uniform draw.
Point choose_target(const WaypointCache& c, const Point& goal,
                    const WorldState& w, Rng& rng, double p);

/// DRRT trimming: nodes whose incoming edge crosses any changed obstacle are
/// invalid, invalidity propagates to all descendants, and survivors are
/// re-packed into a fresh tree (root always survives). One collision check is
/// counted per edge examined.
Tree invalidate_and_trim(const Tree& t, const std::vector<Obstacle>& changed,
                         const WorldState& w, MetricsCounters& m);

/// MP-RRT pruning: kills nodes whose configuration lies inside a changed
/// obstacle or whose incoming edge crosses one, then splits the survivors
/// into connected components. Component 0, when present, contains the root.
struct PrunePieces {
  std::optional<Tree> rooted;        ///< component still containing the root
  std::vector<Tree> severed;         ///< other components, any size
};
PrunePieces prune_components(const Tree& t,
                             const std::vector<Obstacle>& changed,
                             const WorldState& w, MetricsCounters& m);

/// Re-root t at new_root by linking to its nearest node when that link is
/// collision free; nullopt when blocked.
std::optional<Tree> reroot_at(const Tree& t, const Point& new_root,
                              const WorldState& w, MetricsCounters& m);

/// Movement policy shared by the on-line RRT planners.
struct AdvancePolicy {
  bool advance_when_disconnected = false;
};

class DrrtPlanner : public Planner {
 public:
  DrrtPlanner(bool advance_when_disconnected)
      : adv_{advance_when_disconnected} {}

  PlannerAction cycle(const WorldState& w, const std::vector<int>& changed,
                      Budget& budget, Rng& rng, MetricsCounters& m) override;
  void path_advanced(const Path& p) override;
  std::pair<int, int> tree_sizes() const override;
  const Path* current_path() const override {
    return path_ ? &*path_ : nullptr;
  }

  const WaypointCache& cache() const { return cache_; }

 private:
  Point sample_target(const WorldState& w, Rng& rng);
  void ensure_trees(const WorldState& w, MetricsCounters& m);

  AdvancePolicy adv_;
  std::optional<Tree> robot_tree_;
  std::optional<Tree> goal_tree_;
  WaypointCache cache_;
  std::optional<Path> path_;
  std::vector<int> changed_since_trim_;
};

class MprrtPlanner : public Planner {
 public:
  MprrtPlanner(bool advance_when_disconnected)
      : adv_{advance_when_disconnected} {}

  PlannerAction cycle(const WorldState& w, const std::vector<int>& changed,
                      Budget& budget, Rng& rng, MetricsCounters& m) override;
  void path_advanced(const Path& p) override;
  std::pair<int, int> tree_sizes() const override;
  const Path* current_path() const override {
    return path_ ? &*path_ : nullptr;
  }

  const std::deque<Tree>& forest() const { return forest_; }

 private:
  void admit_to_forest(Tree&& t);
  void prune_and_prepend(const WorldState& w, const std::vector<int>& changed,
                         MetricsCounters& m);

  AdvancePolicy adv_;
  std::optional<Tree> robot_tree_;
  std::optional<Tree> goal_tree_;
  std::deque<Tree> forest_;  // oldest at the front
  std::optional<Path> path_;
};

/// SelectSample: goal with p_goal, a random sub-tree root with p_forest when
/// the forest is non-empty, else uniform.
enum class SampleKind { goal, forest_root, uniform };
struct SampleChoice {
  SampleKind kind;
  Point point;
  int forest_index = -1;
};
SampleChoice mprrt_select_sample(const std::deque<Tree>& forest,
                                 const Point& goal, const WorldState& w,
                                 Rng& rng);
SampleChoice mprrt_select_sample(const std::deque<Tree>& forest,
                                 const Point& goal, const WorldState& w,
                                 Rng& rng, double p);

}  // namespace dynaplan
