#pragma once

#include <array>

#include "dynaplan/planner.hpp"
#include "dynaplan/rng.hpp"
#include "dynaplan/world.hpp"

namespace dynaplan {

inline constexpr int kEpnPopulationSize = 30;
inline constexpr int kEpnOperatorCount = 8;
inline constexpr double kEpnProbFloor = 0.01;
inline constexpr int kEpnUpdateEvery = 100;

struct EpnWeights {
  double dist = 1.0;
  double smooth = 1.0;
  double clear = 1.0;
};

struct PathNode {
  double x = 0.0;
  double y = 0.0;
  bool node_feasible = true;     ///< point not inside a visible obstacle
  bool segment_feasible = true;  ///< segment to the next node is clear
};

struct PathIndividual {
  std::vector<PathNode> nodes;  ///< first = robot position, last = goal
  double fitness = 0.0;
  bool feasible = false;

  Path to_path() const;
  static PathIndividual from_path(const Path& p);
};

/// True when a ranks strictly better than b: feasible beats unfeasible, then
/// lower fitness wins.
bool epn_better(const PathIndividual& a, const PathIndividual& b);

enum class EpnOperator {
  crossover = 0,
  mutate_fine,
  mutate_large,
  insert_delete,
  remove,
  swap_adjacent,
  smooth,
  repair,
};

struct OperatorTable {
  std::array<double, kEpnOperatorCount> probs;
  std::array<long long, kEpnOperatorCount> attempts{};
  std::array<long long, kEpnOperatorCount> successes{};

  OperatorTable() { probs.fill(1.0 / kEpnOperatorCount); }

  /// probs proportional to (successes+1)/(attempts+1), floored at
  /// kEpnProbFloor and renormalized; counters halve afterwards.
  void refresh();
};

/// Categorical draw over the table. The overload taking u lets tests force
/// the draw.
EpnOperator select_operator(const OperatorTable& t, Rng& rng);
EpnOperator select_operator(const OperatorTable& t, double u);

/// dist + smooth + clear for feasible paths, mu + eta otherwise; also
/// refreshes the per-node feasibility flags.
std::pair<double, bool> evaluate(PathIndividual& ind, const WorldState& w,
                                 const EpnWeights& weights,
                                 MetricsCounters& m);

/// Applies one genetic operator. Crossover takes two parents, everything else
/// one; offspring keep the endpoints pinned.
std::vector<PathIndividual> apply_operator(EpnOperator op,
                                           const std::vector<PathIndividual>& parents,
                                           const WorldState& w, Rng& rng,
                                           MetricsCounters& m);

class EpnPopulation {
 public:
  /// One seed individual (optional) plus randomly generated fillers with 1-10
  /// uniform interior nodes; everything evaluated.
  static EpnPopulation initialize(const WorldState& w,
                                  const Path* seed_path, Rng& rng,
                                  MetricsCounters& m);

  /// One operator application, elitist worst-replacement, operator stats,
  /// and the periodic probability refresh.
  void generation_step(const WorldState& w, Rng& rng, MetricsCounters& m);

  /// Pins every first node to the robot position, drops interior nodes that
  /// fell behind the robot, and re-evaluates all individuals.
  void rebase(const Point& robot, const WorldState& w, MetricsCounters& m);

  /// Worst individual replaced unconditionally. Used for RRT injection.
  void inject(PathIndividual ind, const WorldState& w, MetricsCounters& m);

  const PathIndividual& best() const;
  int best_index() const;
  int worst_index() const;

  const std::vector<PathIndividual>& individuals() const {
    return individuals_;
  }
  const OperatorTable& table() const { return table_; }
  long long generation() const { return generation_; }
  const EpnWeights& weights() const { return weights_; }

 private:
  std::vector<PathIndividual> individuals_;
  OperatorTable table_;
  EpnWeights weights_;
  long long generation_ = 0;
  long long applications_since_refresh_ = 0;
};

/// Pure EP/N navigator (random initial population).
class EpnPlanner : public Planner {
 public:
  PlannerAction cycle(const WorldState& w, const std::vector<int>& changed,
                      Budget& budget, Rng& rng, MetricsCounters& m) override;
  const Path* current_path() const override;

 protected:
  std::optional<EpnPopulation> pop_;
  std::optional<Path> best_path_;
};

}  // namespace dynaplan
