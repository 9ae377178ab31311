#pragma once

#include <optional>
#include <vector>

#include "dynaplan/nn_index.hpp"
#include "dynaplan/rng.hpp"
#include "dynaplan/world.hpp"

namespace dynaplan {

struct TreeNode {
  Point config;
  int parent = -1;  ///< node index; -1 only for the root at index 0
  bool valid = true;
};

/// Rooted RRT tree. Parent indices always precede children, so a single
/// forward scan visits parents first.
class Tree {
 public:
  explicit Tree(Point root);

  int add_node(const Point& config, int parent);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  Point root_config() const { return nodes_.front().config; }

  /// Index of the node closest to q (ties by smaller index). Counts one nn
  /// lookup.
  int nearest(const Point& q, MetricsCounters& m) const;

  const LogForest& index() const { return index_; }

  /// Waypoints from the root to node i, inclusive.
  std::vector<Point> branch_to(int i) const;

  /// Linear scan for the node closest to q in Euclidean distance; used for
  /// goal-directed movement, not for growth, so it is not counted as a
  /// nearest-neighbor lookup.
  int closest_to(const Point& q) const;

 private:
  std::vector<TreeNode> nodes_;
  LogForest index_;
};

enum class GrowthKind { reached, advanced, trapped };

struct GrowthResult {
  GrowthKind kind = GrowthKind::trapped;
  int node = -1;  ///< valid for reached/advanced
};

/// Uniform sample over the bounds rectangle.
Point random_config(const WorldState& w, Rng& rng);

inline constexpr double kGoalBias = 0.1;

/// Single extension toward q. If the whole segment from the nearest node is
/// free the sample itself is added (reached). Otherwise the midpoint between
/// the nearest node and the first collision point is added (advanced) when
/// that stub is free and longer than min_step; else trapped.
GrowthResult extend(Tree& t, const Point& q, const WorldState& w,
                    MetricsCounters& m);

/// Repeats extend until the result is not advanced.
GrowthResult connect(Tree& t, const Point& q, const WorldState& w,
                     MetricsCounters& m);

/// One bidirectional iteration toward an explicit target: extend ta, and when
/// the target itself was added, connect tb to the same point; a double reach
/// merges the trees into a path from ta's root to tb's root.
std::optional<Path> grow_step_toward(Tree& ta, Tree& tb, const Point& target,
                                     const WorldState& w, MetricsCounters& m);

/// grow_step_toward with the default goal-biased sampler (goal with
/// probability kGoalBias, else uniform).
std::optional<Path> grow_step(Tree& ta, Tree& tb, const WorldState& w,
                              Rng& rng, MetricsCounters& m);

/// Root-to-root path through two bridge nodes that share one configuration.
Path extract_path(const Tree& ta, const Tree& tb, int bridge_a, int bridge_b);

}  // namespace dynaplan
