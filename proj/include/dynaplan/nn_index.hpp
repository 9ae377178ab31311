#pragma once

#include <vector>

#include "dynaplan/geometry.hpp"
#include "dynaplan/world.hpp"

namespace dynaplan {

struct Entry {
  Point point;
  int id = 0;
  bool alive = true;
};

namespace detail {
constexpr int kDims = 2;
inline double coord(const Point& p, int axis) { return axis == 0 ? p.x : p.y; }
}  // namespace detail

/// Balanced kd-tree over a fixed entry set. Split axis cycles with depth and
/// the split point is the lower median along that axis.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry> take_entries() { return std::move(entries_); }

  void mark_dead(int id);

  /// Updates (best squared distance, best entry pointer); ties go to the
  /// smaller id.
  void nearest_into(const Point& q, double& best_d2, const Entry** best) const;

 private:
  void build(int lo, int hi, int depth);
  void search(int lo, int hi, int depth, const Point& q, double& best_d2,
              const Entry** best) const;

  std::vector<Entry> entries_;  // arranged in kd order (median at midpoint)
};

/// Incremental nearest-neighbor index kept as a forest of balanced kd-trees
/// whose sizes follow the binary representation of the insert count: carrying
/// a bit merges and rebuilds the affected trees.
class LogForest {
 public:
  /// id must exceed every previously inserted id.
  void insert(const Point& p, int id);

  /// Smallest-distance alive entry (ties by smaller id). Throws when empty.
  /// Counts one nn lookup.
  std::pair<int, Point> nearest(const Point& q, MetricsCounters& m) const;

  void mark_dead(int id);

  int alive_count() const { return n_alive_; }
  long long total_inserted() const { return total_; }
  /// Points re-entered into a tree by carry merges; used to bound amortized
  /// rebuild cost.
  long long reinsert_count() const { return reinserted_; }

  std::vector<std::size_t> tree_sizes() const;

  static LogForest rebuild_from(const std::vector<Entry>& entries);

 private:
  std::vector<KdTree> trees_;
  long long total_ = 0;
  long long reinserted_ = 0;
  int n_alive_ = 0;
  int last_id_ = -1;
};

}  // namespace dynaplan
