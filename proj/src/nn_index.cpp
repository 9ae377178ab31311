#include "dynaplan/nn_index.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dynaplan {

using detail::coord;
using detail::kDims;

KdTree::KdTree(std::vector<Entry> entries) : entries_(std::move(entries)) {
  build(0, static_cast<int>(entries_.size()), 0);
}

void KdTree::build(int lo, int hi, int depth) {
  if (hi - lo <= 1) return;
  const int axis = depth % kDims;
  const int mid = lo + (hi - lo - 1) / 2;  // lower median
  std::nth_element(entries_.begin() + lo, entries_.begin() + mid,
                   entries_.begin() + hi, [axis](const Entry& a,
                                                 const Entry& b) {
                     const double ca = coord(a.point, axis);
                     const double cb = coord(b.point, axis);
                     return ca < cb || (ca == cb && a.id < b.id);
                   });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

void KdTree::mark_dead(int id) {
  for (Entry& e : entries_)
    if (e.id == id) {
      e.alive = false;
      return;
    }
}

void KdTree::nearest_into(const Point& q, double& best_d2,
                          const Entry** best) const {
  search(0, static_cast<int>(entries_.size()), 0, q, best_d2, best);
}

void KdTree::search(int lo, int hi, int depth, const Point& q, double& best_d2,
                    const Entry** best) const {
  if (lo >= hi) return;
  const int axis = depth % kDims;
  const int mid = lo + (hi - lo - 1) / 2;
  const Entry& e = entries_[mid];
  if (e.alive) {
    const double d2 = squared_distance(q, e.point);
    if (d2 < best_d2 || (d2 == best_d2 && (*best == nullptr || e.id < (*best)->id))) {
      best_d2 = d2;
      *best = &e;
    }
  }
  const double diff = coord(q, axis) - coord(e.point, axis);
  const int near_lo = diff < 0.0 ? lo : mid + 1;
  const int near_hi = diff < 0.0 ? mid : hi;
  const int far_lo = diff < 0.0 ? mid + 1 : lo;
  const int far_hi = diff < 0.0 ? hi : mid;
  search(near_lo, near_hi, depth + 1, q, best_d2, best);
  if (diff * diff <= best_d2)
    search(far_lo, far_hi, depth + 1, q, best_d2, best);
}

void LogForest::insert(const Point& p, int id) {
  if (id <= last_id_)
    throw std::logic_error("LogForest::insert: ids must be increasing");
  last_id_ = id;
  std::vector<Entry> batch{{p, id, true}};
  while (!trees_.empty() && trees_.back().size() == batch.size()) {
    auto merged = trees_.back().take_entries();
    trees_.pop_back();
    reinserted_ += static_cast<long long>(merged.size());
    batch.insert(batch.end(), merged.begin(), merged.end());
  }
  trees_.emplace_back(std::move(batch));
  // Keep trees ordered by descending size so carries always hit the back.
  ++total_;
  ++n_alive_;
}

std::pair<int, Point> LogForest::nearest(const Point& q,
                                         MetricsCounters& m) const {
  if (n_alive_ == 0) throw std::logic_error("LogForest::nearest: empty index");
  ++m.nn_lookups;
  double best_d2 = std::numeric_limits<double>::infinity();
  const Entry* best = nullptr;
  for (const KdTree& t : trees_) t.nearest_into(q, best_d2, &best);
  return {best->id, best->point};
}

void LogForest::mark_dead(int id) {
  for (KdTree& t : trees_) t.mark_dead(id);
  --n_alive_;
}

std::vector<std::size_t> LogForest::tree_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(trees_.size());
  for (const KdTree& t : trees_) sizes.push_back(t.size());
  return sizes;
}

LogForest LogForest::rebuild_from(const std::vector<Entry>& entries) {
  std::vector<Entry> alive;
  for (const Entry& e : entries)
    if (e.alive) alive.push_back(e);
  std::sort(alive.begin(), alive.end(),
            [](const Entry& a, const Entry& b) { return a.id < b.id; });
  LogForest f;
  f.total_ = static_cast<long long>(alive.size());
  f.n_alive_ = static_cast<int>(alive.size());
  f.last_id_ = alive.empty() ? -1 : alive.back().id;
  // Largest power-of-two chunks first restores the binary size multiset.
  std::size_t offset = 0;
  for (int bit = 30; bit >= 0; --bit) {
    const std::size_t chunk = std::size_t{1} << bit;
    if (alive.size() - offset >= chunk &&
        (static_cast<std::size_t>(f.total_) & chunk)) {
      f.trees_.emplace_back(std::vector<Entry>(alive.begin() + offset,
                                               alive.begin() + offset + chunk));
      offset += chunk;
    }
  }
  return f;
}

}  // namespace dynaplan
