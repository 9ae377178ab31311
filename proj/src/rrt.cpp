#include "dynaplan/rrt.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynaplan {

Tree::Tree(Point root) {
  nodes_.push_back({root, -1, true});
  index_.insert(root, 0);
}

int Tree::add_node(const Point& config, int parent) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back({config, parent, true});
  index_.insert(config, idx);
  return idx;
}

int Tree::nearest(const Point& q, MetricsCounters& m) const {
  return index_.nearest(q, m).first;
}

std::vector<Point> Tree::branch_to(int i) const {
  std::vector<Point> rev;
  for (int n = i; n != -1; n = nodes_[n].parent) rev.push_back(nodes_[n].config);
  std::reverse(rev.begin(), rev.end());
  return rev;
}

int Tree::closest_to(const Point& q) const {
  int best = 0;
  double best_d2 = squared_distance(q, nodes_[0].config);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double d2 = squared_distance(q, nodes_[i].config);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Point random_config(const WorldState& w, Rng& rng) {
  return {rng.uniform(w.bounds.min_x, w.bounds.max_x()),
          rng.uniform(w.bounds.min_y, w.bounds.max_y())};
}

GrowthResult extend(Tree& t, const Point& q, const WorldState& w,
                    MetricsCounters& m) {
  const int near = t.nearest(q, m);
  const Point from = t.node(near).config;
  if (from == q) return {GrowthKind::reached, near};

  const Segment seg{from, q};
  const auto hit = first_hit(w, seg, m);
  if (!hit) return {GrowthKind::reached, t.add_node(q, near)};

  const Point collision = lerp(from, q, hit->first);
  const Point mid = midpoint(from, collision);
  const double min_step = w.robot_half;
  if (distance(from, mid) <= min_step) return {GrowthKind::trapped, -1};
  if (!segment_free(w, {from, mid}, m)) return {GrowthKind::trapped, -1};
  return {GrowthKind::advanced, t.add_node(mid, near)};
}

GrowthResult connect(Tree& t, const Point& q, const WorldState& w,
                     MetricsCounters& m) {
  GrowthResult r;
  do {
    r = extend(t, q, w, m);
  } while (r.kind == GrowthKind::advanced);
  return r;
}

std::optional<Path> grow_step_toward(Tree& ta, Tree& tb, const Point& target,
                                     const WorldState& w, MetricsCounters& m) {
  const GrowthResult ra = extend(ta, target, w, m);
  if (ra.kind == GrowthKind::reached) {
    const GrowthResult rb = connect(tb, target, w, m);
    if (rb.kind == GrowthKind::reached)
      return extract_path(ta, tb, ra.node, rb.node);
  } else {
    extend(tb, target, w, m);
  }
  return std::nullopt;
}

std::optional<Path> grow_step(Tree& ta, Tree& tb, const WorldState& w,
                              Rng& rng, MetricsCounters& m) {
  const Point target = rng.uniform01() < kGoalBias ? tb.root_config()
                                                   : random_config(w, rng);
  return grow_step_toward(ta, tb, target, w, m);
}

Path extract_path(const Tree& ta, const Tree& tb, int bridge_a, int bridge_b) {
  if (!(ta.node(bridge_a).config == tb.node(bridge_b).config))
    throw std::logic_error("extract_path: bridge configs differ");
  Path p;
  p.points = ta.branch_to(bridge_a);
  // Append tb's branch from the bridge back to its root, skipping the bridge
  // point itself.
  for (int n = tb.node(bridge_b).parent; n != -1; n = tb.node(n).parent)
    p.points.push_back(tb.node(n).config);
  return p;
}

}  // namespace dynaplan
