#include "dynaplan/replanners.hpp"

#include <algorithm>

#include "dynaplan/hybrid.hpp"

namespace dynaplan {

void cache_store(WaypointCache& c, const Path& path, Rng& rng) {
  if (static_cast<int>(c.slots.size()) < c.capacity)
    c.slots.resize(c.capacity);
  for (const Point& v : path.points) {
    if (c.count < c.capacity) {
      c.slots[c.count++] = v;
    } else {
      c.slots[rng.below(c.capacity)] = v;
    }
  }
}

Point choose_target(const WaypointCache& c, const Point& goal,
                    const WorldState& w, Rng& rng, double p) {
  if (p < kGoalBias) return goal;
  if (p < kGoalBias + kWaypointProb && c.count > 0)
    return c.slots[rng.below(c.count)];
  return random_config(w, rng);
}

Point choose_target(const WaypointCache& c, const Point& goal,
                    const WorldState& w, Rng& rng) {
  return choose_target(c, goal, w, rng, rng.uniform01());
}

namespace {

std::vector<Obstacle> collect_changed(const WorldState& w,
                                      const std::vector<int>& ids) {
  std::vector<Obstacle> out;
  for (const Obstacle& o : w.obstacles)
    if (o.visible && std::find(ids.begin(), ids.end(), o.id) != ids.end())
      out.push_back(o);
  return out;
}

bool edge_hits_changed(const Segment& edge,
                       const std::vector<Obstacle>& changed,
                       const WorldState& w, MetricsCounters& m) {
  ++m.collision_checks;
  for (const Obstacle& o : changed)
    if (segment_intersects_rect(edge, effective_shape(w, o))) return true;
  return false;
}

bool point_in_changed(const Point& p, const std::vector<Obstacle>& changed,
                      const WorldState& w) {
  for (const Obstacle& o : changed)
    if (point_in_rect(p, effective_shape(w, o))) return true;
  return false;
}

/// Rebuild a tree from the survivor subset, preserving relative order.
/// keep[i] implies keep[parent(i)] except for the component roots, whose
/// parents map to -1.
Tree rebuild_subset(const Tree& t, const std::vector<char>& keep, int root) {
  std::vector<int> remap(t.size(), -1);
  Tree out(t.node(root).config);
  remap[root] = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!keep[i] || static_cast<int>(i) == root) continue;
    const int parent = t.node(static_cast<int>(i)).parent;
    const int new_parent = parent >= 0 ? remap[parent] : -1;
    if (new_parent < 0) continue;  // caller guarantees this never triggers
    remap[i] = out.add_node(t.node(static_cast<int>(i)).config, new_parent);
  }
  return out;
}

Path pin_front(Path p, const Point& robot) {
  if (distance(p.points.front(), robot) > 1e-9)
    p.points.insert(p.points.begin(), robot);
  else
    p.points.front() = robot;
  return p;
}

}  // namespace

Tree invalidate_and_trim(const Tree& t, const std::vector<Obstacle>& changed,
                         const WorldState& w, MetricsCounters& m) {
  const std::size_t n = t.size();
  std::vector<char> invalid(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    const TreeNode& node = t.node(static_cast<int>(i));
    if (invalid[node.parent]) {
      invalid[i] = 1;  // parent-first scan propagates to descendants
      continue;
    }
    if (edge_hits_changed({t.node(node.parent).config, node.config}, changed,
                          w, m))
      invalid[i] = 1;
  }
  std::vector<char> keep(n);
  for (std::size_t i = 0; i < n; ++i) keep[i] = !invalid[i];
  keep[0] = 1;  // root never trimmed
  return rebuild_subset(t, keep, 0);
}

PrunePieces prune_components(const Tree& t,
                             const std::vector<Obstacle>& changed,
                             const WorldState& w, MetricsCounters& m) {
  const std::size_t n = t.size();
  std::vector<char> killed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = t.node(static_cast<int>(i));
    if (point_in_changed(node.config, changed, w)) {
      killed[i] = 1;
      continue;
    }
    if (node.parent >= 0 &&
        edge_hits_changed({t.node(node.parent).config, node.config}, changed,
                          w, m))
      killed[i] = 1;
  }

  // Label connected components among survivors; a survivor whose parent was
  // killed (or is in no component) roots a new component.
  std::vector<int> comp(n, -1);
  std::vector<int> comp_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (killed[i]) continue;
    const int parent = t.node(static_cast<int>(i)).parent;
    if (parent >= 0 && comp[parent] >= 0) {
      comp[i] = comp[parent];
    } else {
      comp[i] = static_cast<int>(comp_root.size());
      comp_root.push_back(static_cast<int>(i));
    }
  }

  PrunePieces pieces;
  for (std::size_t c = 0; c < comp_root.size(); ++c) {
    std::vector<char> keep(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      keep[i] = comp[i] == static_cast<int>(c);
    Tree piece = rebuild_subset(t, keep, comp_root[c]);
    if (!killed[0] && comp_root[c] == 0)
      pieces.rooted = std::move(piece);
    else
      pieces.severed.push_back(std::move(piece));
  }
  return pieces;
}

std::optional<Tree> reroot_at(const Tree& t, const Point& new_root,
                              const WorldState& w, MetricsCounters& m) {
  const int anchor = t.nearest(new_root, m);
  if (!segment_free(w, {new_root, t.node(anchor).config}, m))
    return std::nullopt;

  // Re-hang the whole tree below the anchor via breadth-first traversal of
  // the undirected parent/child adjacency.
  std::vector<std::vector<int>> adj(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const int parent = t.node(static_cast<int>(i)).parent;
    if (parent >= 0) {
      adj[parent].push_back(static_cast<int>(i));
      adj[i].push_back(parent);
    }
  }
  Tree out(new_root);
  std::vector<int> remap(t.size(), -1);
  std::vector<int> queue{anchor};
  remap[anchor] = out.add_node(t.node(anchor).config, 0);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int cur = queue[head];
    for (int nb : adj[cur]) {
      if (remap[nb] >= 0) continue;
      remap[nb] = out.add_node(t.node(nb).config, remap[cur]);
      queue.push_back(nb);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DRRT

Point DrrtPlanner::sample_target(const WorldState& w, Rng& rng) {
  if (rng.uniform01() < kDrrtVicinityBias && cache_.count > 0) {
    const Point center = cache_.slots[rng.below(cache_.count)];
    const double vicinity = 4.0 * w.robot_half;
    return {std::clamp(rng.uniform(center.x - vicinity, center.x + vicinity),
                       w.bounds.min_x, w.bounds.max_x()),
            std::clamp(rng.uniform(center.y - vicinity, center.y + vicinity),
                       w.bounds.min_y, w.bounds.max_y())};
  }
  return choose_target(cache_, goal_tree_->root_config(), w, rng);
}

void DrrtPlanner::ensure_trees(const WorldState& w, MetricsCounters& m) {
  if (!goal_tree_) goal_tree_.emplace(w.goal);
  if (!robot_tree_) {
    robot_tree_.emplace(w.robot_pos);
    return;
  }
  if (robot_tree_->root_config() == w.robot_pos) return;
  if (auto rr = reroot_at(*robot_tree_, w.robot_pos, w, m))
    robot_tree_ = std::move(*rr);
  else
    robot_tree_.emplace(w.robot_pos);
}

PlannerAction DrrtPlanner::cycle(const WorldState& w,
                                 const std::vector<int>& changed,
                                 Budget& budget, Rng& rng,
                                 MetricsCounters& m) {
  for (int id : changed)
    if (std::find(changed_since_trim_.begin(), changed_since_trim_.end(),
                  id) == changed_since_trim_.end())
      changed_since_trim_.push_back(id);

  if (path_ && !check_path(w, *path_, m).feasible) path_.reset();

  if (!path_) {
    if (!changed_since_trim_.empty() && robot_tree_) {
      const auto obs = collect_changed(w, changed_since_trim_);
      robot_tree_ = invalidate_and_trim(*robot_tree_, obs, w, m);
      goal_tree_ = invalidate_and_trim(*goal_tree_, obs, w, m);
    }
    changed_since_trim_.clear();
    ensure_trees(w, m);
    while (!path_ && budget.take()) {
      if (auto p = grow_step_toward(*robot_tree_, *goal_tree_,
                                    sample_target(w, rng), w, m)) {
        path_ = post_process(pin_front(std::move(*p), w.robot_pos), w, m);
        cache_store(cache_, *path_, rng);
      }
    }
  }

  if (path_) return PlannerAction::move(*path_);
  if (adv_.advance_when_disconnected && robot_tree_ &&
      robot_tree_->size() > 1) {
    Path toward{robot_tree_->branch_to(robot_tree_->closest_to(w.goal))};
    toward = pin_front(std::move(toward), w.robot_pos);
    if (toward.size() >= 2 && eval_path(toward) > 0.0)
      return PlannerAction::move(std::move(toward), /*track=*/false);
  }
  return PlannerAction::wait();
}

void DrrtPlanner::path_advanced(const Path& p) { path_ = p; }

std::pair<int, int> DrrtPlanner::tree_sizes() const {
  return {robot_tree_ ? static_cast<int>(robot_tree_->size()) : 0,
          goal_tree_ ? static_cast<int>(goal_tree_->size()) : 0};
}

// ---------------------------------------------------------------------------
// MP-RRT

SampleChoice mprrt_select_sample(const std::deque<Tree>& forest,
                                 const Point& goal, const WorldState& w,
                                 Rng& rng, double p) {
  if (p < kMprrtGoalProb) return {SampleKind::goal, goal};
  if (p < kMprrtGoalProb + kForestProb && !forest.empty()) {
    const int i = rng.below(static_cast<int>(forest.size()));
    return {SampleKind::forest_root, forest[i].root_config(), i};
  }
  return {SampleKind::uniform, random_config(w, rng)};
}

SampleChoice mprrt_select_sample(const std::deque<Tree>& forest,
                                 const Point& goal, const WorldState& w,
                                 Rng& rng) {
  return mprrt_select_sample(forest, goal, w, rng, rng.uniform01());
}

void MprrtPlanner::admit_to_forest(Tree&& t) {
  if (static_cast<int>(t.size()) < kForestMinSave) return;
  if (static_cast<int>(forest_.size()) >= kForestMax) forest_.pop_front();
  forest_.push_back(std::move(t));
}

void MprrtPlanner::prune_and_prepend(const WorldState& w,
                                     const std::vector<int>& changed,
                                     MetricsCounters& m) {
  const auto obs = collect_changed(w, changed);
  if (obs.empty()) return;
  auto prune_main = [&](std::optional<Tree>& tree) {
    if (!tree) return;
    PrunePieces pieces = prune_components(*tree, obs, w, m);
    tree = std::move(pieces.rooted);
    for (Tree& s : pieces.severed) admit_to_forest(std::move(s));
  };
  prune_main(robot_tree_);
  prune_main(goal_tree_);

  std::deque<Tree> kept;
  for (Tree& f : forest_) {
    PrunePieces pieces = prune_components(f, obs, w, m);
    if (pieces.rooted &&
        static_cast<int>(pieces.rooted->size()) >= kForestMinSave)
      kept.push_back(std::move(*pieces.rooted));
    for (Tree& s : pieces.severed)
      if (static_cast<int>(s.size()) >= kForestMinSave)
        kept.push_back(std::move(s));
  }
  forest_ = std::move(kept);
  while (static_cast<int>(forest_.size()) > kForestMax) forest_.pop_front();
}

PlannerAction MprrtPlanner::cycle(const WorldState& w,
                                  const std::vector<int>& changed,
                                  Budget& budget, Rng& rng,
                                  MetricsCounters& m) {
  prune_and_prepend(w, changed, m);

  if (path_ && !check_path(w, *path_, m).feasible) path_.reset();

  if (!path_) {
    if (!goal_tree_) goal_tree_.emplace(w.goal);
    if (!robot_tree_) {
      robot_tree_.emplace(w.robot_pos);
    } else if (!(robot_tree_->root_config() == w.robot_pos)) {
      if (auto rr = reroot_at(*robot_tree_, w.robot_pos, w, m)) {
        robot_tree_ = std::move(*rr);
      } else {
        admit_to_forest(std::move(*robot_tree_));
        robot_tree_.emplace(w.robot_pos);
      }
    }

    while (!path_ && budget.take()) {
      const SampleChoice choice =
          mprrt_select_sample(forest_, goal_tree_->root_config(), w, rng);
      if (choice.kind == SampleKind::forest_root) {
        const GrowthResult r = connect(*robot_tree_, choice.point, w, m);
        if (r.kind == GrowthKind::reached) {
          // Splice the whole sub-tree in, re-parenting its root onto the
          // node that reached it.
          const Tree& f = forest_[choice.forest_index];
          std::vector<int> remap(f.size(), -1);
          remap[0] = r.node;
          for (std::size_t i = 1; i < f.size(); ++i)
            remap[i] = robot_tree_->add_node(
                f.node(static_cast<int>(i)).config,
                remap[f.node(static_cast<int>(i)).parent]);
          forest_.erase(forest_.begin() + choice.forest_index);
          const GrowthResult rb = connect(*goal_tree_, choice.point, w, m);
          if (rb.kind == GrowthKind::reached)
            path_ = extract_path(*robot_tree_, *goal_tree_, r.node, rb.node);
        }
      } else {
        path_ = grow_step_toward(*robot_tree_, *goal_tree_, choice.point, w,
                                 m);
      }
      if (path_)
        path_ = post_process(pin_front(std::move(*path_), w.robot_pos), w, m);
    }
  }

  if (path_) return PlannerAction::move(*path_);
  if (adv_.advance_when_disconnected && robot_tree_ &&
      robot_tree_->size() > 1) {
    Path toward{robot_tree_->branch_to(robot_tree_->closest_to(w.goal))};
    toward = pin_front(std::move(toward), w.robot_pos);
    if (toward.size() >= 2 && eval_path(toward) > 0.0)
      return PlannerAction::move(std::move(toward), /*track=*/false);
  }
  return PlannerAction::wait();
}

void MprrtPlanner::path_advanced(const Path& p) { path_ = p; }

std::pair<int, int> MprrtPlanner::tree_sizes() const {
  return {robot_tree_ ? static_cast<int>(robot_tree_->size()) : 0,
          goal_tree_ ? static_cast<int>(goal_tree_->size()) : 0};
}

}  // namespace dynaplan
