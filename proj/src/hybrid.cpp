#include "dynaplan/hybrid.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

namespace dynaplan {

namespace {

double wall_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Restart timers run on simulated time when the budget is deterministic and
// on wall time otherwise.
double clock_now(const WorldState& w, const Budget& budget) {
  return budget.deterministic() ? w.sim_time : wall_seconds();
}

bool in_bounds(const Point& p, const Rect& bounds) {
  return point_in_rect(p, bounds);
}

}  // namespace

Path arc(const Path& p, int first_col, double vicinity, const WorldState& w,
         Rng& rng, MetricsCounters& m) {
  const int n = static_cast<int>(p.points.size());
  if (first_col < 0 || first_col >= n - 1)
    throw std::out_of_range("arc: first_col");
  const double delta = rng.uniform(-vicinity, vicinity);
  const bool along_x = rng.coin_flip();
  Point n1 = p.points[first_col];
  Point n2 = p.points[first_col + 1];
  if (along_x) {
    n1.x += delta;
    n2.x += delta;
  } else {
    n1.y += delta;
    n2.y += delta;
  }
  if (!in_bounds(n1, w.bounds) || !in_bounds(n2, w.bounds)) return p;
  if (!segment_free(w, {p.points[first_col], n1}, m) ||
      !segment_free(w, {n1, n2}, m) ||
      !segment_free(w, {n2, p.points[first_col + 1]}, m))
    return p;
  Path out = p;
  out.points.insert(out.points.begin() + first_col + 1, {n1, n2});
  return out;
}

Path mut(const Path& p, int first_col, double vicinity, const WorldState& w,
         Rng& rng, MetricsCounters& m) {
  const int n = static_cast<int>(p.points.size());
  if (first_col < 0 || first_col >= n) throw std::out_of_range("mut: first_col");
  if (n < 3) return p;
  const int j = std::clamp(first_col, 1, n - 2);
  Point moved = p.points[j];
  moved.x += rng.uniform(-vicinity, vicinity);
  moved.y += rng.uniform(-vicinity, vicinity);
  if (!in_bounds(moved, w.bounds)) return p;
  if (!segment_free(w, {p.points[j - 1], moved}, m) ||
      !segment_free(w, {moved, p.points[j + 1]}, m))
    return p;
  Path out = p;
  out.points[j] = moved;
  return out;
}

Path post_process(const Path& p, const WorldState& w, MetricsCounters& m) {
  Path out = p;
  bool removed = true;
  while (removed) {
    removed = false;
    std::size_t i = 0;
    while (i + 2 < out.points.size()) {
      if (segment_free(w, {out.points[i], out.points[i + 2]}, m)) {
        out.points.erase(out.points.begin() + i + 1);
        removed = true;
      } else {
        ++i;
      }
    }
  }
  return out;
}

namespace {

// Walk the path for the next few simulated seconds and test the robot's
// position against movers extrapolated along their current velocities. A
// mover crossing the route ahead usually has cleared it by the time the
// robot arrives; only a predicted overlap is worth stopping for. One
// collision check is counted per probed instant.
bool space_time_clear(const WorldState& w, const Path& path, double seconds,
                      MetricsCounters& m) {
  constexpr double kStep = 0.1;
  Point pos = path.points.front();
  std::size_t seg = 0;
  for (double t = kStep; t <= seconds; t += kStep) {
    double left = w.robot_speed * kStep;
    while (left > 0.0 && seg + 1 < path.points.size()) {
      const Point& tgt = path.points[seg + 1];
      const double d = distance(pos, tgt);
      if (d <= left) {
        pos = tgt;
        left -= d;
        ++seg;
      } else {
        pos.x += (tgt.x - pos.x) / d * left;
        pos.y += (tgt.y - pos.y) / d * left;
        left = 0.0;
      }
    }
    ++m.collision_checks;
    for (const Obstacle& o : w.obstacles) {
      if (!o.visible || o.kind != ObstacleKind::moving) continue;
      Rect r = effective_shape(w, o);
      r.min_x += o.vx * t;
      r.min_y += o.vy * t;
      if (point_in_rect(pos, r)) return false;
    }
    if (seg + 1 >= path.points.size()) break;
  }
  return true;
}

// Spend the rest of this tick's budget growing the trees and keep the
// shortest post-processed connection instead of the first one found. The
// first bridge a bidirectional RRT makes is often a detour through a far
// corridor; later bridges in the same batch are frequently much shorter.
std::optional<Path> grow_best(Tree& ta, Tree& tb, const WorldState& w,
                              Budget& budget, Rng& rng, MetricsCounters& m) {
  std::optional<Path> best;
  double best_len = std::numeric_limits<double>::infinity();
  while (budget.take()) {
    if (auto p = grow_step(ta, tb, w, rng, m)) {
      Path q = post_process(std::move(*p), w, m);
      const double len = eval_path(q);
      if (len < best_len) {
        best_len = len;
        best = std::move(q);
      }
    }
  }
  return best;
}

}  // namespace

void MultiStagePlanner::start_search(const WorldState& w) {
  ta_.emplace(w.robot_pos);
  tb_.emplace(w.goal);
  path_.reset();
  candidate_.reset();
  settle_ticks_ = 0;
  blocking_.reset();
  phase_ = Phase::initial_rrt;
}

PlannerAction MultiStagePlanner::cycle(const WorldState& w,
                                       const std::vector<int>& changed,
                                       Budget& budget, Rng& rng,
                                       MetricsCounters& m) {
  (void)changed;
  const double vicinity = repair_vicinity(w);

  // While an obstacle sits on the robot or the goal no path can be feasible:
  // repair cannot move the pinned endpoints and a fresh tree cannot grow out
  // of (or into) the covered spot. Stand still and keep what we have.
  const auto covered = [&](const Point& p) {
    for (const Obstacle& o : w.obstacles)
      if (o.visible && point_in_rect(p, effective_shape(w, o))) return true;
    return false;
  };
  if (covered(w.robot_pos) || covered(w.goal)) {
    blocking_.reset();
    return PlannerAction::wait();
  }

  if (phase_ == Phase::initial_rrt && !ta_) start_search(w);

  // Trees are grown against the static scenery only. A mover parked in a
  // doorway at planning time would otherwise push the whole route through a
  // distant corridor; it is far cheaper to take the short route and let the
  // repair stage wait out (or bend around) movers as they are met.
  WorldState grow_world = w;
  for (Obstacle& o : grow_world.obstacles)
    if (o.kind == ObstacleKind::moving) o.visible = false;

  if (phase_ == Phase::initial_rrt) {
    // Keep searching for a few ticks after the first bridge: the first
    // connection a bidirectional RRT makes is frequently a long detour, and
    // a short settling period lets a better homotopy class surface.
    constexpr int kSettleTicks = 5;
    if (auto p = grow_best(*ta_, *tb_, grow_world, budget, rng, m)) {
      if (!candidate_ || eval_path(*p) < eval_path(*candidate_))
        candidate_ = std::move(*p);
    }
    if (!candidate_) return PlannerAction::wait();
    if (settle_ticks_++ < kSettleTicks) return PlannerAction::wait();
    path_ = std::move(candidate_);
    candidate_.reset();
    phase_ = Phase::navigating;
  }

  if (path_->points.empty()) path_->points = {w.robot_pos, w.goal};
  path_->points.front() = w.robot_pos;

  FeasReport rep = check_path(w, *path_, m);
  if (rep.feasible) {
    blocking_.reset();
  } else {
    const int blocker = *rep.blocking_obstacle;
    const double now = clock_now(w, budget);
    if (blocking_) {
      // The path has stayed blocked since blocking_ was set (the tracker
      // resets whenever a repair lands). A persisting single blocker is the
      // common case; with several movers the front blocker id can alternate
      // while the path never clears, which deserves the same restart.
      blocking_->first = blocker;
      if (now - blocking_->second >= 1.0) {
        // Restart only when the static scenery itself blocks the path
        // (e.g. a newly discovered obstacle). A mover sitting on an
        // otherwise valid route always clears eventually, and re-planning
        // over the unchanged static world could only swap the route for a
        // random, often worse one.
        if (!check_path(grow_world, *path_, m).feasible) {
          ++restarts_;
          start_search(w);
          return PlannerAction::wait();
        }
        blocking_->second = now;  // statically fine: re-arm and keep waiting
      }
    } else {
      blocking_ = {blocker, now};
    }

    // Informed local search around the first collision, one arc+mut pair
    // per budget unit, re-checking after each operator. mut aims at the
    // colliding vertex itself: when an obstacle sits on a path node, only
    // moving that node can clear the two segments that end there.
    const auto mut_target = [&](const FeasReport& r) {
      const int fc = *r.first_collision_vertex;
      for (const Obstacle& o : w.obstacles) {
        if (!o.visible || o.id != *r.blocking_obstacle) continue;
        const Rect shape = effective_shape(w, o);
        if (point_in_rect(path_->points[fc + 1], shape)) return fc + 1;
        break;
      }
      return fc;
    };
    const Path before_repair = *path_;
    while (!rep.feasible && budget.take()) {
      *path_ = arc(*path_, *rep.first_collision_vertex, vicinity, w, rng, m);
      rep = check_path(w, *path_, m);
      if (rep.feasible) break;
      *path_ = mut(*path_, mut_target(rep), vicinity, w, rng, m);
      rep = check_path(w, *path_, m);
    }
    // A repair that only succeeds by detouring far from the old route costs
    // more than briefly waiting for the mover to pass; keep the short path
    // and stand by instead.
    if (rep.feasible &&
        eval_path(post_process(*path_, w, m)) >
            eval_path(before_repair) + 0.5 * vicinity) {
      *path_ = before_repair;
      rep = check_path(w, *path_, m);
    }
    if (rep.feasible) blocking_.reset();
  }

  *path_ = post_process(*path_, w, m);
  if (rep.feasible && path_->points.size() >= 2)
    return PlannerAction::move(*path_);

  // Repair failed, but if the blocked segment is still far ahead the robot
  // keeps going: movers usually clear the spot before it gets there, and
  // re-checking every tick stops it in time when one does not. This only
  // makes sense when the blocker actually is a mover; a static obstacle
  // (say, a freshly discovered one) never clears, so approaching it would
  // just park the robot against the wall until the restart timer fires.
  if (!rep.feasible && path_->points.size() >= 2) {
    rep = check_path(w, *path_, m);
    if (rep.feasible) return PlannerAction::move(*path_);
    bool mover_blocks = false;
    for (const Obstacle& o : w.obstacles)
      if (o.id == *rep.blocking_obstacle)
        mover_blocks = o.kind == ObstacleKind::moving;
    if (!mover_blocks) return PlannerAction::wait();
    double to_block = 0.0;
    for (int i = 0; i < *rep.first_collision_vertex; ++i)
      to_block += distance(path_->points[i], path_->points[i + 1]);
    // Stop only just short of the blocked segment: the free prefix is safe
    // to use, and being next to the spot means the robot resumes the
    // instant the mover clears it. Closer in, keep going anyway while the
    // extrapolated movers stay off the robot's predicted positions.
    if (to_block > w.robot_half ||
        space_time_clear(w, *path_, 1.0, m)) {
      blocking_.reset();
      return PlannerAction::move(*path_);
    }
  }
  return PlannerAction::wait();
}

void MultiStagePlanner::path_advanced(const Path& p) {
  if (phase_ == Phase::navigating) path_ = p;
}

std::pair<int, int> MultiStagePlanner::tree_sizes() const {
  return {ta_ ? static_cast<int>(ta_->size()) : 0,
          tb_ ? static_cast<int>(tb_->size()) : 0};
}

const Path* MultiStagePlanner::current_path() const {
  return path_ ? &*path_ : nullptr;
}

PlannerAction RrtEpnPlanner::cycle(const WorldState& w,
                                   const std::vector<int>& changed,
                                   Budget& budget, Rng& rng,
                                   MetricsCounters& m) {
  (void)changed;

  if (phase_ == Phase::initial_rrt) {
    if (!ta_) {
      ta_.emplace(w.robot_pos);
      tb_.emplace(w.goal);
    }
    while (budget.take()) {
      if (auto p = grow_step(*ta_, *tb_, w, rng, m)) {
        pop_ = EpnPopulation::initialize(w, &*p, rng, m);
        phase_ = Phase::navigating;
        last_feasible_clock_ = clock_now(w, budget);
        break;
      }
    }
    if (phase_ == Phase::initial_rrt) return PlannerAction::wait();
  } else {
    pop_->rebase(w.robot_pos, w, m);
  }

  const double now = clock_now(w, budget);
  if (!pop_->best().feasible && now - last_feasible_clock_ >= 2.0) {
    // Stuck: spend this cycle growing a fresh RRT path and inject it.
    Tree ta(w.robot_pos), tb(w.goal);
    while (budget.take()) {
      if (auto p = grow_step(ta, tb, w, rng, m)) {
        pop_->inject(PathIndividual::from_path(*p), w, m);
        ++injections_;
        last_feasible_clock_ = now;
        break;
      }
    }
  } else {
    while (budget.take()) pop_->generation_step(w, rng, m);
  }

  const PathIndividual& best = pop_->best();
  if (best.feasible && best.nodes.size() >= 2) {
    last_feasible_clock_ = now;
    best_path_ = best.to_path();
    return PlannerAction::move(*best_path_, /*track=*/false);
  }
  best_path_.reset();
  return PlannerAction::wait();
}

std::pair<int, int> RrtEpnPlanner::tree_sizes() const {
  return {ta_ ? static_cast<int>(ta_->size()) : 0,
          tb_ ? static_cast<int>(tb_->size()) : 0};
}

const Path* RrtEpnPlanner::current_path() const {
  return best_path_ ? &*best_path_ : nullptr;
}

}  // namespace dynaplan
