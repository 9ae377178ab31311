#include "dynaplan/epn.hpp"

#include "dynaplan/rrt.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace dynaplan {

Path PathIndividual::to_path() const {
  Path p;
  p.points.reserve(nodes.size());
  for (const PathNode& n : nodes) p.points.push_back({n.x, n.y});
  return p;
}

PathIndividual PathIndividual::from_path(const Path& p) {
  PathIndividual ind;
  ind.nodes.reserve(p.points.size());
  for (const Point& q : p.points) ind.nodes.push_back({q.x, q.y, true, true});
  return ind;
}

bool epn_better(const PathIndividual& a, const PathIndividual& b) {
  if (a.feasible != b.feasible) return a.feasible;
  return a.fitness < b.fitness;
}

void OperatorTable::refresh() {
  double weights[kEpnOperatorCount];
  double sum = 0.0;
  for (int i = 0; i < kEpnOperatorCount; ++i) {
    weights[i] = static_cast<double>(successes[i] + 1) / (attempts[i] + 1);
    sum += weights[i];
  }
  const double spread = 1.0 - kEpnOperatorCount * kEpnProbFloor;
  for (int i = 0; i < kEpnOperatorCount; ++i) {
    probs[i] = kEpnProbFloor + spread * weights[i] / sum;
    attempts[i] /= 2;
    successes[i] /= 2;
  }
}

EpnOperator select_operator(const OperatorTable& t, double u) {
  double acc = 0.0;
  for (int i = 0; i < kEpnOperatorCount; ++i) {
    acc += t.probs[i];
    if (u < acc) return static_cast<EpnOperator>(i);
  }
  return static_cast<EpnOperator>(kEpnOperatorCount - 1);
}

EpnOperator select_operator(const OperatorTable& t, Rng& rng) {
  return select_operator(t, rng.uniform01());
}

namespace {

Point node_point(const PathNode& n) { return {n.x, n.y}; }

double turn_angle(const Point& prev, const Point& at, const Point& next) {
  const double ax = at.x - prev.x, ay = at.y - prev.y;
  const double bx = next.x - at.x, by = next.y - at.y;
  if ((ax == 0.0 && ay == 0.0) || (bx == 0.0 && by == 0.0)) return 0.0;
  return std::fabs(std::atan2(ax * by - ay * bx, ax * bx + ay * by));
}

bool point_blocked(const WorldState& w, const Point& p) {
  for (const Obstacle& o : w.obstacles)
    if (o.visible && point_in_rect(p, effective_shape(w, o))) return true;
  return false;
}

double segment_clearance(const WorldState& w, const Segment& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const Obstacle& o : w.obstacles)
    if (o.visible)
      best = std::min(best, segment_rect_distance(s, effective_shape(w, o)));
  return best;
}

Point clamp_to_bounds(Point p, const Rect& bounds) {
  p.x = std::clamp(p.x, bounds.min_x, bounds.max_x());
  p.y = std::clamp(p.y, bounds.min_y, bounds.max_y());
  return p;
}

}  // namespace

std::pair<double, bool> evaluate(PathIndividual& ind, const WorldState& w,
                                 const EpnWeights& weights,
                                 MetricsCounters& m) {
  const std::size_t n = ind.nodes.size();
  int mu = 0;
  int unfeasible = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ind.nodes[i].node_feasible = !point_blocked(w, node_point(ind.nodes[i]));
    if (i + 1 < n) {
      const int hits = segment_hit_count(
          w, {node_point(ind.nodes[i]), node_point(ind.nodes[i + 1])}, m);
      ind.nodes[i].segment_feasible = hits == 0;
      mu += hits;
      if (hits > 0) ++unfeasible;
    } else {
      ind.nodes[i].segment_feasible = true;
    }
  }

  if (mu > 0) {
    const double eta = static_cast<double>(mu) / unfeasible;
    ind.fitness = mu + eta;
    ind.feasible = false;
    return {ind.fitness, false};
  }

  double dist = 0.0, smooth = 0.0, clear = 0.0;
  const double tau = 2.0 * w.robot_half;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Segment seg{node_point(ind.nodes[i]), node_point(ind.nodes[i + 1])};
    dist += distance(seg.a, seg.b);
    if (weights.clear != 0.0)
      clear += std::max(0.0, tau - segment_clearance(w, seg));
  }
  for (std::size_t i = 1; i + 1 < n; ++i)
    smooth += turn_angle(node_point(ind.nodes[i - 1]), node_point(ind.nodes[i]),
                         node_point(ind.nodes[i + 1]));
  ind.fitness =
      weights.dist * dist + weights.smooth * smooth + weights.clear * clear;
  ind.feasible = true;
  return {ind.fitness, true};
}

namespace {

// ---- operators; all keep the endpoints pinned ----

std::vector<PathIndividual> op_crossover(const PathIndividual& a,
                                         const PathIndividual& b, Rng& rng) {
  const int la = static_cast<int>(a.nodes.size());
  const int lb = static_cast<int>(b.nodes.size());
  const int ca = 1 + rng.below(la - 1);  // slice index into a
  const int cb = 1 + rng.below(lb - 1);
  PathIndividual o1, o2;
  o1.nodes.assign(a.nodes.begin(), a.nodes.begin() + ca);
  o1.nodes.insert(o1.nodes.end(), b.nodes.begin() + cb, b.nodes.end());
  o2.nodes.assign(b.nodes.begin(), b.nodes.begin() + cb);
  o2.nodes.insert(o2.nodes.end(), a.nodes.begin() + ca, a.nodes.end());
  o1.nodes.front() = a.nodes.front();
  o1.nodes.back() = b.nodes.back();
  o2.nodes.front() = b.nodes.front();
  o2.nodes.back() = a.nodes.back();
  return {o1, o2};
}

std::vector<PathIndividual> op_mutate_fine(const PathIndividual& parent,
                                           const WorldState& w, Rng& rng,
                                           MetricsCounters& m) {
  if (!parent.feasible || parent.nodes.size() < 3) return {parent};
  PathIndividual o = parent;
  const int j = 1 + rng.below(static_cast<int>(o.nodes.size()) - 2);
  const double range = 2.0 * w.robot_half;
  const Point moved = clamp_to_bounds({o.nodes[j].x + rng.uniform(-range, range),
                                       o.nodes[j].y + rng.uniform(-range, range)},
                                      w.bounds);
  if (!segment_free(w, {node_point(o.nodes[j - 1]), moved}, m) ||
      !segment_free(w, {moved, node_point(o.nodes[j + 1])}, m))
    return {parent};
  o.nodes[j].x = moved.x;
  o.nodes[j].y = moved.y;
  return {o};
}

std::vector<PathIndividual> op_mutate_large(const PathIndividual& parent,
                                            const WorldState& w, Rng& rng) {
  if (parent.nodes.size() < 3) return {parent};
  PathIndividual o = parent;
  const int j = 1 + rng.below(static_cast<int>(o.nodes.size()) - 2);
  const double range = 0.25 * std::max(w.bounds.width, w.bounds.height);
  const Point moved = clamp_to_bounds({o.nodes[j].x + rng.uniform(-range, range),
                                       o.nodes[j].y + rng.uniform(-range, range)},
                                      w.bounds);
  o.nodes[j].x = moved.x;
  o.nodes[j].y = moved.y;
  return {o};
}

std::vector<PathIndividual> op_insert_delete(const PathIndividual& parent,
                                             const WorldState& w, Rng& rng) {
  if (parent.feasible) return {parent};
  PathIndividual o;
  const double radius = 6.0 * w.robot_half;
  const std::size_t n = parent.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PathNode& node = parent.nodes[i];
    const bool interior = i > 0 && i + 1 < n;
    if (!interior || node.node_feasible) o.nodes.push_back(node);
    if (i + 1 < n && !node.segment_feasible) {
      const Point mid = midpoint(node_point(node), node_point(parent.nodes[i + 1]));
      const Point fresh = clamp_to_bounds(
          {mid.x + rng.uniform(-radius, radius),
           mid.y + rng.uniform(-radius, radius)},
          w.bounds);
      o.nodes.push_back({fresh.x, fresh.y, true, true});
    }
  }
  return {o};
}

std::vector<PathIndividual> op_delete(const PathIndividual& parent,
                                      const WorldState& w, Rng& rng,
                                      MetricsCounters& m) {
  const int n = static_cast<int>(parent.nodes.size());
  if (n < 3) return {parent};
  PathIndividual o = parent;
  int victim = -1;
  if (parent.feasible) {
    // Prefer a node whose shortcut stays collision free.
    const int offset = rng.below(n - 2);
    for (int k = 0; k < n - 2 && victim < 0; ++k) {
      const int j = 1 + (offset + k) % (n - 2);
      if (segment_free(w, {node_point(o.nodes[j - 1]), node_point(o.nodes[j + 1])},
                       m))
        victim = j;
    }
  }
  if (victim < 0) victim = 1 + rng.below(n - 2);
  o.nodes.erase(o.nodes.begin() + victim);
  return {o};
}

std::vector<PathIndividual> op_swap(const PathIndividual& parent, Rng& rng) {
  const int n = static_cast<int>(parent.nodes.size());
  if (n < 4) return {parent};
  PathIndividual o = parent;
  const int j = 1 + rng.below(n - 3);
  std::swap(o.nodes[j].x, o.nodes[j + 1].x);
  std::swap(o.nodes[j].y, o.nodes[j + 1].y);
  return {o};
}

std::vector<PathIndividual> op_smooth(const PathIndividual& parent, Rng& rng) {
  const int n = static_cast<int>(parent.nodes.size());
  if (!parent.feasible || n < 3) return {parent};
  // Selection probability proportional to the turn angle at each node.
  std::vector<double> angle(n, 0.0);
  double total = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    angle[i] = turn_angle(node_point(parent.nodes[i - 1]),
                          node_point(parent.nodes[i]),
                          node_point(parent.nodes[i + 1]));
    total += angle[i];
  }
  int j = 1;
  if (total > 0.0) {
    double pick = rng.uniform01() * total;
    for (int i = 1; i + 1 < n; ++i) {
      pick -= angle[i];
      if (pick <= 0.0) {
        j = i;
        break;
      }
    }
  } else {
    j = 1 + rng.below(n - 2);
  }
  PathIndividual o = parent;
  const Point before = midpoint(node_point(o.nodes[j - 1]), node_point(o.nodes[j]));
  const Point after = midpoint(node_point(o.nodes[j]), node_point(o.nodes[j + 1]));
  o.nodes[j] = {before.x, before.y, true, true};
  o.nodes.insert(o.nodes.begin() + j + 1, {after.x, after.y, true, true});
  return {o};
}

std::vector<PathIndividual> op_repair(const PathIndividual& parent,
                                      const WorldState& w, Rng& rng,
                                      MetricsCounters& m) {
  if (parent.feasible) return {parent};
  std::vector<int> bad;
  for (std::size_t i = 0; i + 1 < parent.nodes.size(); ++i)
    if (!parent.nodes[i].segment_feasible) bad.push_back(static_cast<int>(i));
  if (bad.empty()) return {parent};
  const int j = bad[rng.below(static_cast<int>(bad.size()))];
  const Segment seg{node_point(parent.nodes[j]), node_point(parent.nodes[j + 1])};
  const auto hit = first_hit(w, seg, m);
  if (!hit) return {parent};
  const Obstacle* blocker = nullptr;
  for (const Obstacle& o : w.obstacles)
    if (o.id == hit->second) blocker = &o;
  const double tau = 2.0 * w.robot_half;
  const Rect around = effective_shape(w, *blocker).inflated(tau);
  Point corners[4] = {{around.min_x, around.min_y},
                      {around.max_x(), around.min_y},
                      {around.max_x(), around.max_y()},
                      {around.min_x, around.max_y()}};
  const Point mid = midpoint(seg.a, seg.b);
  std::sort(std::begin(corners), std::end(corners),
            [&](const Point& a, const Point& b) {
              return squared_distance(a, mid) < squared_distance(b, mid);
            });
  const Rect block = effective_shape(w, *blocker);
  for (const Point& c : corners) {
    ++m.collision_checks;
    if (!segment_intersects_rect({seg.a, c}, block) &&
        !segment_intersects_rect({c, seg.b}, block)) {
      PathIndividual o = parent;
      o.nodes.insert(o.nodes.begin() + j + 1, {c.x, c.y, true, true});
      return {o};
    }
  }
  return {parent};
}

}  // namespace

std::vector<PathIndividual> apply_operator(
    EpnOperator op, const std::vector<PathIndividual>& parents,
    const WorldState& w, Rng& rng, MetricsCounters& m) {
  if (op == EpnOperator::crossover) {
    if (parents.size() != 2)
      throw std::logic_error("crossover requires two parents");
  } else if (parents.size() != 1) {
    throw std::logic_error("unary operator requires one parent");
  }
  switch (op) {
    case EpnOperator::crossover:
      return op_crossover(parents[0], parents[1], rng);
    case EpnOperator::mutate_fine:
      return op_mutate_fine(parents[0], w, rng, m);
    case EpnOperator::mutate_large:
      return op_mutate_large(parents[0], w, rng);
    case EpnOperator::insert_delete:
      return op_insert_delete(parents[0], w, rng);
    case EpnOperator::remove:
      return op_delete(parents[0], w, rng, m);
    case EpnOperator::swap_adjacent:
      return op_swap(parents[0], rng);
    case EpnOperator::smooth:
      return op_smooth(parents[0], rng);
    case EpnOperator::repair:
      return op_repair(parents[0], w, rng, m);
  }
  return {parents[0]};
}

EpnPopulation EpnPopulation::initialize(const WorldState& w,
                                        const Path* seed_path, Rng& rng,
                                        MetricsCounters& m) {
  EpnPopulation pop;
  if (seed_path) {
    PathIndividual seed = PathIndividual::from_path(*seed_path);
    evaluate(seed, w, pop.weights_, m);
    pop.individuals_.push_back(std::move(seed));
  }
  while (static_cast<int>(pop.individuals_.size()) < kEpnPopulationSize) {
    PathIndividual ind;
    ind.nodes.push_back({w.robot_pos.x, w.robot_pos.y, true, true});
    const int interior = 1 + rng.below(10);
    for (int k = 0; k < interior; ++k) {
      const Point p = random_config(w, rng);
      ind.nodes.push_back({p.x, p.y, true, true});
    }
    ind.nodes.push_back({w.goal.x, w.goal.y, true, true});
    evaluate(ind, w, pop.weights_, m);
    pop.individuals_.push_back(std::move(ind));
  }
  return pop;
}

int EpnPopulation::best_index() const {
  int best = 0;
  for (std::size_t i = 1; i < individuals_.size(); ++i)
    if (epn_better(individuals_[i], individuals_[best]))
      best = static_cast<int>(i);
  return best;
}

int EpnPopulation::worst_index() const {
  int worst = 0;
  for (std::size_t i = 1; i < individuals_.size(); ++i)
    if (epn_better(individuals_[worst], individuals_[i]))
      worst = static_cast<int>(i);
  return worst;
}

const PathIndividual& EpnPopulation::best() const {
  return individuals_[best_index()];
}

void EpnPopulation::generation_step(const WorldState& w, Rng& rng,
                                    MetricsCounters& m) {
  const EpnOperator op = select_operator(table_, rng);
  std::vector<PathIndividual> parents;
  const int p0 = rng.below(static_cast<int>(individuals_.size()));
  parents.push_back(individuals_[p0]);
  if (op == EpnOperator::crossover) {
    int p1 = rng.below(static_cast<int>(individuals_.size()));
    if (p1 == p0) p1 = (p1 + 1) % static_cast<int>(individuals_.size());
    parents.push_back(individuals_[p1]);
  }

  std::vector<PathIndividual> offspring = apply_operator(op, parents, w, rng, m);
  for (PathIndividual& o : offspring) evaluate(o, w, weights_, m);
  std::size_t pick = 0;
  for (std::size_t i = 1; i < offspring.size(); ++i)
    if (epn_better(offspring[i], offspring[pick])) pick = i;

  const int oi = static_cast<int>(static_cast<int>(op));
  ++table_.attempts[oi];
  if (epn_better(offspring[pick], parents[0])) ++table_.successes[oi];

  const int worst = worst_index();
  if (epn_better(offspring[pick], individuals_[worst]))
    individuals_[worst] = std::move(offspring[pick]);

  ++generation_;
  if (++applications_since_refresh_ >= kEpnUpdateEvery) {
    table_.refresh();
    applications_since_refresh_ = 0;
  }
}

void EpnPopulation::rebase(const Point& robot, const WorldState& w,
                           MetricsCounters& m) {
  for (PathIndividual& ind : individuals_) {
    ind.nodes.front() = {robot.x, robot.y, true, true};
    // Drop interior nodes the robot has already passed: the node lies on the
    // robot-to-successor line, behind the direction of travel.
    while (ind.nodes.size() >= 3) {
      const Point n1 = node_point(ind.nodes[1]);
      const Point n2 = node_point(ind.nodes[2]);
      const bool passed =
          distance(robot, n1) <= 1e-9 ||
          (point_segment_distance(robot, {n1, n2}) <= 1e-6 &&
           squared_distance(robot, n2) < squared_distance(n1, n2));
      if (!passed) break;
      ind.nodes.erase(ind.nodes.begin() + 1);
    }
    evaluate(ind, w, weights_, m);
  }
}

void EpnPopulation::inject(PathIndividual ind, const WorldState& w,
                           MetricsCounters& m) {
  evaluate(ind, w, weights_, m);
  individuals_[worst_index()] = std::move(ind);
}

PlannerAction EpnPlanner::cycle(const WorldState& w,
                                const std::vector<int>& changed,
                                Budget& budget, Rng& rng,
                                MetricsCounters& m) {
  (void)changed;  // rebase re-evaluates against the current world anyway
  if (!pop_)
    pop_ = EpnPopulation::initialize(w, nullptr, rng, m);
  else
    pop_->rebase(w.robot_pos, w, m);

  while (budget.take()) pop_->generation_step(w, rng, m);

  const PathIndividual& best = pop_->best();
  if (best.feasible && best.nodes.size() >= 2) {
    best_path_ = best.to_path();
    return PlannerAction::move(*best_path_, /*track=*/false);
  }
  best_path_.reset();
  return PlannerAction::wait();
}

const Path* EpnPlanner::current_path() const {
  return best_path_ ? &*best_path_ : nullptr;
}

}  // namespace dynaplan
