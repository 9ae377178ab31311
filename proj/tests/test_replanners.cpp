#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "dynaplan/replanners.hpp"
#include "dynaplan/rng.hpp"

using namespace dynaplan;

namespace {

WorldState open_world(double side = 100.0) {
  WorldState w;
  w.bounds = {0, 0, side, side};
  w.robot_pos = {10, 10};
  w.goal = {side - 10, side - 10};
  w.robot_half = 1.0;
  w.robot_speed = 10.0;
  return w;
}

Obstacle block(int id, Rect r) {
  Obstacle o;
  o.id = id;
  o.shape = r;
  return o;
}

Tree random_tree(const WorldState& w, Rng& rng, int n_nodes) {
  Tree t({rng.uniform(0, w.bounds.width), rng.uniform(0, w.bounds.height)});
  for (int i = 1; i < n_nodes; ++i)
    t.add_node({rng.uniform(0, w.bounds.width),
                rng.uniform(0, w.bounds.height)},
               rng.below(i));
  return t;
}

// Brute-force trim oracle: a node survives iff no edge on its root path
// crosses any changed obstacle.
std::vector<bool> oracle_survivors(const Tree& t,
                                   const std::vector<Obstacle>& changed,
                                   const WorldState& w) {
  const auto& nodes = t.nodes();
  std::vector<bool> ok(nodes.size(), true);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    bool edge_bad = false;
    const Segment e{nodes[nodes[i].parent].config, nodes[i].config};
    for (const Obstacle& o : changed)
      if (segment_intersects_rect(e, effective_shape(w, o))) edge_bad = true;
    ok[i] = !edge_bad && ok[nodes[i].parent];
  }
  return ok;
}

using PointPair = std::pair<std::pair<double, double>, std::pair<double, double>>;

std::multiset<PointPair> edge_set(const Tree& t) {
  std::multiset<PointPair> s;
  for (std::size_t i = 1; i < t.nodes().size(); ++i) {
    const Point a = t.node(t.node(static_cast<int>(i)).parent).config;
    const Point b = t.node(static_cast<int>(i)).config;
    s.insert({{a.x, a.y}, {b.x, b.y}});
  }
  return s;
}

}  // namespace

TEST_CASE("cache_store fills slots then overwrites random ones") {
  Rng rng(4);
  WaypointCache c;
  Path p;
  for (int i = 0; i < 40; ++i) p.points.push_back({double(i), 0});
  cache_store(c, p, rng);
  CHECK(c.count == 40);
  cache_store(c, p, rng);
  CHECK(c.count == 80);
  cache_store(c, p, rng);  // 120 insertions into 100 slots
  CHECK(c.count == 100);
  CHECK(static_cast<int>(c.slots.size()) == 100);
  // Every stored waypoint came from the path.
  for (int i = 0; i < c.count; ++i) {
    CHECK(c.slots[i].y == 0);
    CHECK(c.slots[i].x >= 0);
    CHECK(c.slots[i].x <= 39);
  }
}

TEST_CASE("choose_target splits goal, waypoint and uniform draws") {
  Rng rng(9);
  WorldState w = open_world();
  WaypointCache c;
  Path p;
  p.points = {{33, 44}};
  cache_store(c, p, rng);

  // Forced draws exercise each branch deterministically.
  CHECK(choose_target(c, w.goal, w, rng, 0.05) == w.goal);
  CHECK(choose_target(c, w.goal, w, rng, 0.5) == Point{33, 44});
  const Point u = choose_target(c, w.goal, w, rng, 0.9);
  CHECK(point_in_rect(u, w.bounds));

  // Empty cache: waypoint draws fall through to uniform samples.
  WaypointCache empty;
  const Point v = choose_target(empty, w.goal, w, rng, 0.5);
  CHECK(point_in_rect(v, w.bounds));

  // Long-run frequencies approximate 0.1 / 0.6 / 0.3.
  int goals = 0, ways = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Point t = choose_target(c, w.goal, w, rng);
    if (t == w.goal)
      ++goals;
    else if (t == Point{33, 44})
      ++ways;
  }
  CHECK(goals == doctest::Approx(0.1 * n).epsilon(0.15));
  CHECK(ways == doctest::Approx(0.6 * n).epsilon(0.05));
}

TEST_CASE("invalidate_and_trim matches the ancestor-edge oracle") {
  Rng rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    WorldState w = open_world();
    Tree t = random_tree(w, rng, 2 + rng.below(60));
    std::vector<Obstacle> changed;
    const int n_changed = 1 + rng.below(3);
    for (int i = 0; i < n_changed; ++i)
      changed.push_back(block(i, {rng.uniform(0, 80), rng.uniform(0, 80),
                                  rng.uniform(5, 20), rng.uniform(5, 20)}));

    MetricsCounters m;
    const Tree trimmed = invalidate_and_trim(t, changed, w, m);
    const std::vector<bool> ok = oracle_survivors(t, changed, w);

    // Survivor multiset of configurations matches the oracle.
    std::multiset<std::pair<double, double>> want, got;
    for (std::size_t i = 0; i < t.nodes().size(); ++i)
      if (ok[i]) want.insert({t.node(i).config.x, t.node(i).config.y});
    for (const TreeNode& n : trimmed.nodes())
      got.insert({n.config.x, n.config.y});
    CHECK(want == got);

    // The root always survives and stays the root.
    CHECK(trimmed.root_config() == t.root_config());

    // Every surviving edge existed in the original tree.
    const auto original = edge_set(t);
    for (const auto& e : edge_set(trimmed))
      CHECK(original.count(e) > 0);
  }
}

TEST_CASE("prune_components separates the rooted part from severed ones") {
  WorldState w = open_world();
  // Chain 0-1-2-3-4 along y=10. A block over the 1-2 edge kills node 2 (its
  // incoming edge crosses) and severs the remaining descendants {3,4}.
  Tree t({10, 10});
  t.add_node({20, 10}, 0);
  t.add_node({30, 10}, 1);
  t.add_node({40, 10}, 2);
  t.add_node({40, 20}, 3);
  std::vector<Obstacle> changed = {block(0, {24, 5, 2, 10})};
  MetricsCounters m;
  const PrunePieces pieces = prune_components(t, changed, w, m);
  REQUIRE(pieces.rooted.has_value());
  CHECK(pieces.rooted->size() == 2);
  REQUIRE(pieces.severed.size() == 1);
  CHECK(pieces.severed[0].size() == 2);
  CHECK(pieces.severed[0].root_config() == Point{40, 10});

  // A node inside the changed obstacle dies; so does its child, whose
  // incoming edge starts inside the block.
  std::vector<Obstacle> on_node = {block(1, {19, 9, 2, 2})};
  const PrunePieces p2 = prune_components(t, on_node, w, m);
  REQUIRE(p2.rooted.has_value());
  CHECK(p2.rooted->size() == 1);
  REQUIRE(p2.severed.size() == 1);
  CHECK(p2.severed[0].size() == 2);
}

TEST_CASE("reroot_at links through the nearest node when free") {
  WorldState w = open_world();
  Tree t({50, 50});
  t.add_node({60, 50}, 0);
  MetricsCounters m;
  const auto r = reroot_at(t, {70, 50}, w, m);
  REQUIRE(r.has_value());
  CHECK(r->root_config() == Point{70, 50});
  CHECK(r->size() == 3);
  // All original configurations survive the reroot.
  std::multiset<std::pair<double, double>> got;
  for (const TreeNode& n : r->nodes()) got.insert({n.config.x, n.config.y});
  CHECK(got.count({50, 50}) == 1);
  CHECK(got.count({60, 50}) == 1);

  // A wall between the new root and the tree blocks the link.
  w.obstacles = {block(0, {64, 40, 2, 20})};
  CHECK_FALSE(reroot_at(t, {70, 50}, w, m).has_value());
}

TEST_CASE("mprrt_select_sample picks goal, forest root or uniform") {
  WorldState w = open_world();
  Rng rng(12);
  std::deque<Tree> forest;
  forest.emplace_back(Point{11, 22});
  forest.emplace_back(Point{33, 44});

  const SampleChoice g = mprrt_select_sample(forest, w.goal, w, rng, 0.05);
  CHECK(g.kind == SampleKind::goal);
  CHECK(g.point == w.goal);

  const SampleChoice f = mprrt_select_sample(forest, w.goal, w, rng, 0.15);
  CHECK(f.kind == SampleKind::forest_root);
  REQUIRE(f.forest_index >= 0);
  REQUIRE(f.forest_index < 2);
  CHECK(f.point == forest[f.forest_index].root_config());

  const SampleChoice u = mprrt_select_sample(forest, w.goal, w, rng, 0.7);
  CHECK(u.kind == SampleKind::uniform);
  CHECK(point_in_rect(u.point, w.bounds));

  // Without a forest the forest draw degrades to uniform.
  std::deque<Tree> none;
  const SampleChoice e = mprrt_select_sample(none, w.goal, w, rng, 0.15);
  CHECK(e.kind == SampleKind::uniform);
}
