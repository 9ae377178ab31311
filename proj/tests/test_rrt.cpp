#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynaplan/rng.hpp"
#include "dynaplan/rrt.hpp"

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

Obstacle wall(int id, Rect r) {
  Obstacle o;
  o.id = id;
  o.shape = r;
  return o;
}

}  // namespace

TEST_CASE("Tree bookkeeping: parents precede children, branch_to walks up") {
  Tree t({1, 2});
  const int a = t.add_node({3, 4}, 0);
  const int b = t.add_node({5, 6}, a);
  const int c = t.add_node({0, 0}, 0);
  CHECK(a == 1);
  CHECK(b == 2);
  CHECK(c == 3);
  const auto branch = t.branch_to(b);
  REQUIRE(branch.size() == 3);
  CHECK(branch[0] == Point{1, 2});
  CHECK(branch[1] == Point{3, 4});
  CHECK(branch[2] == Point{5, 6});
  CHECK(t.root_config() == Point{1, 2});
}

TEST_CASE("Tree nearest counts lookups, closest_to does not") {
  Tree t({0, 0});
  t.add_node({10, 0}, 0);
  t.add_node({0, 10}, 0);
  MetricsCounters m;
  CHECK(t.nearest({9, 1}, m) == 1);
  CHECK(t.nearest({1, 9}, m) == 2);
  CHECK(m.nn_lookups == 2);
  CHECK(t.closest_to({9, 1}) == 1);
  CHECK(m.nn_lookups == 2);
}

TEST_CASE("extend reaches a visible sample directly") {
  WorldState w = open_world();
  Tree t({10, 10});
  MetricsCounters m;
  const GrowthResult r = extend(t, {40, 10}, w, m);
  CHECK(r.kind == GrowthKind::reached);
  CHECK(t.node(r.node).config == Point{40, 10});
  CHECK(t.node(r.node).parent == 0);
}

TEST_CASE("extend advances to the midpoint of the blocked stub") {
  WorldState w = open_world();
  w.obstacles = {wall(0, {30, 0, 10, 100})};
  Tree t({10, 10});
  MetricsCounters m;
  const GrowthResult r = extend(t, {90, 10}, w, m);
  REQUIRE(r.kind == GrowthKind::advanced);
  // First collision at x=30 (t=0.25 along 80 units); midpoint of the free
  // stub from (10,10) to (30,10) is (20,10).
  CHECK(t.node(r.node).config.x == doctest::Approx(20.0));
  CHECK(t.node(r.node).config.y == doctest::Approx(10.0));
}

TEST_CASE("extend traps when the free stub is shorter than min_step") {
  WorldState w = open_world();
  w.obstacles = {wall(0, {11.5, 0, 10, 100})};  // collision at x=11.5
  Tree t({10, 10});
  MetricsCounters m;
  // Midpoint would be 0.75 from the root, below min_step = robot_half = 1.
  const GrowthResult r = extend(t, {90, 10}, w, m);
  CHECK(r.kind == GrowthKind::trapped);
  CHECK(t.size() == 1);
}

TEST_CASE("connect repeats extension until reached or trapped") {
  WorldState w = open_world();
  Tree t({10, 10});
  MetricsCounters m;
  SUBCASE("open space reaches in one shot") {
    const GrowthResult r = connect(t, {80, 80}, w, m);
    CHECK(r.kind == GrowthKind::reached);
    CHECK(t.node(r.node).config == Point{80, 80});
  }
  SUBCASE("a wall eventually traps the march") {
    w.obstacles = {wall(0, {50, 0, 10, 100})};
    const GrowthResult r = connect(t, {90, 10}, w, m);
    CHECK(r.kind == GrowthKind::trapped);
    // Each advanced step halves the remaining gap; the node column must
    // approach x=50 without crossing it.
    for (const TreeNode& n : t.nodes()) CHECK(n.config.x < 50.0);
    CHECK(t.size() > 1);
  }
}

TEST_CASE("extract_path joins the two branches through the bridge") {
  Tree ta({0, 0});
  const int a1 = ta.add_node({1, 0}, 0);
  const int a2 = ta.add_node({2, 0}, a1);
  Tree tb({5, 0});
  const int b1 = tb.add_node({3, 0}, 0);
  const int b2 = tb.add_node({2, 0}, b1);  // same config as a2
  const Path p = extract_path(ta, tb, a2, b2);
  REQUIRE(p.points.size() == 5);
  CHECK(p.points[0] == Point{0, 0});
  CHECK(p.points[2] == Point{2, 0});
  CHECK(p.points[3] == Point{3, 0});
  CHECK(p.points[4] == Point{5, 0});
  Tree tc({9, 9});
  CHECK_THROWS(extract_path(ta, tc, a2, 0));  // bridge configs differ
}

TEST_CASE("grow_step_toward merges trees when the target is doubly reached") {
  WorldState w = open_world();
  Tree ta({10, 10});
  Tree tb({90, 90});
  MetricsCounters m;
  const auto p = grow_step_toward(ta, tb, {50, 50}, w, m);
  REQUIRE(p.has_value());
  CHECK(p->points.front() == Point{10, 10});
  CHECK(p->points.back() == Point{90, 90});
  // The bridge configuration appears exactly once in the joined path.
  int bridge_count = 0;
  for (const Point& q : p->points)
    if (q == Point{50, 50}) ++bridge_count;
  CHECK(bridge_count == 1);
}

TEST_CASE("grow_step eventually connects across a slalom and is deterministic") {
  WorldState w = open_world();
  w.obstacles = {wall(0, {0, 30, 70, 10}), wall(1, {30, 60, 70, 10})};
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    Tree ta(w.robot_pos);
    Tree tb(w.goal);
    MetricsCounters m;
    for (int i = 0; i < 20000; ++i)
      if (auto p = grow_step(ta, tb, w, rng, m)) return p->points;
    return std::vector<Point>{};
  };
  const auto p1 = run(7);
  const auto p2 = run(7);
  const auto p3 = run(8);
  REQUIRE(!p1.empty());
  CHECK(p1 == p2);           // same seed, identical path
  REQUIRE(!p3.empty());      // different seed still connects
  // Endpoints are the tree roots.
  CHECK(p1.front() == w.robot_pos);
  CHECK(p1.back() == w.goal);
  // Every edge of the delivered path must be collision free.
  MetricsCounters m;
  for (std::size_t i = 0; i + 1 < p1.size(); ++i)
    CHECK(segment_free(w, {p1[i], p1[i + 1]}, m));
}

TEST_CASE("random_config stays inside the bounds") {
  WorldState w = open_world(42.0);
  w.bounds = {-5, 10, 42, 17};
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Point p = random_config(w, rng);
    CHECK(p.x >= -5);
    CHECK(p.x <= 37);
    CHECK(p.y >= 10);
    CHECK(p.y <= 27);
  }
}
