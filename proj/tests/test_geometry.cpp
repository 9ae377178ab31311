#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynaplan/geometry.hpp"
#include "dynaplan/rng.hpp"

using namespace dynaplan;

namespace {

// Independent segment/rectangle intersection oracle: sample the segment very
// finely and test each sample against the closed rectangle, with an exact
// endpoint check on top. Dense sampling cannot miss an intersection interval
// longer than the sampling step; the randomized fixtures below keep shapes
// large relative to that step.
bool oracle_segment_hits_rect(const Segment& s, const Rect& r) {
  constexpr int kSamples = 4000;
  for (int i = 0; i <= kSamples; ++i) {
    const Point p = lerp(s.a, s.b, static_cast<double>(i) / kSamples);
    if (point_in_rect(p, r)) return true;
  }
  return false;
}

double oracle_point_rect_distance(const Point& p, const Rect& r) {
  const double cx = std::clamp(p.x, r.min_x, r.max_x());
  const double cy = std::clamp(p.y, r.min_y, r.max_y());
  return std::hypot(p.x - cx, p.y - cy);
}

}  // namespace

TEST_CASE("point_in_rect includes the boundary") {
  const Rect r{1.0, 2.0, 3.0, 4.0};
  CHECK(point_in_rect({1.0, 2.0}, r));
  CHECK(point_in_rect({4.0, 6.0}, r));
  CHECK(point_in_rect({2.5, 4.0}, r));
  CHECK_FALSE(point_in_rect({0.999, 3.0}, r));
  CHECK_FALSE(point_in_rect({2.0, 6.001}, r));
}

TEST_CASE("rects_overlap ignores shared edges") {
  const Rect a{0, 0, 2, 2};
  CHECK_FALSE(rects_overlap(a, {2, 0, 2, 2}));  // share the x=2 edge
  CHECK_FALSE(rects_overlap(a, {0, 2, 2, 2}));  // share the y=2 edge
  CHECK(rects_overlap(a, {1.9, 1.9, 2, 2}));
  CHECK(rects_overlap(a, {-1, -1, 10, 10}));
}

TEST_CASE("clip_segment_to_rect on hand-checked cases") {
  const Rect r{0, 0, 10, 10};
  SUBCASE("clean crossing") {
    // Enters x=0 at t computed by hand: segment (-5,5)->(15,5), hits x=0 at
    // t=0.25 and leaves x=10 at t=0.75.
    auto span = clip_segment_to_rect({{-5, 5}, {15, 5}}, r);
    REQUIRE(span.has_value());
    CHECK(span->first == doctest::Approx(0.25));
    CHECK(span->second == doctest::Approx(0.75));
  }
  SUBCASE("fully inside") {
    auto span = clip_segment_to_rect({{2, 2}, {8, 8}}, r);
    REQUIRE(span.has_value());
    CHECK(span->first == doctest::Approx(0.0));
    CHECK(span->second == doctest::Approx(1.0));
  }
  SUBCASE("corner graze") {
    auto span = clip_segment_to_rect({{-1, 1}, {1, -1}}, r);
    REQUIRE(span.has_value());
    CHECK(span->first == doctest::Approx(0.5));
    CHECK(span->second == doctest::Approx(0.5));
  }
  SUBCASE("miss") {
    CHECK_FALSE(clip_segment_to_rect({{-1, -1}, {-1, 20}}, r).has_value());
    CHECK_FALSE(clip_segment_to_rect({{11, 0}, {20, 10}}, r).has_value());
  }
  SUBCASE("axis-parallel segment sliding along an edge") {
    auto span = clip_segment_to_rect({{0, -5}, {0, 15}}, r);
    REQUIRE(span.has_value());
    CHECK(span->first == doctest::Approx(0.25));
    CHECK(span->second == doctest::Approx(0.75));
  }
  SUBCASE("degenerate point segment") {
    CHECK(clip_segment_to_rect({{5, 5}, {5, 5}}, r).has_value());
    CHECK_FALSE(clip_segment_to_rect({{-1, 5}, {-1, 5}}, r).has_value());
  }
}

TEST_CASE("segment_intersects_rect agrees with a dense sampling oracle") {
  Rng rng(20240401);
  int hits = 0;
  for (int it = 0; it < 2000; ++it) {
    const Rect r{rng.uniform(-50, 50), rng.uniform(-50, 50),
                 rng.uniform(5, 30), rng.uniform(5, 30)};
    const Segment s{{rng.uniform(-80, 80), rng.uniform(-80, 80)},
                    {rng.uniform(-80, 80), rng.uniform(-80, 80)}};
    const bool fast = segment_intersects_rect(s, r);
    const bool slow = oracle_segment_hits_rect(s, r);
    // Dense sampling can only miss sub-step grazes, never invent a hit.
    if (slow) CHECK(fast);
    if (!fast) CHECK_FALSE(slow);
    // For robust cases (clipped interval of meaningful length, or clearly
    // separated shapes) the two must agree exactly.
    const auto span = clip_segment_to_rect(s, r);
    const bool robust =
        !span || (span->second - span->first) * distance(s.a, s.b) > 0.1;
    if (robust) CHECK(fast == slow);
    hits += fast ? 1 : 0;
  }
  // Sanity: the fixture generates a healthy mix of hits and misses.
  CHECK(hits > 200);
  CHECK(hits < 1800);
}

TEST_CASE("segment_rect_entry is the first boundary contact") {
  const Rect r{0, 0, 10, 10};
  CHECK(*segment_rect_entry({{-10, 5}, {10, 5}}, r) == doctest::Approx(0.5));
  CHECK(*segment_rect_entry({{5, 5}, {40, 5}}, r) == doctest::Approx(0.0));
  CHECK_FALSE(segment_rect_entry({{-10, 20}, {10, 20}}, r).has_value());
}

TEST_CASE("point_segment_distance on hand-checked values") {
  const Segment s{{0, 0}, {10, 0}};
  CHECK(point_segment_distance({5, 3}, s) == doctest::Approx(3.0));
  CHECK(point_segment_distance({-4, 3}, s) == doctest::Approx(5.0));
  CHECK(point_segment_distance({13, -4}, s) == doctest::Approx(5.0));
  CHECK(point_segment_distance({7, 0}, s) == doctest::Approx(0.0));
  // Degenerate segment behaves as a point.
  CHECK(point_segment_distance({3, 4}, {{0, 0}, {0, 0}}) ==
        doctest::Approx(5.0));
}

TEST_CASE("point_rect_distance matches the clamp construction") {
  Rng rng(99);
  for (int it = 0; it < 2000; ++it) {
    const Rect r{rng.uniform(-20, 20), rng.uniform(-20, 20),
                 rng.uniform(1, 10), rng.uniform(1, 10)};
    const Point p{rng.uniform(-40, 40), rng.uniform(-40, 40)};
    CHECK(point_rect_distance(p, r) ==
          doctest::Approx(oracle_point_rect_distance(p, r)));
  }
}

TEST_CASE("segment_rect_distance against a brute-force minimizer") {
  // Oracle: minimum over a fine parameterization of the segment of the
  // point-rectangle distance. For disjoint shapes this converges to the true
  // minimum; tolerance accounts for the parameter step.
  Rng rng(31337);
  for (int it = 0; it < 400; ++it) {
    const Rect r{rng.uniform(-30, 30), rng.uniform(-30, 30),
                 rng.uniform(2, 15), rng.uniform(2, 15)};
    const Segment s{{rng.uniform(-60, 60), rng.uniform(-60, 60)},
                    {rng.uniform(-60, 60), rng.uniform(-60, 60)}};
    const double fast = segment_rect_distance(s, r);
    double slow = 1e300;
    constexpr int kSteps = 3000;
    for (int i = 0; i <= kSteps; ++i) {
      const Point p = lerp(s.a, s.b, static_cast<double>(i) / kSteps);
      slow = std::min(slow, oracle_point_rect_distance(p, r));
    }
    if (fast == 0.0) {
      CHECK(slow < 0.1);
    } else {
      CHECK(fast == doctest::Approx(slow).epsilon(1e-3));
    }
  }
}

TEST_CASE("inflated grows every side by the margin") {
  const Rect r{2, 3, 4, 5};
  const Rect g = r.inflated(1.5);
  CHECK(g.min_x == doctest::Approx(0.5));
  CHECK(g.min_y == doctest::Approx(1.5));
  CHECK(g.max_x() == doctest::Approx(7.5));
  CHECK(g.max_y() == doctest::Approx(9.5));
}
