#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "dynaplan/nn_index.hpp"
#include "dynaplan/rng.hpp"

using namespace dynaplan;

namespace {

// Linear-scan oracle with the same tie rule: smallest distance, then
// smallest id, alive entries only.
int oracle_nearest(const std::vector<Entry>& all, const Point& q) {
  int best = -1;
  double best_d2 = 0.0;
  for (const Entry& e : all) {
    if (!e.alive) continue;
    const double d2 = squared_distance(e.point, q);
    if (best == -1 || d2 < best_d2 || (d2 == best_d2 && e.id < best)) {
      best = e.id;
      best_d2 = d2;
    }
  }
  return best;
}

std::vector<std::size_t> expected_tree_sizes(int n) {
  std::vector<std::size_t> out;
  for (int bit = 30; bit >= 0; --bit)
    if (n & (1 << bit)) out.push_back(std::size_t{1} << bit);
  return out;
}

}  // namespace

TEST_CASE("KdTree nearest matches linear scan with ties by id") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Entry> entries;
    const int n = 1 + rng.below(64);
    for (int i = 0; i < n; ++i)
      entries.push_back({{rng.uniform(0, 10), rng.uniform(0, 10)}, i, true});
    // Duplicate a few points so distance ties actually occur.
    for (int i = 0; i < n / 4; ++i)
      entries.push_back(
          {entries[rng.below(n)].point, n + i, true});
    KdTree tree(entries);
    for (int q = 0; q < 50; ++q) {
      const Point query{rng.uniform(-2, 12), rng.uniform(-2, 12)};
      double best_d2 = std::numeric_limits<double>::infinity();
      const Entry* best = nullptr;
      tree.nearest_into(query, best_d2, &best);
      REQUIRE(best != nullptr);
      CHECK(best->id == oracle_nearest(entries, query));
    }
  }
}

TEST_CASE("LogForest tree sizes mirror the binary representation") {
  // The forest must hold one balanced tree of size 2^k for every set bit of
  // the total insert count, for every count up to 1024.
  LogForest f;
  for (int n = 1; n <= 1024; ++n) {
    f.insert({static_cast<double>(n % 33), static_cast<double>(n % 17)}, n);
    CHECK(f.tree_sizes() == expected_tree_sizes(n));
  }
  CHECK(f.total_inserted() == 1024);
}

TEST_CASE("LogForest nearest equals linear scan through inserts and deaths") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    LogForest f;
    std::vector<Entry> all;
    MetricsCounters m;
    for (int i = 0; i < 600; ++i) {
      const Point p{rng.uniform(0, 100), rng.uniform(0, 100)};
      f.insert(p, i);
      all.push_back({p, i, true});
      // Occasionally kill a random alive entry.
      if (i > 0 && rng.uniform01() < 0.2) {
        const int victim = rng.below(i);
        if (all[victim].alive) {
          all[victim].alive = false;
          f.mark_dead(victim);
        }
      }
      const Point q{rng.uniform(-10, 110), rng.uniform(-10, 110)};
      auto [id, pt] = f.nearest(q, m);
      CHECK(id == oracle_nearest(all, q));
    }
    CHECK(m.nn_lookups == 600);
  }
}

TEST_CASE("nearest counts exactly one lookup per call") {
  LogForest f;
  MetricsCounters m;
  for (int i = 0; i < 37; ++i) f.insert({double(i), 0.0}, i);
  for (int i = 0; i < 12; ++i) f.nearest({3.3, 1.0}, m);
  CHECK(m.nn_lookups == 12);
}

TEST_CASE("alive_count tracks deaths and rebuild_from compacts") {
  LogForest f;
  for (int i = 0; i < 20; ++i) f.insert({double(i), double(i)}, i);
  CHECK(f.alive_count() == 20);
  for (int i = 0; i < 10; ++i) f.mark_dead(2 * i);
  CHECK(f.alive_count() == 10);

  std::vector<Entry> survivors;
  for (int i = 0; i < 10; ++i)
    survivors.push_back({{double(2 * i + 1), double(2 * i + 1)}, i, true});
  LogForest g = LogForest::rebuild_from(survivors);
  CHECK(g.alive_count() == 10);
  CHECK(g.tree_sizes() == expected_tree_sizes(10));
  MetricsCounters m;
  CHECK(g.nearest({0, 0}, m).first == 0);
}

TEST_CASE("carry merges keep amortized reinsert cost logarithmic") {
  LogForest f;
  const int n = 4096;
  for (int i = 0; i < n; ++i) f.insert({double(i % 61), double(i % 53)}, i);
  // Every insert is re-entered once per carry it participates in, at most
  // log2(n) times: total re-insertions are bounded by n*log2(n).
  CHECK(f.reinsert_count() <= static_cast<long long>(n) * 12);
  CHECK(f.reinsert_count() >= n);  // merges certainly happened
}

TEST_CASE("nearest on an empty forest throws") {
  LogForest f;
  MetricsCounters m;
  CHECK_THROWS(f.nearest({0, 0}, m));
}
