#include "dynaplan/planner.hpp"

#include <chrono>
#include <stdexcept>

#include "dynaplan/epn.hpp"
#include "dynaplan/hybrid.hpp"
#include "dynaplan/replanners.hpp"
#include "dynaplan/rrt.hpp"

namespace dynaplan {

namespace {

long long now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Budget Budget::iterations(int per_tick) {
  Budget b;
  b.iterations_ = per_tick;
  b.left_ = per_tick;
  return b;
}

Budget Budget::wallclock(double ms_per_tick) {
  Budget b;
  b.iterations_ = -1;
  b.ms_ = ms_per_tick;
  b.deadline_ns_ = now_ns() + static_cast<long long>(ms_per_tick * 1e6);
  return b;
}

void Budget::begin_tick() {
  if (iterations_ >= 0)
    left_ = iterations_;
  else
    deadline_ns_ = now_ns() + static_cast<long long>(ms_ * 1e6);
}

bool Budget::take() {
  if (iterations_ >= 0) {
    if (left_ <= 0) return false;
    --left_;
    return true;
  }
  return now_ns() < deadline_ns_;
}

namespace {

/// Plain bidirectional RRT navigator: plan once, follow the path, and when
/// the path stops being feasible throw everything away and plan again from
/// the current robot position.
class RrtPlanner : public Planner {
 public:
  PlannerAction cycle(const WorldState& w, const std::vector<int>& changed,
                      Budget& budget, Rng& rng, MetricsCounters& m) override {
    (void)changed;
    if (path_) {
      path_->points.front() = w.robot_pos;
      if (path_->points.size() < 2 || !check_path(w, *path_, m).feasible) {
        path_.reset();
        ta_.reset();
        tb_.reset();
      }
    }
    if (!path_) {
      if (!ta_) {
        ta_.emplace(w.robot_pos);
        tb_.emplace(w.goal);
      }
      while (budget.take()) {
        if (auto p = grow_step(*ta_, *tb_, w, rng, m)) {
          path_ = post_process(*p, w, m);
          break;
        }
      }
    }
    if (path_ && path_->points.size() >= 2) return PlannerAction::move(*path_);
    return PlannerAction::wait();
  }

  void path_advanced(const Path& p) override {
    if (path_) path_ = p;
  }

  std::pair<int, int> tree_sizes() const override {
    return {ta_ ? static_cast<int>(ta_->size()) : 0,
            tb_ ? static_cast<int>(tb_->size()) : 0};
  }

  const Path* current_path() const override {
    return path_ ? &*path_ : nullptr;
  }

 private:
  std::optional<Tree> ta_, tb_;
  std::optional<Path> path_;
};

}  // namespace

std::unique_ptr<Planner> make_planner(const std::string& name) {
  if (name == "rrt") return std::make_unique<RrtPlanner>();
  if (name == "drrt-adv") return std::make_unique<DrrtPlanner>(true);
  if (name == "drrt-noadv") return std::make_unique<DrrtPlanner>(false);
  if (name == "mprrt-adv") return std::make_unique<MprrtPlanner>(true);
  if (name == "mprrt-noadv") return std::make_unique<MprrtPlanner>(false);
  if (name == "epn") return std::make_unique<EpnPlanner>();
  if (name == "rrt-epn") return std::make_unique<RrtEpnPlanner>();
  if (name == "multistage") return std::make_unique<MultiStagePlanner>();
  throw std::invalid_argument("unknown planner: " + name);
}

const std::vector<std::string>& planner_names() {
  static const std::vector<std::string> names = {
      "rrt",       "drrt-adv",  "drrt-noadv", "mprrt-adv",
      "mprrt-noadv", "epn",     "rrt-epn",    "multistage"};
  return names;
}

}  // namespace dynaplan
