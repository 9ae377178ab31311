#include "dynaplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace dynaplan {

std::string environment_name(Environment e) {
  switch (e) {
    case Environment::dynamic: return "dynamic";
    case Environment::partial: return "partial";
    case Environment::unknown: return "unknown";
  }
  return "dynamic";
}

Environment parse_environment(const std::string& s) {
  if (s == "dynamic") return Environment::dynamic;
  if (s == "partial") return Environment::partial;
  if (s == "unknown") return Environment::unknown;
  throw std::invalid_argument("unknown environment: " + s);
}

namespace {

std::string map_basename(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

bool rect_equal(const Rect& a, const Rect& b) {
  return a.min_x == b.min_x && a.min_y == b.min_y && a.width == b.width &&
         a.height == b.height;
}

}  // namespace

TrialResult run_trial(const ScenarioSpec& spec, const std::string& planner_id,
                      int trial, long long seed, const TraceSink* sink) {
  WorldState w = load_map_file(spec.map_path);
  if (spec.robot_override) w.robot_pos = *spec.robot_override;
  if (spec.goal_override) w.goal = *spec.goal_override;
  validate_world(w, spec.map_path);

  Rng rng(static_cast<std::uint64_t>(seed));
  w = setup_environment(std::move(w), spec.environment, spec.n_moving, rng);

  auto planner = make_planner(planner_id);
  Budget budget = spec.iterations_mode
                      ? Budget::iterations(static_cast<int>(spec.budget_value))
                      : Budget::wallclock(spec.budget_value);

  MetricsCounters m;
  double path_length = 0.0;
  long long tick = 0;
  const auto wall_start = std::chrono::steady_clock::now();

  while (!w.goal_reached() && w.sim_time <= spec.cutoff) {
    const WorldState before = w;
    w = update_visibility(w);
    w = step_world(w, spec.tick_dt);

    std::vector<int> changed;
    for (std::size_t i = 0; i < w.obstacles.size(); ++i) {
      const Obstacle& now = w.obstacles[i];
      const Obstacle& was = before.obstacles[i];
      if (now.visible && (!was.visible || !rect_equal(now.shape, was.shape)))
        changed.push_back(now.id);
    }

    budget.begin_tick();
    PlannerAction action = planner->cycle(w, changed, budget, rng, m);

    if (sink) {
      TraceRecord rec;
      rec.tick = tick;
      rec.robot = w.robot_pos;
      for (const Obstacle& o : w.obstacles)
        rec.obstacles.push_back({o.id, o.shape, o.visible});
      if (const Path* p = planner->current_path()) rec.path = p->points;
      rec.tree_sizes = planner->tree_sizes();
      (*sink)(rec);
    }

    if (action.kind == PlannerAction::Kind::move &&
        action.path.points.size() >= 2) {
      const double before_len = eval_path(action.path);
      auto [w2, rest] = advance_robot(w, action.path, spec.tick_dt);
      path_length += std::max(0.0, before_len - eval_path(rest));
      w = std::move(w2);
      if (action.track) planner->path_advanced(rest);
    }
    ++tick;
  }

  const double wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - wall_start)
          .count();

  TrialResult r;
  r.planner = planner_id;
  r.map = map_basename(spec.map_path);
  r.environment = environment_name(spec.environment);
  r.trial = trial;
  r.seed = seed;
  r.success = w.goal_reached();
  r.collision_checks = m.collision_checks;
  r.nn_lookups = m.nn_lookups;
  r.sim_time = w.sim_time;
  r.wall_time_ms = spec.iterations_mode ? 0.0 : wall_ms;
  r.path_length = path_length;
  return r;
}

std::vector<TrialResult> run_trials(const ScenarioSpec& spec,
                                    const std::string& planner_id, int trials,
                                    int jobs, const TraceSink* sink) {
  std::vector<TrialResult> results(trials);
  if (trials <= 0) return results;
  jobs = std::clamp(jobs, 1, trials);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      results[t] = run_trial(spec, planner_id, t, spec.seed + t,
                             t == 0 ? sink : nullptr);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

std::vector<SummaryRow> aggregate(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("aggregate: no trials");
  std::vector<std::string> order;
  for (const TrialResult& r : results)
    if (std::find(order.begin(), order.end(), r.planner) == order.end())
      order.push_back(r.planner);

  std::vector<SummaryRow> rows;
  for (const std::string& planner : order) {
    SummaryRow row;
    row.planner = planner;
    double cc = 0.0, nn = 0.0;
    std::vector<double> times;
    for (const TrialResult& r : results) {
      if (r.planner != planner) continue;
      ++row.trials;
      cc += static_cast<double>(r.collision_checks);
      nn += static_cast<double>(r.nn_lookups);
      if (r.success) times.push_back(r.sim_time);
    }
    row.success_rate = 100.0 * times.size() / row.trials;
    row.mean_cc = cc / row.trials;
    row.mean_nn = nn / row.trials;
    if (!times.empty()) {
      double sum = 0.0;
      for (double t : times) sum += t;
      row.mean_time = sum / times.size();
      if (times.size() > 1) {
        double ss = 0.0;
        for (double t : times) ss += (t - row.mean_time) * (t - row.mean_time);
        row.sd_time = std::sqrt(ss / (times.size() - 1));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << "planner,map,environment,trial,seed,success,cc,nn,sim_time,"
         "wall_time_ms,path_length\n";
  for (const TrialResult& r : results) {
    out << r.planner << ',' << r.map << ',' << r.environment << ',' << r.trial
        << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
        << r.collision_checks << ',' << r.nn_lookups << ','
        << fmt_double(r.sim_time) << ',' << fmt_double(r.wall_time_ms) << ','
        << fmt_double(r.path_length) << '\n';
  }
}

std::vector<TrialResult> read_csv(std::istream& in) {
  std::vector<TrialResult> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 11)
      throw std::runtime_error("bad CSV row: " + line);
    TrialResult r;
    r.planner = f[0];
    r.map = f[1];
    r.environment = f[2];
    r.trial = std::stoi(f[3]);
    r.seed = std::stoll(f[4]);
    r.success = f[5] == "1";
    r.collision_checks = std::stoll(f[6]);
    r.nn_lookups = std::stoll(f[7]);
    r.sim_time = std::stod(f[8]);
    r.wall_time_ms = std::stod(f[9]);
    r.path_length = std::stod(f[10]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_trace_line(std::ostream& out, const TraceRecord& rec) {
  nlohmann::json j;
  j["tick"] = rec.tick;
  j["robot"] = {rec.robot.x, rec.robot.y};
  nlohmann::json obs = nlohmann::json::array();
  for (const TraceObstacle& o : rec.obstacles)
    obs.push_back({{"id", o.id},
                   {"rect", {o.shape.min_x, o.shape.min_y, o.shape.width,
                             o.shape.height}},
                   {"visible", o.visible}});
  j["obstacles"] = std::move(obs);
  nlohmann::json path = nlohmann::json::array();
  for (const Point& p : rec.path) path.push_back({p.x, p.y});
  j["path"] = std::move(path);
  j["tree_sizes"] = {rec.tree_sizes.first, rec.tree_sizes.second};
  out << j.dump() << '\n';
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      TraceRecord rec;
      rec.tick = j.at("tick").get<long long>();
      rec.robot = {j.at("robot").at(0).get<double>(),
                   j.at("robot").at(1).get<double>()};
      for (const auto& jo : j.at("obstacles")) {
        const auto& r = jo.at("rect");
        rec.obstacles.push_back({jo.at("id").get<int>(),
                                 {r.at(0).get<double>(), r.at(1).get<double>(),
                                  r.at(2).get<double>(), r.at(3).get<double>()},
                                 jo.at("visible").get<bool>()});
      }
      for (const auto& jp : j.at("path"))
        rec.path.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
      rec.tree_sizes = {j.at("tree_sizes").at(0).get<int>(),
                        j.at("tree_sizes").at(1).get<int>()};
      if (!out.empty() && rec.tick <= out.back().tick)
        throw std::runtime_error("tick not increasing");
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return out;
}

}  // namespace dynaplan
