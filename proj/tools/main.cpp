#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "dynaplan/bench.hpp"
#include "dynaplan/render.hpp"

namespace {

int cmd_run(const std::string& map, const std::string& env,
            const std::string& planner, int trials, long long seed,
            double cutoff, const std::string& budget_mode, double budget,
            int n_moving, const std::string& out_path,
            const std::string& trace_path, int jobs,
            const std::vector<double>& robot_xy,
            const std::vector<double>& goal_xy) {
  using namespace dynaplan;
  ScenarioSpec spec;
  spec.map_path = map;
  spec.environment = parse_environment(env);
  spec.n_moving = n_moving;
  spec.cutoff = cutoff;
  spec.iterations_mode = budget_mode == "iterations";
  spec.budget_value = budget;
  spec.seed = seed;
  if (robot_xy.size() == 2) spec.robot_override = Point{robot_xy[0], robot_xy[1]};
  if (goal_xy.size() == 2) spec.goal_override = Point{goal_xy[0], goal_xy[1]};

  std::ofstream trace_file;
  std::optional<TraceSink> sink;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) {
      std::cerr << "cannot open " << trace_path << " for writing\n";
      return 1;
    }
    sink = [&trace_file](const TraceRecord& rec) {
      write_trace_line(trace_file, rec);
    };
  }

  const std::vector<TrialResult> results =
      run_trials(spec, planner, trials, jobs, sink ? &*sink : nullptr);

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return 1;
  }
  write_csv(out, results);

  for (const SummaryRow& row : aggregate(results))
    std::printf("%-12s trials=%d S.R.=%.1f%% C.C.=%.0f N.N.=%.0f time=%.2f±%.2f s\n",
                row.planner.c_str(), row.trials, row.success_rate, row.mean_cc,
                row.mean_nn, row.mean_time, row.sd_time);
  return 0;
}

int cmd_aggregate(const std::string& csv_path) {
  using namespace dynaplan;
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot open " << csv_path << '\n';
    return 1;
  }
  const auto results = read_csv(in);
  std::printf("%-12s %7s %7s %12s %12s %18s\n", "planner", "trials", "S.R.%",
              "mean C.C.", "mean N.N.", "time mean±sd (s)");
  for (const SummaryRow& row : aggregate(results))
    std::printf("%-12s %7d %7.1f %12.1f %12.1f %10.2f ± %.2f\n",
                row.planner.c_str(), row.trials, row.success_rate, row.mean_cc,
                row.mean_nn, row.mean_time, row.sd_time);
  return 0;
}

int cmd_render(const std::string& trace_path, const std::string& out_dir,
               int every) {
  using namespace dynaplan;
  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "cannot open " << trace_path << '\n';
    return 1;
  }
  const auto trace = read_trace(in);
  std::filesystem::create_directories(out_dir);

  std::ofstream overview(out_dir + "/overview.svg");
  overview << render_overview_svg(trace);

  if (every > 0) {
    const SvgTransform t = fit_transform(trace);
    for (const TraceRecord& rec : trace) {
      if (rec.tick % every != 0) continue;
      std::ofstream frame(out_dir + "/tick_" + std::to_string(rec.tick) +
                          ".svg");
      frame << render_tick_svg(rec, t);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D dynamic path planning benchmark suite"};
  app.require_subcommand(1);

  std::string map, env = "dynamic", planner = "multistage";
  std::string budget_mode = "iterations";
  std::string out_path = "results.csv", trace_path;
  int trials = 1, n_moving = 30;
  long long seed = 1;
  double cutoff = 300.0, budget = 300.0;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  std::vector<double> robot_xy, goal_xy;

  auto* run = app.add_subcommand("run", "Run seeded navigation trials");
  run->add_option("--map", map, "Map file (.rects or .pbm)")->required();
  run->add_option("--env", env, "Environment")
      ->check(CLI::IsMember({"dynamic", "partial", "unknown"}));
  run->add_option("--planner", planner, "Planner id")
      ->check(CLI::IsMember({"rrt", "drrt-adv", "drrt-noadv", "mprrt-adv",
                             "mprrt-noadv", "epn", "rrt-epn", "multistage"}));
  run->add_option("--trials", trials, "Number of trials");
  run->add_option("--seed", seed, "Base seed (trial t uses seed+t)");
  run->add_option("--cutoff", cutoff, "Simulated-seconds cutoff");
  run->add_option("--budget-mode", budget_mode, "Budget accounting")
      ->check(CLI::IsMember({"iterations", "wallclock"}));
  run->add_option("--budget", budget,
                  "Iterations per tick, or ms per tick in wallclock mode");
  run->add_option("--n-moving", n_moving,
                  "Moving obstacles spawned in the dynamic environment");
  run->add_option("--out", out_path, "Results CSV path");
  run->add_option("--trace", trace_path, "Trace JSONL path (trial 0 only)");
  run->add_option("--jobs", jobs, "Worker threads");
  run->add_option("--robot", robot_xy, "Override robot start X Y")
      ->expected(2);
  run->add_option("--goal", goal_xy, "Override goal X Y")->expected(2);

  std::string agg_csv;
  auto* agg = app.add_subcommand("aggregate", "Summarize a results CSV");
  agg->add_option("csv", agg_csv, "Results CSV")->required();

  std::string render_trace_path, render_out = "render";
  int render_every = 0;
  auto* render = app.add_subcommand("render", "Render a trace to SVG");
  render->add_option("trace", render_trace_path, "Trace JSONL")->required();
  render->add_option("--out", render_out, "Output directory")->required();
  render->add_option("--every", render_every,
                     "Also emit a frame every N ticks (0 = overview only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(map, env, planner, trials, seed, cutoff, budget_mode,
                     budget, n_moving, out_path, trace_path, jobs, robot_xy,
                     goal_xy);
    if (agg->parsed()) return cmd_aggregate(agg_csv);
    if (render->parsed())
      return cmd_render(render_trace_path, render_out, render_every);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
