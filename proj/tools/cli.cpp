#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dplan/grid_io.hpp"
#include "dplan/kinodyn_io.hpp"
#include "dplan/sim_harness.hpp"
#include "dplan/static_planners.hpp"
#include "svg.hpp"

namespace dplan::cli {

namespace fs = std::filesystem;

namespace {

std::string f6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw ValidationError(std::string("bad number '") + item + "' in " + what);
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(std::string("empty list for ") + what);
  return out;
}

Vec2 parse_point(const std::string& text, const char* what) {
  const auto v = parse_numbers(text, what);
  if (v.size() != 2) throw ValidationError(std::string(what) + " must be \"x,y\"");
  return {v[0], v[1]};
}

Cell parse_cell(const std::string& text, const char* what) {
  const Vec2 p = parse_point(text, what);
  if (p.x != std::floor(p.x) || p.y != std::floor(p.y)) throw ValidationError(std::string(what) + " must be integers");
  return {static_cast<int>(p.x), static_cast<int>(p.y)};
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("PLANNER_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ValidationError("PLANNER_SEED must be a non-negative integer");
    return v;
  }
  return flag_seed;
}

// ---- plan-grid -------------------------------------------------------------

struct PlanGridArgs {
  std::string grid;
  std::string scenario;
  std::string planner;
  double eps0 = 2.5;
  double eps_step = 0.5;
  bool reset_eps = false;
  long abort_budget = 0;
  std::string metrics_out;
  std::string report_out;
  std::string svg_out;
  int repetitions = 1;
  std::uint64_t seed = 1;
  bool every_step = false;
  int max_steps = 100000;
};

int plan_grid(const PlanGridArgs& a, std::ostream& out, std::ostream& err) {
  const auto kind = parse_planner_kind(a.planner);
  if (!kind) {
    err << "unknown planner '" << a.planner << "'\n";
    return kExitBadInput;
  }
  if (a.repetitions < 1) throw ValidationError("--repetitions must be >= 1");
  effective_seed(a.seed);
  const GridWorld world = load_grid(a.grid);
  const ScenarioScript script = a.scenario.empty() ? ScenarioScript{} : load_scenario(a.scenario, world);

  PlannerOptions opt;
  opt.eps0 = is_anytime(*kind) ? a.eps0 : 1.0;
  opt.eps_step = a.eps_step;
  opt.reset_eps_on_change = a.reset_eps;
  opt.abort_budget = a.abort_budget;
  SimConfig cfg;
  cfg.max_steps = a.max_steps;
  cfg.replan_policy = a.every_step ? ReplanPolicy::kEveryStep : ReplanPolicy::kOnChange;

  std::string csv =
      "repetition,call,step,agent_x,agent_y,changed_cells,expansions,cumulative_expansions,rhs_recomputations,eps,"
      "path_cost,path_length,from_scratch,wall_time\n";
  RunReport first_report;
  bool failed = false;
  for (int rep = 0; rep < a.repetitions; ++rep) {
    int call = 0;
    long cumulative = 0;
    auto observe = [&](int step, const PlanSession& s) {
      const auto& m = s.metrics;
      cumulative += m.expansions;
      csv += std::to_string(rep) + "," + std::to_string(call) + "," + std::to_string(step) + "," +
             std::to_string(s.world_snapshot.start().x) + "," + std::to_string(s.world_snapshot.start().y) + "," +
             std::to_string(m.changed_cells) + "," + std::to_string(m.expansions) + "," + std::to_string(cumulative) +
             "," + std::to_string(m.rhs_recomputations) + "," + f6(m.eps) + "," + f6(m.path_cost) + "," +
             std::to_string(m.path_length) + "," + (m.from_scratch ? "1" : "0") + "," + f6(m.wall_time) + "\n";
      if (rep == 0 && !a.svg_out.empty()) {
        char name[48];
        std::snprintf(name, sizeof name, "plan_%03d_step_%04d.svg", call, step);
        write_text_file(fs::path(a.svg_out) / name, grid_svg(s.world_snapshot, &s, s.path));
      }
      ++call;
    };
    RunReport r = run_grid_scenario(world, script, *kind, opt, cfg, observe);
    if (rep == 0) first_report = std::move(r);
    failed = failed || !first_report.success;
  }
  write_text_file(a.metrics_out, csv);
  if (!a.report_out.empty()) write_text_file(a.report_out, first_report.to_json(false));
  if (!a.svg_out.empty()) {
    write_text_file(fs::path(a.svg_out) / "followed.svg", grid_svg(world, nullptr, first_report.cells));
  }

  const auto& r = first_report;
  out << "planner " << r.planner << ": " << (r.reached_goal ? "reached goal" : "did not reach goal") << ", moves "
      << r.moves << ", followed cost " << f6(r.followed_cost) << ", planning calls " << r.planning_calls
      << ", expansions " << r.total_expansions << "\n";
  if (failed) {
    err << "planning failed at step " << r.failed_step << "\n";
    return kExitPlanningFailed;
  }
  return kExitOk;
}

// ---- plan-road -------------------------------------------------------------

struct PlanRoadArgs {
  std::string road;
  std::string start;
  std::string goal;
  double move_length = 1.0;
  double cell_length = 0.5;
  double theta_max = 30.0;
  double theta_step = 15.0;
  double eps = 1.0;
  std::string svg_out;
  std::string sweep;
  std::string csv_out;
  bool allow_short_moves = false;
  bool strict = false;
  long max_expansions = 2'000'000;
};

KinodynProblem road_problem(const PlanRoadArgs& a, const RoadModel& road, double move_length) {
  KinodynProblem p;
  p.road = road;
  p.params.move_length = move_length;
  p.params.cell_length = a.cell_length;
  p.params.theta_max = deg_to_rad(a.theta_max);
  p.params.theta_step = deg_to_rad(a.theta_step);
  p.params.w_t = 0.0;
  p.params.w_c = 1.0;
  p.params.strict = a.strict;
  p.start = KinodynState{parse_point(a.start, "--start"), 0.0, 0.0};
  p.goal = parse_point(a.goal, "--goal");
  return p;
}

int plan_road(const PlanRoadArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.eps >= 1.0)) throw ValidationError("--eps must be >= 1");
  const RoadModel road = load_road(a.road);
  KinodynSearchOptions opt;
  opt.static_mode = true;
  opt.allow_short_moves = true;
  opt.max_expansions = a.max_expansions;

  if (!a.sweep.empty()) {
    std::string csv = "move_length,success,nodes,length,cost,expanded,open_inserted,wall_time\n";
    for (double L : parse_numbers(a.sweep, "--sweep-move-length")) {
      const KinodynProblem p = road_problem(a, road, L);
      const PlanResult r = modified_astar(p, a.eps, opt);
      csv += f6(L) + "," + (r.success ? "1" : "0") + "," + std::to_string(r.success ? r.path.size() : 0) + "," +
             (r.success ? f6(r.path_length) : "") + "," + (r.success ? f6(r.cost) : "") + "," +
             std::to_string(r.expansions) + "," + std::to_string(r.open_inserted) + "," + f6(r.wall_time) + "\n";
    }
    if (a.csv_out.empty()) {
      out << csv;
    } else {
      write_text_file(a.csv_out, csv);
    }
    return kExitOk;
  }

  const KinodynProblem p = road_problem(a, road, a.move_length);
  p.params.validate();
  if (!a.allow_short_moves && !p.params.geometry_ok()) {
    err << "moveLength (" << f6(a.move_length) << ") must be greater than sqrt(2) * cellLength ("
        << f6(kSqrt2 * a.cell_length) << "); pass --allow-short-moves to search anyway\n";
    return kExitBadInput;
  }
  const PlanResult r = modified_astar(p, a.eps, opt);
  if (!a.svg_out.empty()) write_text_file(a.svg_out, road_svg(p, r.path));
  if (!r.success) {
    out << "no path, expanded " << r.expansions << ", open " << r.open_inserted << "\n";
    return kExitPlanningFailed;
  }
  out << "nodes " << r.path.size() << ", length " << f6(r.path_length) << ", cost " << f6(r.cost) << ", expanded "
      << r.expansions << ", open " << r.open_inserted << "\n";
  return kExitOk;
}

// ---- plan-dynamic ----------------------------------------------------------

struct PlanDynamicArgs {
  std::string problem;
  std::string planner = "astar";
  std::optional<double> wt;
  std::optional<double> wc;
  std::optional<double> speed_range;
  double eps = 1.0;
  double eps0 = 2.0;
  double eps_step = 0.1;
  double eps_final = 1.0;
  double dt = 0.1;
  long max_expansions = 2'000'000;
  std::string profile_out;
  std::string cycles_out;
  std::string svg_out;
  std::string simulate_out;
};

int plan_dynamic(const PlanDynamicArgs& a, std::ostream& out, std::ostream& err) {
  if (a.planner != "astar" && a.planner != "arastar") {
    err << "--planner must be astar or arastar\n";
    return kExitBadInput;
  }
  KinodynProblem p = load_problem(a.problem);
  if (a.wt && a.wc) {
    p.params.w_t = *a.wt;
    p.params.w_c = *a.wc;
  } else if (a.wt) {
    p.params.w_t = *a.wt;
    p.params.w_c = 1.0 - *a.wt;
  } else if (a.wc) {
    p.params.w_c = *a.wc;
    p.params.w_t = 1.0 - *a.wc;
  }
  if (a.speed_range) p.params.speed_range = *a.speed_range;
  validate_problem(p);

  DynamicPlanner planner;
  planner.anytime = a.planner == "arastar";
  planner.eps = a.eps;
  planner.schedule = AnytimeSchedule{a.eps0, a.eps_step, a.eps_final};
  planner.schedule.validate();
  planner.options.max_expansions = a.max_expansions;
  if (!(a.eps >= 1.0)) throw ValidationError("--eps must be >= 1");

  const PlanResult r = planner.anytime ? modified_arastar(p, planner.schedule, planner.options)
                                       : modified_astar(p, planner.eps, planner.options);

  if (!a.cycles_out.empty()) {
    std::string csv = "cycle,eps,expansions,open_inserted,incons,cost,wall_time\n";
    for (std::size_t i = 0; i < r.cycles.size(); ++i) {
      const auto& c = r.cycles[i];
      csv += std::to_string(i + 1) + "," + f6(c.eps) + "," + std::to_string(c.expansions) + "," +
             std::to_string(c.open_inserted) + "," + std::to_string(c.incons) + "," + f6(c.cost) + "," +
             f6(c.wall_time) + "\n";
    }
    write_text_file(a.cycles_out, csv);
  }
  if (!a.profile_out.empty()) {
    std::string csv = "t,speed,x,y,theta_deg,accel\n";
    for (std::size_t i = 0; i < r.path.size(); ++i) {
      const auto& s = r.path[i];
      const double th = i > 0 ? rad_to_deg(r.step_theta[i - 1]) : 0.0;
      const double ac = i > 0 ? r.step_accel[i - 1] : 0.0;
      csv += f6(s.t) + "," + f6(s.speed) + "," + f6(s.pos.x) + "," + f6(s.pos.y) + "," + f6(th) + "," + f6(ac) + "\n";
    }
    write_text_file(a.profile_out, csv);
  }
  if (!a.svg_out.empty()) write_text_file(a.svg_out, road_svg(p, r.path));

  if (!r.success) {
    out << "no path, expanded " << r.expansions << (r.budget_exhausted ? " (expansion budget exhausted)" : "") << "\n";
    return kExitPlanningFailed;
  }
  out << "nodes " << r.path.size() << ", length " << f6(r.path_length) << ", time " << f6(r.path_time) << ", cost "
      << f6(r.cost) << ", expanded " << r.expansions << ", cycles " << r.cycles.size() << "\n";

  if (!a.simulate_out.empty()) {
    SimConfig cfg;
    cfg.dt = a.dt;
    const RunReport rep = run_dynamic_scenario(p, planner, cfg);
    write_text_file(a.simulate_out, rep.to_json(false));
    out << "simulation: " << (rep.reached_goal ? "reached goal" : "did not reach goal") << ", replans "
        << rep.planning_calls - 1 << "\n";
    if (!rep.success) return kExitPlanningFailed;
  }
  return kExitOk;
}

// ---- generators ------------------------------------------------------------

struct GenGridArgs {
  int width = 20;
  int height = 20;
  double density = 20.0;
  int goals = 1;
  std::string start = "1,1";
  std::uint64_t seed = 1;
  int changes = 0;
  int block_size = 3;
  int removals = 2;
  std::string out;
  std::string scenario_out;
};

int gen_grid(const GenGridArgs& a, std::ostream& out) {
  MazeSpec spec;
  spec.width = a.width;
  spec.height = a.height;
  spec.density_percent = a.density;
  spec.goal_count = a.goals;
  spec.start = parse_cell(a.start, "--start");
  spec.seed = effective_seed(a.seed);
  const GridWorld w = gen_maze(spec);
  save_grid(w, a.out);
  ScenarioScript script;
  if (!a.scenario_out.empty()) {
    ScenarioSpec ss;
    ss.change_count = a.changes;
    ss.seed = spec.seed;
    ss.block_size = a.block_size;
    ss.removals = a.removals;
    script = gen_scenario(w, ss);
    save_scenario(script, a.scenario_out);
  }
  const GridStats st = grid_stats(w, script);
  out << st.width << "x" << st.height << ", " << st.cell_count << " cells, " << st.goal_count << " goals, density "
      << f6(st.density_percent) << "%, " << st.change_count << " changes\n";
  return kExitOk;
}

struct GenProblemArgs {
  ProblemSpec spec;
  std::string out;
};

int gen_problem_cmd(GenProblemArgs a, std::ostream& out) {
  a.spec.seed = effective_seed(a.spec.seed);
  const KinodynProblem p = gen_problem(a.spec);
  save_problem(p, a.out);
  out << "wrote " << a.out << " with " << p.obstacles.size() << " obstacles\n";
  return kExitOk;
}

struct GenRoadArgs {
  double length = 110.0;
  double spacing = 1.0;
  double half_width = 6.0;
  double agent_radius = 1.0;
  std::string origin = "-5,0";
  double heading = 0.0;
  std::string out;
};

int gen_road(const GenRoadArgs& a, std::ostream& out) {
  const RoadModel road = RoadModel::straight(parse_point(a.origin, "--origin"), deg_to_rad(a.heading), a.length,
                                             a.spacing, a.half_width, a.agent_radius);
  save_road(road, a.out);
  out << "wrote " << a.out << " and " << road_sidecar_path(a.out).string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid and kinodynamic path planners", "dplan"};
  app.require_subcommand(1);

  PlanGridArgs pg;
  auto* cmd_pg = app.add_subcommand("plan-grid", "Run a grid planner through a movement scenario");
  cmd_pg->add_option("--grid", pg.grid, "Grid file")->required();
  cmd_pg->add_option("--scenario", pg.scenario, "Scenario JSON (no changes when omitted)");
  cmd_pg->add_option("--planner", pg.planner, "dijkstra, astar, astar-back, dstar-lite, dstar-lite-opt, arastar, adstar, adstar-opt")
      ->required();
  cmd_pg->add_option("--eps0", pg.eps0, "Initial inflation (anytime planners)");
  cmd_pg->add_option("--eps-step", pg.eps_step, "Inflation decrease per cycle");
  cmd_pg->add_option("--reset-eps", pg.reset_eps, "AD*: restart at eps0 after a change");
  cmd_pg->add_option("--abort-budget", pg.abort_budget, "Replan from scratch past this many expansions (0 = never)");
  cmd_pg->add_option("--metrics-out", pg.metrics_out, "Per-call metrics CSV")->required();
  cmd_pg->add_option("--report-out", pg.report_out, "Run report JSON");
  cmd_pg->add_option("--svg-out", pg.svg_out, "Directory for one SVG per planning call");
  cmd_pg->add_option("--repetitions", pg.repetitions, "Runs to repeat");
  cmd_pg->add_option("--seed", pg.seed, "Seed (PLANNER_SEED overrides)");
  cmd_pg->add_flag("--every-step", pg.every_step, "Replan at every step");
  cmd_pg->add_option("--max-steps", pg.max_steps, "Step limit");

  PlanRoadArgs pr;
  auto* cmd_pr = app.add_subcommand("plan-road", "Position-only search along a road");
  cmd_pr->add_option("--road", pr.road, "Road CSV (sidecar JSON next to it)")->required();
  cmd_pr->add_option("--start", pr.start, "Start \"x,y\"")->required();
  cmd_pr->add_option("--goal", pr.goal, "Goal \"x,y\"")->required();
  cmd_pr->add_option("--move-length", pr.move_length, "Meters per move");
  cmd_pr->add_option("--cell-length", pr.cell_length, "Cell side in meters");
  cmd_pr->add_option("--theta-max", pr.theta_max, "Largest heading deviation, degrees");
  cmd_pr->add_option("--theta-step", pr.theta_step, "Heading lattice step, degrees");
  cmd_pr->add_option("--eps", pr.eps, "Heuristic inflation");
  cmd_pr->add_option("--svg-out", pr.svg_out, "SVG rendering of road and path");
  cmd_pr->add_option("--sweep-move-length", pr.sweep, "Comma-separated moveLength values; one CSV row each");
  cmd_pr->add_option("--csv-out", pr.csv_out, "Sweep CSV (stdout when omitted)");
  cmd_pr->add_flag("--allow-short-moves", pr.allow_short_moves, "Search even when moveLength <= sqrt(2)*cellLength");
  cmd_pr->add_flag("--strict", pr.strict, "Check the agent circle's extreme points too");
  cmd_pr->add_option("--max-expansions", pr.max_expansions, "Expansion budget");

  PlanDynamicArgs pd;
  auto* cmd_pd = app.add_subcommand("plan-dynamic", "Kinodynamic search among moving obstacles");
  cmd_pd->add_option("--problem", pd.problem, "Problem JSON")->required();
  cmd_pd->add_option("--planner", pd.planner, "astar or arastar");
  cmd_pd->add_option("--wt", pd.wt, "Time weight");
  cmd_pd->add_option("--wc", pd.wc, "Path cost weight");
  cmd_pd->add_option("--speed-range", pd.speed_range, "Speed band width, m/s");
  cmd_pd->add_option("--eps", pd.eps, "Inflation for astar");
  cmd_pd->add_option("--eps0", pd.eps0, "First inflation for arastar");
  cmd_pd->add_option("--eps-step", pd.eps_step, "Inflation decrease per cycle");
  cmd_pd->add_option("--eps-final", pd.eps_final, "Last inflation searched");
  cmd_pd->add_option("--dt", pd.dt, "Simulation time step, seconds");
  cmd_pd->add_option("--max-expansions", pd.max_expansions, "Expansion budget");
  cmd_pd->add_option("--profile-out", pd.profile_out, "Speed profile CSV");
  cmd_pd->add_option("--cycles-out", pd.cycles_out, "Per-cycle metrics CSV");
  cmd_pd->add_option("--svg-out", pd.svg_out, "SVG rendering");
  cmd_pd->add_option("--simulate-out", pd.simulate_out, "Also simulate the run and write its report JSON");

  GenGridArgs gg;
  auto* cmd_gg = app.add_subcommand("gen-grid", "Generate a maze grid and optional movement scenario");
  cmd_gg->add_option("--width", gg.width, "Columns");
  cmd_gg->add_option("--height", gg.height, "Rows");
  cmd_gg->add_option("--density", gg.density, "Obstacle density, percent");
  cmd_gg->add_option("--goals", gg.goals, "Goal count");
  cmd_gg->add_option("--start", gg.start, "Start cell \"x,y\"");
  cmd_gg->add_option("--seed", gg.seed, "Seed (PLANNER_SEED overrides)");
  cmd_gg->add_option("--changes", gg.changes, "Scenario change count");
  cmd_gg->add_option("--block-size", gg.block_size, "Cells added per change");
  cmd_gg->add_option("--removals", gg.removals, "Cells removed per change");
  cmd_gg->add_option("--out", gg.out, "Grid file")->required();
  cmd_gg->add_option("--scenario-out", gg.scenario_out, "Scenario JSON");

  GenProblemArgs gp;
  auto* cmd_gp = app.add_subcommand("gen-problem", "Generate a straight-road problem with moving vehicles");
  cmd_gp->add_option("--seed", gp.spec.seed, "Seed (PLANNER_SEED overrides)");
  cmd_gp->add_option("--obstacles", gp.spec.obstacle_count, "Vehicle count");
  cmd_gp->add_option("--road-length", gp.spec.road_length, "Meters");
  cmd_gp->add_option("--half-width", gp.spec.half_width, "Meters");
  cmd_gp->add_option("--agent-radius", gp.spec.agent_radius, "Meters");
  cmd_gp->add_option("--goal-ahead", gp.spec.goal_ahead, "Goal distance from the start, meters");
  cmd_gp->add_option("--start-speed", gp.spec.start_speed, "m/s");
  cmd_gp->add_option("--max-speed", gp.spec.max_speed, "m/s");
  cmd_gp->add_option("--a-max", gp.spec.a_max, "m/s^2");
  cmd_gp->add_option("--speed-range", gp.spec.speed_range, "m/s");
  cmd_gp->add_option("--out", gp.out, "Problem JSON")->required();

  GenRoadArgs gr;
  auto* cmd_gr = app.add_subcommand("gen-road", "Write a straight road CSV and its sidecar");
  cmd_gr->add_option("--length", gr.length, "Meters");
  cmd_gr->add_option("--spacing", gr.spacing, "Meters between centerline samples");
  cmd_gr->add_option("--half-width", gr.half_width, "Meters");
  cmd_gr->add_option("--agent-radius", gr.agent_radius, "Meters");
  cmd_gr->add_option("--origin", gr.origin, "First sample \"x,y\"");
  cmd_gr->add_option("--heading", gr.heading, "Degrees");
  cmd_gr->add_option("--out", gr.out, "Road CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*cmd_pg) return plan_grid(pg, out, err);
    if (*cmd_pr) return plan_road(pr, out, err);
    if (*cmd_pd) return plan_dynamic(pd, out, err);
    if (*cmd_gg) return gen_grid(gg, out);
    if (*cmd_gp) return gen_problem_cmd(gp, out);
    if (*cmd_gr) return gen_road(gr, out);
  } catch (const PlanningError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPlanningFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}

}  // namespace dplan::cli
