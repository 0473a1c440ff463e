#include "dplan/sim_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace dplan {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (max_steps <= 0) throw ValidationError("max_steps must be > 0");
  if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be >= 0");
}

Bounds road_bounds(const RoadModel& road) {
  if (road.empty()) throw ValidationError("road has no samples");
  Bounds b{road.samples().front().pos, road.samples().front().pos};
  for (const auto& s : road.samples()) {
    b.lo.x = std::min(b.lo.x, s.pos.x);
    b.lo.y = std::min(b.lo.y, s.pos.y);
    b.hi.x = std::max(b.hi.x, s.pos.x);
    b.hi.y = std::max(b.hi.y, s.pos.y);
  }
  const double w = road.half_width();
  b.lo = b.lo - Vec2{w, w};
  b.hi = b.hi + Vec2{w, w};
  return b;
}

namespace {

void bounce_axis(double& p, double& v, double lo, double hi, double r) {
  if (p + r >= hi && v > 0.0) {
    p = std::min(p, 2.0 * (hi - r) - p);
    v = -v;
  } else if (p - r <= lo && v < 0.0) {
    p = std::max(p, 2.0 * (lo + r) - p);
    v = -v;
  }
}

void wrap_axis(double& p, double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) return;
  if (p > hi) p -= span * std::ceil((p - hi) / span);
  if (p < lo) p += span * std::ceil((lo - p) / span);
}

}  // namespace

std::vector<MovingObstacle> update_obstacles(const std::vector<MovingObstacle>& obstacles, const Bounds& bounds,
                                             double t, ObstacleUpdater mode) {
  std::vector<MovingObstacle> out;
  out.reserve(obstacles.size());
  for (const auto& o : obstacles) {
    MovingObstacle n = o;
    n.pos0 = o.at(t);
    n.t0 = t;
    if (o.vel.x != 0.0 || o.vel.y != 0.0) {
      if (mode == ObstacleUpdater::kBounce) {
        bounce_axis(n.pos0.x, n.vel.x, bounds.lo.x, bounds.hi.x, n.radius);
        bounce_axis(n.pos0.y, n.vel.y, bounds.lo.y, bounds.hi.y, n.radius);
      } else {
        wrap_axis(n.pos0.x, bounds.lo.x, bounds.hi.x);
        wrap_axis(n.pos0.y, bounds.lo.y, bounds.hi.y);
      }
    } else {
      n = o;
    }
    out.push_back(n);
  }
  return out;
}

bool detect_change(const std::vector<MovingObstacle>& observed, const std::vector<MovingObstacle>& predicted,
                   double tolerance) {
  if (observed.size() != predicted.size()) return true;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const Vec2 expect = predicted[i].at(observed[i].t0);
    if ((observed[i].pos0 - expect).norm() > tolerance) return true;
  }
  return false;
}

// ---- reports ---------------------------------------------------------------

namespace {

std::string fmt6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string RunReport::to_json(bool include_wall_time) const {
  nlohmann::json j;
  j["planner"] = planner;
  j["success"] = success;
  j["reached_goal"] = reached_goal;
  j["failed_step"] = failed_step;
  j["planning_calls"] = planning_calls;
  j["total_expansions"] = total_expansions;
  if (include_wall_time) j["total_wall_time"] = total_wall_time;
  j["moves"] = moves;
  j["followed_length"] = followed_length;
  j["followed_cost"] = followed_cost;
  auto& steps_j = j["steps"] = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json r{{"step", s.step},           {"t", s.t},
                     {"x", s.x},                 {"y", s.y},
                     {"speed", s.speed},         {"changed", s.changed},
                     {"replanned", s.replanned}, {"expansions", s.expansions},
                     {"eps", s.eps},             {"path_cost", finite_or_null(s.path_cost)}};
    if (include_wall_time) r["wall_time"] = s.wall_time;
    steps_j.push_back(std::move(r));
  }
  if (!cells.empty()) {
    auto& c = j["cells"] = nlohmann::json::array();
    for (const auto& cell : cells) c.push_back({cell.x, cell.y});
  }
  if (!trajectory.empty()) {
    auto& tr = j["trajectory"] = nlohmann::json::array();
    for (const auto& s : trajectory) tr.push_back({s.pos.x, s.pos.y, s.speed, s.t});
  }
  return j.dump(2) + "\n";
}

std::string RunReport::to_csv(bool include_wall_time) const {
  std::string out = "step,t,x,y,speed,changed,replanned,expansions,eps,path_cost";
  out += include_wall_time ? ",wall_time\n" : "\n";
  for (const auto& s : steps) {
    out += std::to_string(s.step) + "," + fmt6(s.t) + "," + fmt6(s.x) + "," + fmt6(s.y) + "," + fmt6(s.speed) + "," +
           (s.changed ? "1" : "0") + "," + (s.replanned ? "1" : "0") + "," + std::to_string(s.expansions) + "," +
           fmt6(s.eps) + "," + fmt6(s.path_cost);
    if (include_wall_time) out += "," + fmt6(s.wall_time);
    out += "\n";
  }
  return out;
}

// ---- grid scenarios --------------------------------------------------------

RunReport run_grid_scenario(const GridWorld& initial, const ScenarioScript& script, PlannerKind kind,
                            const PlannerOptions& options, const SimConfig& config, const PlanObserver& on_plan) {
  config.validate();
  script.validate();
  RunReport report;
  report.planner = std::string(to_string(kind));

  GridWorld world = initial;
  Cell agent = world.start();
  report.cells.push_back(agent);
  const bool keeps_state = is_incremental(kind) || is_anytime(kind);

  std::optional<PlanSession> session;
  std::vector<Cell> path;
  std::size_t path_pos = 0;

  auto call_planner = [&](StepRecord& rec) -> bool {
    const PlanSession* prior = keeps_state && session ? &*session : nullptr;
    PlanSession next = plan(kind, world, prior, options);
    rec.replanned = true;
    rec.expansions = next.metrics.expansions;
    rec.wall_time = next.metrics.wall_time;
    rec.eps = next.metrics.eps;
    rec.path_cost = next.metrics.path_cost;
    ++report.planning_calls;
    report.total_expansions += next.metrics.expansions;
    report.total_wall_time += next.metrics.wall_time;
    session = std::move(next);
    if (on_plan) on_plan(rec.step, *session);
    if (!session->success) return false;
    path = session->path;
    path_pos = 0;
    return true;
  };

  StepRecord first;
  first.x = agent.x;
  first.y = agent.y;
  if (!call_planner(first)) {
    report.steps.push_back(first);
    report.failed_step = 0;
    return report;
  }
  report.steps.push_back(first);

  std::size_t next_event = 0;
  for (int step = 1; step <= config.max_steps; ++step) {
    if (world.is_goal(agent)) break;
    if (path_pos + 1 >= path.size()) {
      report.failed_step = step;
      return report;
    }
    const Cell to = path[++path_pos];
    report.followed_cost += grid_cost8(world, agent, to).value();
    agent = to;
    ++report.moves;
    report.cells.push_back(agent);

    StepRecord rec;
    rec.step = step;
    rec.t = step;
    rec.x = agent.x;
    rec.y = agent.y;
    rec.eps = session->metrics.eps;
    rec.path_cost = session->metrics.path_cost;

    const GridWorld before = world;
    world = world.with_start(agent);
    while (next_event < script.events.size() && script.events[next_event].at_step <= step) {
      ScenarioEvent ev = script.events[next_event++];
      std::erase(ev.add, agent);
      world = world.apply_event(ev);
    }
    world = world.with_start(agent);
    rec.changed = world.obstacles() != before.obstacles();

    if (world.is_goal(agent)) {
      report.steps.push_back(rec);
      break;
    }
    const bool replan = config.replan_policy == ReplanPolicy::kEveryStep || rec.changed || is_anytime(kind);
    if (replan && !call_planner(rec)) {
      report.steps.push_back(rec);
      report.failed_step = step;
      return report;
    }
    report.steps.push_back(rec);
  }

  report.reached_goal = world.is_goal(agent);
  report.success = report.reached_goal;
  report.followed_length = report.moves;
  return report;
}

// ---- dynamic scenarios -----------------------------------------------------

namespace {

KinodynState state_at(const std::vector<KinodynState>& traj, double t, std::size_t& seg) {
  while (seg + 1 < traj.size() && traj[seg + 1].t <= t) ++seg;
  if (seg + 1 >= traj.size()) return traj.back();
  const auto& a = traj[seg];
  const auto& b = traj[seg + 1];
  const double f = (t - a.t) / (b.t - a.t);
  return KinodynState{a.pos + (b.pos - a.pos) * f, b.speed, t};
}

PlanResult run_planner(const KinodynProblem& p, const DynamicPlanner& planner) {
  return planner.anytime ? modified_arastar(p, planner.schedule, planner.options)
                         : modified_astar(p, planner.eps, planner.options);
}

}  // namespace

RunReport run_dynamic_scenario(const KinodynProblem& problem, const DynamicPlanner& planner, const SimConfig& config,
                               const std::vector<VelocityChange>& changes) {
  config.validate();
  validate_problem(problem);
  for (const auto& c : changes) {
    if (c.obstacle >= problem.obstacles.size()) throw ValidationError("velocity change names a missing obstacle");
  }
  RunReport report;
  report.planner = planner.anytime ? "arastar" : "astar";
  const Bounds bounds = road_bounds(problem.road);

  std::vector<MovingObstacle> truth = problem.obstacles;
  std::vector<MovingObstacle> predicted = truth;
  std::vector<KinodynState> traj;

  auto replan = [&](const KinodynState& from, StepRecord& rec) -> bool {
    KinodynProblem p = problem;
    p.start = from;
    p.obstacles = truth;
    PlanResult r = run_planner(p, planner);
    rec.replanned = true;
    rec.expansions = r.expansions;
    rec.wall_time = r.wall_time;
    rec.eps = r.cycles.empty() ? planner.eps : r.cycles.back().eps;
    rec.path_cost = r.cost;
    ++report.planning_calls;
    report.total_expansions += r.expansions;
    report.total_wall_time += r.wall_time;
    predicted = truth;
    if (!r.success) return false;
    traj.insert(traj.end(), r.path.begin() + (traj.empty() ? 0 : 1), r.path.end());
    return true;
  };

  const double t_start = problem.start.t;
  StepRecord first;
  first.t = t_start;
  first.x = problem.start.pos.x;
  first.y = problem.start.pos.y;
  first.speed = problem.start.speed;
  traj.clear();
  if (!replan(problem.start, first)) {
    report.steps.push_back(first);
    report.failed_step = 0;
    return report;
  }
  report.steps.push_back(first);

  std::size_t seg = 0;
  for (int step = 1; step <= config.max_steps; ++step) {
    const double t = t_start + step * config.dt;
    const double t_prev = t - config.dt;
    truth = update_obstacles(truth, bounds, t, config.updater);
    for (const auto& c : changes) {
      if (c.t > t_prev && c.t <= t) truth[c.obstacle].vel = c.vel;
    }

    const KinodynState agent = state_at(traj, t, seg);
    StepRecord rec;
    rec.step = step;
    rec.t = t;
    rec.x = agent.pos.x;
    rec.y = agent.pos.y;
    rec.speed = agent.speed;
    rec.changed = detect_change(truth, predicted, config.tolerance);
    rec.eps = report.steps.back().eps;
    rec.path_cost = report.steps.back().path_cost;

    if (t >= traj.back().t) {
      report.steps.push_back(rec);
      report.reached_goal = true;
      break;
    }
    if (rec.changed || config.replan_policy == ReplanPolicy::kEveryStep) {
      // Commit to the segment in progress and plan from its end.
      const KinodynState from = traj[seg + 1];
      traj.resize(seg + 2);
      if (!replan(from, rec)) {
        report.steps.push_back(rec);
        report.failed_step = step;
        report.trajectory = traj;
        return report;
      }
    }
    report.steps.push_back(rec);
  }

  report.trajectory = traj;
  report.success = report.reached_goal;
  report.moves = static_cast<int>(traj.size()) - 1;
  report.followed_length = report.moves * problem.params.move_length;
  report.followed_cost = traj.back().t - traj.front().t;
  return report;
}

// ---- oracles ---------------------------------------------------------------

std::vector<GridCost> oracle_dijkstra(const GridWorld& world) {
  const int n = world.cell_count();
  std::vector<GridCost> dist(n, GridCost::infinity());
  std::vector<char> done(n, 0);
  dist[world.index(world.start())] = GridCost::zero();
  for (;;) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (done[i] || dist[i].is_infinite()) continue;
      if (best < 0 || dist[i] < dist[best]) best = i;
    }
    if (best < 0) break;
    done[best] = 1;
    const Cell c = world.cell_at(best);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell m{c.x + dx, c.y + dy};
        if (!world.is_free(m)) continue;
        const GridCost step = (dx != 0 && dy != 0) ? GridCost(0, 1) : GridCost(1, 0);
        const GridCost cand = dist[best] + step;
        const int mi = world.index(m);
        if (cand < dist[mi]) dist[mi] = cand;
      }
    }
  }
  return dist;
}

GridCost oracle_optimum(const GridWorld& world) {
  const auto dist = oracle_dijkstra(world);
  GridCost best = GridCost::infinity();
  for (const auto& g : world.goals()) {
    if (dist[world.index(g)] < best) best = dist[world.index(g)];
  }
  return best;
}

std::optional<double> oracle_collision_replay(const std::vector<KinodynState>& path,
                                              const std::vector<MovingObstacle>& obstacles, double agent_radius,
                                              double dt) {
  if (path.empty() || obstacles.empty()) return std::nullopt;
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  const double t0 = path.front().t;
  const double t1 = path.back().t;
  std::size_t seg = 0;
  for (long k = 0;; ++k) {
    double t = t0 + static_cast<double>(k) * dt;
    const bool last = t >= t1;
    if (last) t = t1;
    Vec2 pos = path.back().pos;
    if (path.size() > 1) {
      while (seg + 2 < path.size() && path[seg + 1].t <= t) ++seg;
      const auto& a = path[seg];
      const auto& b = path[seg + 1];
      const double f = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
      pos = a.pos + (b.pos - a.pos) * f;
    }
    for (const auto& o : obstacles) {
      if ((pos - o.at(t)).norm() < agent_radius + o.radius) return t;
    }
    if (last) break;
  }
  return std::nullopt;
}

double min_move_time(const std::vector<KinodynState>& path) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) m = std::min(m, path[i].t - path[i - 1].t);
  return m;
}

}  // namespace dplan
