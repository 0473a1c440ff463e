#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dplan/gridworld.hpp"
#include "dplan/kinodyn.hpp"
#include "dplan/static_planners.hpp"

namespace dplan {

enum class ObstacleUpdater { kBounce, kRepeat };
enum class ReplanPolicy { kOnChange, kEveryStep };

struct SimConfig {
  double dt = 0.1;
  int max_steps = 10000;
  ObstacleUpdater updater = ObstacleUpdater::kBounce;
  ReplanPolicy replan_policy = ReplanPolicy::kOnChange;
  /// Meters an observed obstacle may drift from its predicted line.
  double tolerance = 1e-6;

  void validate() const;
};

/// Axis-aligned area the obstacles live in.
struct Bounds {
  Vec2 lo;
  Vec2 hi;
};

/// Road bounding box grown by the half width.
Bounds road_bounds(const RoadModel& road);

/// Advances every obstacle to time `t` (from its own t0). Bounce mode
/// reflects the velocity component whose border the circle touches while
/// heading out; repeat mode moves a center that left one side to the
/// opposite side, velocity unchanged. Results have t0 = t.
std::vector<MovingObstacle> update_obstacles(const std::vector<MovingObstacle>& obstacles, const Bounds& bounds,
                                             double t, ObstacleUpdater mode);

/// True when the counts differ or some observed obstacle is further than
/// `tolerance` from where `predicted` puts it at the observed snapshot time.
bool detect_change(const std::vector<MovingObstacle>& observed, const std::vector<MovingObstacle>& predicted,
                   double tolerance);

struct StepRecord {
  int step = 0;
  double t = 0.0;
  /// Grid runs: cell coordinates. Dynamic runs: agent position.
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  bool changed = false;
  bool replanned = false;
  long expansions = 0;
  double eps = 1.0;
  double path_cost = kInfinity;
  double wall_time = 0.0;
};

struct RunReport {
  std::string planner;
  bool success = false;
  bool reached_goal = false;
  /// Step at which planning failed, -1 when it never did.
  int failed_step = -1;
  std::vector<StepRecord> steps;
  int planning_calls = 0;
  long total_expansions = 0;
  double total_wall_time = 0.0;
  /// Moves made (grid) or moves times moveLength (dynamic).
  int moves = 0;
  double followed_length = 0.0;
  /// Grid runs: sum of cell costs. Dynamic runs: arrival time at the last node.
  double followed_cost = 0.0;
  /// Dynamic runs: the committed timed path, start state first.
  std::vector<KinodynState> trajectory;
  /// Grid runs: visited cells, start first.
  std::vector<Cell> cells;

  std::string to_json(bool include_wall_time = true) const;
  /// One row per step: step,t,x,y,speed,changed,replanned,expansions,eps,path_cost,wall_time
  std::string to_csv(bool include_wall_time = true) const;
};

/// Movement scenario on a grid. The agent moves one cell per step; the
/// events with at_step == k are applied right after the k-th move (adds on
/// the agent's cell are dropped). Exact planners replan from scratch on a
/// change, D* Lite repairs on a change, anytime planners are called once per
/// step. ReplanPolicy::kEveryStep calls every planner every step.
/// `on_plan` sees every planning call's session with the step it ran at.
using PlanObserver = std::function<void(int step, const PlanSession& session)>;

RunReport run_grid_scenario(const GridWorld& world, const ScenarioScript& script, PlannerKind kind,
                            const PlannerOptions& options = {}, const SimConfig& config = {},
                            const PlanObserver& on_plan = {});

/// Scheduled velocity change of one obstacle (index into the obstacle list).
struct VelocityChange {
  double t = 0.0;
  std::size_t obstacle = 0;
  Vec2 vel;
};

struct DynamicPlanner {
  bool anytime = false;
  double eps = 1.0;
  AnytimeSchedule schedule;
  KinodynSearchOptions options;
};

/// Continuous-time run on a road. Obstacles follow `problem.obstacles`,
/// updated with config.updater inside the road bounds plus `changes`. The
/// agent follows its timed path; when an observation departs from the
/// prediction (or every step under kEveryStep) it replans from scratch,
/// starting from the end of the segment it is on.
RunReport run_dynamic_scenario(const KinodynProblem& problem, const DynamicPlanner& planner,
                               const SimConfig& config = {}, const std::vector<VelocityChange>& changes = {});

/// Exact cost from the start to every cell (infinity when unreachable), by a
/// plain O(V^2) Dijkstra kept independent of the planners.
std::vector<GridCost> oracle_dijkstra(const GridWorld& world);
/// Cheapest start-to-goal cost according to oracle_dijkstra.
GridCost oracle_optimum(const GridWorld& world);

/// Steps the agent along `path` (constant velocity per segment) and the
/// obstacles linearly with time step dt. Returns the first sampled time at
/// which a center distance drops below r_a + r_o.
std::optional<double> oracle_collision_replay(const std::vector<KinodynState>& path,
                                              const std::vector<MovingObstacle>& obstacles, double agent_radius,
                                              double dt);

/// Smallest moveTime along a path; infinity for fewer than two states.
double min_move_time(const std::vector<KinodynState>& path);

}  // namespace dplan
