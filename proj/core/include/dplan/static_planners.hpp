#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dplan/gridworld.hpp"
#include "dplan/search_core.hpp"

namespace dplan {

enum class PlannerKind {
  kDijkstra,
  kAStarForward,
  kAStarBackward,
  kDStarLite,
  kDStarLiteOptimized,
  kARAStar,
  kADStar,
  kADStarOptimized,
};

enum class SearchDirection { kForward, kBackward };

std::string_view to_string(PlannerKind kind);
/// Accepts the names printed by to_string ("dijkstra", "astar", "astar-back",
/// "dstar-lite", "dstar-lite-opt", "arastar", "adstar", "adstar-opt").
std::optional<PlannerKind> parse_planner_kind(std::string_view name);
std::vector<PlannerKind> all_planner_kinds();
bool is_anytime(PlannerKind kind);
/// Planners that keep state between calls instead of searching from scratch.
bool is_incremental(PlannerKind kind);

struct PlannerOptions {
  double eps0 = 1.0;
  double eps_step = 0.5;
  /// AD*: on a world change, restart the schedule at eps0 instead of
  /// continuing to decrease it.
  bool reset_eps_on_change = false;
  /// D* Lite / AD*: replan from scratch once a repair exceeds this many
  /// expansions. 0 disables the abort.
  long abort_budget = 0;
  /// Keep per-cycle Closed entries (see PlanSession::cycle_expanded).
  bool record_expansions = false;
};

struct PlanMetrics {
  /// Expansions of this call, one entry per search cycle.
  std::vector<long> cycle_expansions;
  long expansions = 0;
  long cumulative_expansions = 0;
  /// Full min-over-successors rhs evaluations (lookahead planners only).
  long rhs_recomputations = 0;
  long cumulative_rhs_recomputations = 0;
  double wall_time = 0.0;
  double cumulative_wall_time = 0.0;
  int path_length = 0;
  double path_cost = kInfinity;
  /// Inflation factor of the published solution (1 for exact planners).
  double eps = 1.0;
  int changed_cells = 0;
  bool from_scratch = false;
  bool aborted = false;
  int calls = 0;
};

/// Result of one planning call, and the state carried into the next one.
struct PlanSession {
  PlanSession(PlannerKind kind, GridWorld world) : kind(kind), world_snapshot(std::move(world)) {}

  PlannerKind kind;
  bool success = false;
  std::vector<NodeRecord<GridCost>> records;
  KeyedQueue<int> open;
  std::vector<int> incons;
  /// Cell the search tree is rooted at: the agent start for forward
  /// searches, the goal the path ends in for backward ones.
  Cell plan_start;
  Cell terminal;
  Cell agent_start;
  GridWorld world_snapshot;
  InflationSchedule eps;
  PlanMetrics metrics;
  GridCost cost = GridCost::infinity();
  std::vector<Cell> path;
  GridCost km = GridCost::zero();
  /// Per cycle, the ids that entered Closed (overconsistent expansions).
  std::vector<std::vector<int>> cycle_expanded;
  PlannerOptions options;
};

PlanSession plan_dijkstra(const GridWorld& world);
PlanSession plan_astar(const GridWorld& world, SearchDirection direction);
PlanSession plan_dstar_lite(const GridWorld& world, const PlanSession* prior, bool optimized,
                            const PlannerOptions& options = {});
/// `schedule` is used on the first call; later calls continue the prior's.
PlanSession plan_arastar(const GridWorld& world, const PlanSession* prior, const InflationSchedule& schedule,
                         const PlannerOptions& options = {});
PlanSession plan_adstar(const GridWorld& world, const PlanSession* prior, const InflationSchedule& schedule,
                        bool optimized, const PlannerOptions& options = {});

/// Dispatches on `kind`. Exact planners ignore `prior`.
PlanSession plan(PlannerKind kind, const GridWorld& world, const PlanSession* prior, const PlannerOptions& options = {});

/// Start-to-goal cell sequence. Throws PlanningError on a failed session.
std::vector<Cell> trace_path(const PlanSession& session);

/// Sum of grid_cost8 over consecutive cells; infinity if any step is invalid.
GridCost path_cost(const GridWorld& world, const std::vector<Cell>& path);

}  // namespace dplan
