#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_set>
#include <vector>

#include "dplan/errors.hpp"

namespace dplan {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend Vec2 operator*(double k, Vec2 a) { return {a.x * k, a.y * k}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

struct KinodynParams {
  double move_length = 1.0;
  double cell_length = 0.5;
  double speed_range = 0.01;
  double theta_max = deg_to_rad(30.0);
  double theta_step = deg_to_rad(15.0);
  double a_max = 4.0;
  double a_step = 1.0;
  double max_speed = 25.0;
  double w_t = 0.5;
  double w_c = 0.5;
  /// Obstacle radius growth per second of extrapolation (uncertainty margin).
  double radius_growth = 0.0;
  /// Largest gap between points checked along a move against static obstacles.
  double check_step = 0.5;
  /// Also check the four axis-extreme points of the agent circle.
  bool strict = false;

  /// Throws ValidationError. The moveLength > sqrt(2)*cellLength condition is
  /// checked separately by check_geometry.
  void validate() const;
  void check_geometry() const;
  bool geometry_ok() const;

  /// -theta_max, -theta_max + theta_step, ..., +theta_max.
  std::vector<double> thetas() const;
  /// -a_max, -a_max + a_step, ..., +a_max.
  std::vector<double> accelerations() const;
};

struct KinodynState {
  Vec2 pos;
  double speed = 0.0;
  double t = 0.0;
};

struct RoadCell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const RoadCell&, const RoadCell&) = default;
};

struct Block {
  RoadCell cell;
  std::int64_t speed_band = 0;
  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockHash {
  std::size_t operator()(const Block& b) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(b.cell.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(b.cell.y) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(b.speed_band) + 0x94D049BB133111EBULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct RoadCellHash {
  std::size_t operator()(const RoadCell& c) const noexcept { return BlockHash{}(Block{c, 0}); }
};

/// Floor of pos / cell_length per component.
RoadCell cell_of(Vec2 pos, double cell_length);
Block block_of(const KinodynState& state, const KinodynParams& params);

/// Circle moving with constant velocity; `pos0` is its position at time t0.
struct MovingObstacle {
  Vec2 pos0;
  Vec2 vel;
  double radius = 1.0;
  double t0 = 0.0;

  Vec2 at(double t) const { return pos0 + vel * (t - t0); }
  void validate() const;
};

struct RoadSample {
  double s = 0.0;
  Vec2 pos;
  double phi = 0.0;
};

/// Road given by centerline samples. A point is on the road when its distance
/// to the centerline polyline is at most half_width.
class RoadModel {
 public:
  RoadModel() = default;
  RoadModel(std::vector<RoadSample> samples, double half_width, double agent_radius);

  /// Straight road starting at `origin` heading `phi`, sampled every `spacing` meters.
  static RoadModel straight(Vec2 origin, double phi, double length, double spacing, double half_width,
                            double agent_radius);

  const std::vector<RoadSample>& samples() const noexcept { return samples_; }
  double half_width() const noexcept { return half_width_; }
  double agent_radius() const noexcept { return agent_radius_; }
  bool empty() const noexcept { return samples_.empty(); }

  /// Nearest sample; ties go to the lower s.
  std::size_t nearest_index(Vec2 pos) const;
  double phi_at(Vec2 pos) const;
  /// Arc-length coordinate of pos projected on the tangent of its nearest sample.
  double s_at(Vec2 pos) const;
  double distance_to_centerline(Vec2 pos) const;
  bool contains(Vec2 pos, double margin = 0.0) const;

  void validate() const;

 private:
  std::vector<RoadSample> samples_;
  double half_width_ = 0.0;
  double agent_radius_ = 0.0;
};

/// Static obstacles as occupied square cells of side `resolution`
/// (cell (i, j) covers [i*res, (i+1)*res) x [j*res, (j+1)*res)).
/// Cells not listed are free, including everything outside the listed extent.
class OccupancyMap {
 public:
  OccupancyMap() = default;
  explicit OccupancyMap(double resolution) : resolution_(resolution) {}

  double resolution() const noexcept { return resolution_; }
  void add(RoadCell c) { cells_.insert(c); }
  bool occupied(RoadCell c) const { return cells_.count(c) != 0; }
  bool occupied_at(Vec2 pos) const { return !cells_.empty() && occupied(cell_of(pos, resolution_)); }
  std::size_t size() const noexcept { return cells_.size(); }
  /// Cells in ascending (x, y) order.
  std::vector<RoadCell> cells() const;

 private:
  double resolution_ = 0.5;
  std::unordered_set<RoadCell, RoadCellHash> cells_;
};

struct Successor {
  KinodynState state;
  double cost = 0.0;
  double theta = 0.0;
  double accel = 0.0;
};

/// Static collision check of the move u -> v: road containment of the
/// agent center (plus the four extreme points of its circle in strict mode)
/// and static obstacles, at v and at points along the move no further than
/// params.check_step apart.
bool is_free(Vec2 u, Vec2 v, const RoadModel& road, const OccupancyMap& map, const KinodynParams& params);

/// Position-only successors at speed 0, cost moveLength + |theta|.
std::vector<Successor> succ_static(Vec2 u, const RoadModel& road, const OccupancyMap& map, const KinodynParams& params);

/// Smallest non-negative time at which two circles with the given center
/// positions (at a common time) and velocities touch; `radius_sum` = r_a + r_o.
/// 0 when already overlapping, nullopt when they never touch.
std::optional<double> collision_time(Vec2 agent_pos, Vec2 agent_vel, Vec2 obstacle_pos, Vec2 obstacle_vel,
                                     double radius_sum);

/// Obstacles extrapolated to time t, with radius growth applied.
std::vector<MovingObstacle> extrapolate(const std::vector<MovingObstacle>& obstacles, double t,
                                        double radius_growth);

/// `obstacles_at_u` must already be extrapolated to u.t.
bool is_dyn_free(const KinodynState& u, const KinodynState& v, const std::vector<MovingObstacle>& obstacles_at_u,
                 const RoadModel& road, const OccupancyMap& map, const KinodynParams& params);

std::vector<Successor> dyn_succ(const KinodynState& u, const RoadModel& road, const OccupancyMap& map,
                                const std::vector<MovingObstacle>& obstacles, const KinodynParams& params);

/// Time-and-distance heuristic: 0 in the goal cell, else
/// w_t * d / maxSpeed + w_c * d with d the Euclidean distance.
double h_kinodyn(const KinodynState& u, Vec2 goal, const KinodynParams& params);

enum class HeuristicKind { kAuto, kEuclidean, kCenterline };

struct KinodynProblem {
  RoadModel road;
  OccupancyMap map;
  std::vector<MovingObstacle> obstacles;
  KinodynParams params;
  KinodynState start;
  Vec2 goal;
};

struct KinodynSearchOptions {
  /// Position-only search (succ_static, speed ignored) instead of dyn_succ.
  bool static_mode = false;
  HeuristicKind heuristic = HeuristicKind::kAuto;
  /// Run even when moveLength <= sqrt(2) * cellLength.
  bool allow_short_moves = true;
  long max_expansions = 2'000'000;
};

struct CycleStats {
  double eps = 1.0;
  long expansions = 0;
  long open_inserted = 0;
  long incons = 0;
  double cost = std::numeric_limits<double>::infinity();
  double wall_time = 0.0;
};

struct PlanResult {
  bool success = false;
  /// Start state first; path.back() lies in the goal cell.
  std::vector<KinodynState> path;
  /// Deviation from phi and acceleration of each step (path.size() - 1 entries).
  std::vector<double> step_theta;
  std::vector<double> step_accel;
  double cost = std::numeric_limits<double>::infinity();
  double path_length = 0.0;
  double path_time = 0.0;
  long expansions = 0;
  long open_inserted = 0;
  bool budget_exhausted = false;
  std::vector<CycleStats> cycles;
  double wall_time = 0.0;
};

/// Modified A* over blocks, goal test on expansion. eps > 1 gives an
/// inflated search.
PlanResult modified_astar(const KinodynProblem& problem, double eps, const KinodynSearchOptions& options = {});

struct AnytimeSchedule {
  double eps0 = 2.0;
  double step = 0.1;
  /// Last inflation factor searched.
  double eps_final = 1.0;
  void validate() const;
};

/// Modified ARA*: one improvePath per inflation value from eps0 down to
/// eps_final, publishing a solution after each cycle.
PlanResult modified_arastar(const KinodynProblem& problem, const AnytimeSchedule& schedule,
                            const KinodynSearchOptions& options = {});

/// Validates road, params, obstacles and start.
void validate_problem(const KinodynProblem& problem);

}  // namespace dplan
