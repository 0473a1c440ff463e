#include "dplan/kinodyn.hpp"

#include <algorithm>
#include <chrono>
#include <string>
#include <unordered_map>

#include "dplan/search_core.hpp"

namespace dplan {

namespace {

using Clock = std::chrono::steady_clock;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Number of steps of `step` spanning [-half, half]; throws unless integral.
int lattice_steps(double half, double step, const char* what) {
  if (half == 0.0) return 0;
  const double n = 2.0 * half / step;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n)) {
    throw ValidationError(std::string(what) + ": step must divide the range [-max, max] evenly");
  }
  return static_cast<int>(r);
}

std::vector<double> symmetric_lattice(double half, int steps) {
  if (steps == 0) return {0.0};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    // Mirror the two halves so +x and -x are exact negatives and 0 is exact.
    const int m = steps - k;
    if (2 * k == steps) {
      out.push_back(0.0);
    } else if (2 * k < steps) {
      out.push_back(-half + 2.0 * half * k / steps);
    } else {
      out.push_back(half - 2.0 * half * m / steps);
    }
  }
  return out;
}

bool point_free(Vec2 p, const RoadModel& road, const OccupancyMap& map) {
  return road.contains(p) && !map.occupied_at(p);
}

}  // namespace

void KinodynParams::validate() const {
  if (!finite_positive(move_length)) throw ValidationError("moveLength must be > 0");
  if (!finite_positive(cell_length)) throw ValidationError("cellLength must be > 0");
  if (!finite_positive(speed_range)) throw ValidationError("speedRange must be > 0");
  if (!finite_positive(max_speed)) throw ValidationError("maxSpeed must be > 0");
  if (!finite_positive(theta_step)) throw ValidationError("theta_step must be > 0");
  if (!finite_positive(a_step)) throw ValidationError("a_step must be > 0");
  if (!finite_positive(check_step)) throw ValidationError("check_step must be > 0");
  if (!(theta_max >= 0.0) || theta_max >= kPi) throw ValidationError("theta_max must be in [0, pi)");
  if (!(a_max >= 0.0) || !std::isfinite(a_max)) throw ValidationError("a_max must be >= 0");
  if (!(radius_growth >= 0.0) || !std::isfinite(radius_growth)) throw ValidationError("radius_growth must be >= 0");
  if (!(w_t >= 0.0) || !(w_c >= 0.0) || std::abs(w_t + w_c - 1.0) > 1e-9) {
    throw ValidationError("weights must be non-negative with w_t + w_c = 1");
  }
  lattice_steps(theta_max, theta_step, "theta_step");
  lattice_steps(a_max, a_step, "a_step");
}

bool KinodynParams::geometry_ok() const { return move_length > std::sqrt(2.0) * cell_length; }

void KinodynParams::check_geometry() const {
  if (!geometry_ok()) {
    throw ValidationError("moveLength must exceed sqrt(2) * cellLength so every successor leaves its parent's cell (" +
                          std::to_string(move_length) + " <= " + std::to_string(std::sqrt(2.0) * cell_length) + ")");
  }
}

std::vector<double> KinodynParams::thetas() const {
  return symmetric_lattice(theta_max, lattice_steps(theta_max, theta_step, "theta_step"));
}

std::vector<double> KinodynParams::accelerations() const {
  return symmetric_lattice(a_max, lattice_steps(a_max, a_step, "a_step"));
}

RoadCell cell_of(Vec2 pos, double cell_length) {
  return RoadCell{static_cast<std::int64_t>(std::floor(pos.x / cell_length)),
                  static_cast<std::int64_t>(std::floor(pos.y / cell_length))};
}

Block block_of(const KinodynState& state, const KinodynParams& params) {
  return Block{cell_of(state.pos, params.cell_length),
               static_cast<std::int64_t>(std::floor(state.speed / params.speed_range))};
}

void MovingObstacle::validate() const {
  if (!finite_positive(radius)) throw ValidationError("obstacle radius must be > 0");
  if (!std::isfinite(pos0.x) || !std::isfinite(pos0.y) || !std::isfinite(vel.x) || !std::isfinite(vel.y) ||
      !std::isfinite(t0)) {
    throw ValidationError("obstacle state must be finite");
  }
}

RoadModel::RoadModel(std::vector<RoadSample> samples, double half_width, double agent_radius)
    : samples_(std::move(samples)), half_width_(half_width), agent_radius_(agent_radius) {
  validate();
}

RoadModel RoadModel::straight(Vec2 origin, double phi, double length, double spacing, double half_width,
                              double agent_radius) {
  if (!finite_positive(length) || !finite_positive(spacing)) throw ValidationError("road length and spacing must be > 0");
  const int n = static_cast<int>(std::ceil(length / spacing - 1e-9));
  std::vector<RoadSample> samples;
  samples.reserve(static_cast<std::size_t>(n) + 1);
  const Vec2 dir = unit(phi);
  for (int i = 0; i <= n; ++i) {
    const double s = std::min(length, i * spacing);
    samples.push_back(RoadSample{s, origin + dir * s, phi});
  }
  return RoadModel(std::move(samples), half_width, agent_radius);
}

void RoadModel::validate() const {
  if (samples_.empty()) throw ValidationError("road has no centerline samples");
  if (!finite_positive(half_width_)) throw ValidationError("road half_width must be > 0");
  if (!(agent_radius_ >= 0.0) || agent_radius_ >= half_width_) {
    throw ValidationError("agent_radius must be >= 0 and smaller than half_width");
  }
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].s > samples_[i - 1].s)) {
      throw ValidationError("road s values must be strictly increasing (sample " + std::to_string(i + 1) + ")");
    }
    if (std::abs(samples_[i].phi - samples_[i - 1].phi) >= kPi) {
      throw ValidationError("road phi jumps by pi or more at sample " + std::to_string(i + 1));
    }
  }
}

std::size_t RoadModel::nearest_index(Vec2 pos) const {
  if (samples_.empty()) throw ValidationError("phi lookup on an empty road");
  std::size_t best = 0;
  double best_d = (samples_[0].pos - pos).norm2();
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const double d = (samples_[i].pos - pos).norm2();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double RoadModel::phi_at(Vec2 pos) const { return samples_[nearest_index(pos)].phi; }

double RoadModel::s_at(Vec2 pos) const {
  const RoadSample& r = samples_[nearest_index(pos)];
  return r.s + (pos - r.pos).dot(unit(r.phi));
}

double RoadModel::distance_to_centerline(Vec2 pos) const {
  if (samples_.empty()) throw ValidationError("distance query on an empty road");
  if (samples_.size() == 1) return (pos - samples_[0].pos).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const Vec2 a = samples_[i - 1].pos;
    const Vec2 ab = samples_[i].pos - a;
    const double len2 = ab.norm2();
    double t = len2 > 0.0 ? (pos - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (pos - (a + ab * t)).norm());
  }
  return best;
}

bool RoadModel::contains(Vec2 pos, double margin) const {
  return distance_to_centerline(pos) + margin <= half_width_ + 1e-12;
}

std::vector<RoadCell> OccupancyMap::cells() const {
  std::vector<RoadCell> out(cells_.begin(), cells_.end());
  std::sort(out.begin(), out.end(), [](const RoadCell& a, const RoadCell& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return out;
}

bool is_free(Vec2 u, Vec2 v, const RoadModel& road, const OccupancyMap& map, const KinodynParams& params) {
  const double len = (v - u).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / params.check_step - 1e-9)));
  const double r = road.agent_radius();
  for (int k = 1; k <= n; ++k) {
    const Vec2 p = (k == n) ? v : u + (v - u) * (static_cast<double>(k) / n);
    if (!point_free(p, road, map)) return false;
    if (params.strict && r > 0.0) {
      for (Vec2 q : {p + Vec2{r, 0.0}, p - Vec2{r, 0.0}, p + Vec2{0.0, r}, p - Vec2{0.0, r}}) {
        if (!point_free(q, road, map)) return false;
      }
    }
  }
  return true;
}

std::vector<Successor> succ_static(Vec2 u, const RoadModel& road, const OccupancyMap& map,
                                   const KinodynParams& params) {
  std::vector<Successor> out;
  const double phi = road.phi_at(u);
  for (double theta : params.thetas()) {
    const Vec2 v = u + unit(phi + theta) * params.move_length;
    if (!is_free(u, v, road, map, params)) continue;
    out.push_back(Successor{KinodynState{v, 0.0, 0.0}, params.move_length + std::abs(theta), theta, 0.0});
  }
  return out;
}

std::optional<double> collision_time(Vec2 agent_pos, Vec2 agent_vel, Vec2 obstacle_pos, Vec2 obstacle_vel,
                                     double radius_sum) {
  const Vec2 dp = agent_pos - obstacle_pos;
  const Vec2 dv = agent_vel - obstacle_vel;
  const double c = dp.norm2() - radius_sum * radius_sum;
  if (c <= 0.0) return 0.0;
  const double a = dv.norm2();
  const double b = 2.0 * dv.dot(dp);
  // With c > 0 both roots share a sign, so a future contact needs b < 0.
  if (a == 0.0 || b >= 0.0) return std::nullopt;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double q = 0.5 * (-b + std::sqrt(disc));
  return c / q;
}

std::vector<MovingObstacle> extrapolate(const std::vector<MovingObstacle>& obstacles, double t,
                                        double radius_growth) {
  std::vector<MovingObstacle> out;
  out.reserve(obstacles.size());
  for (const auto& o : obstacles) {
    const double grow = radius_growth * std::max(0.0, t - o.t0);
    out.push_back(MovingObstacle{o.at(t), o.vel, o.radius + grow, t});
  }
  return out;
}

bool is_dyn_free(const KinodynState& u, const KinodynState& v, const std::vector<MovingObstacle>& obstacles_at_u,
                 const RoadModel& road, const OccupancyMap& map, const KinodynParams& params) {
  if (!is_free(u.pos, v.pos, road, map, params)) return false;
  const Vec2 d = v.pos - u.pos;
  const double len = d.norm();
  if (!(v.speed > 0.0) || len == 0.0) return false;
  const double move_time = len / v.speed;
  const Vec2 vel = d * (v.speed / len);
  for (const auto& o : obstacles_at_u) {
    const auto tc = collision_time(u.pos, vel, o.pos0, o.vel, road.agent_radius() + o.radius);
    if (tc && *tc <= move_time) return false;
  }
  return true;
}

std::vector<Successor> dyn_succ(const KinodynState& u, const RoadModel& road, const OccupancyMap& map,
                                const std::vector<MovingObstacle>& obstacles, const KinodynParams& params) {
  std::vector<Successor> out;
  const auto obs_u = extrapolate(obstacles, u.t, params.radius_growth);
  const double phi = road.phi_at(u.pos);
  const auto thetas = params.thetas();
  const double len = params.move_length;
  for (double a : params.accelerations()) {
    const double disc = u.speed * u.speed + 4.0 * a * len;
    if (disc < 0.0) continue;
    const double speed = 0.5 * (u.speed + std::sqrt(disc));
    // Zero speed would never arrive; see the move-time division below.
    if (!(speed > 0.0) || speed > params.max_speed * (1.0 + 1e-12)) continue;
    const double move_time = len / speed;
    for (double theta : thetas) {
      KinodynState v{u.pos + unit(phi + theta) * len, speed, u.t + move_time};
      if (!is_dyn_free(u, v, obs_u, road, map, params)) continue;
      out.push_back(Successor{v, params.w_t * move_time + params.w_c * (len + std::abs(theta)), theta, a});
    }
  }
  return out;
}

double h_kinodyn(const KinodynState& u, Vec2 goal, const KinodynParams& params) {
  if (cell_of(u.pos, params.cell_length) == cell_of(goal, params.cell_length)) return 0.0;
  const double d = (goal - u.pos).norm();
  return params.w_t * d / params.max_speed + params.w_c * d;
}

void AnytimeSchedule::validate() const {
  if (!(eps0 >= 1.0) || !std::isfinite(eps0)) throw ValidationError("eps0 must be a finite value >= 1");
  if (!finite_positive(step)) throw ValidationError("eps step must be > 0");
  if (!(eps_final >= 1.0) || eps_final > eps0) throw ValidationError("eps_final must be in [1, eps0]");
}

void validate_problem(const KinodynProblem& problem) {
  problem.params.validate();
  problem.road.validate();
  for (const auto& o : problem.obstacles) o.validate();
  const auto& s = problem.start;
  if (!(s.speed >= 0.0) || s.speed > problem.params.max_speed) throw ValidationError("start speed outside [0, maxSpeed]");
  if (!(s.t >= 0.0) || !std::isfinite(s.t)) throw ValidationError("start time must be >= 0");
  if (!std::isfinite(s.pos.x) || !std::isfinite(s.pos.y) || !std::isfinite(problem.goal.x) ||
      !std::isfinite(problem.goal.y)) {
    throw ValidationError("start and goal positions must be finite");
  }
}

namespace {

// Search over blocks shared by the modified A* and ARA*.
class BlockSearch {
 public:
  struct Node {
    KinodynState state;
    Block block;
    double g = 0.0;
    double h = 0.0;
    int parent = -1;
    double theta = 0.0;
    double accel = 0.0;
  };

  BlockSearch(const KinodynProblem& p, const KinodynSearchOptions& o, bool anytime)
      : p_(p), opt_(o), anytime_(anytime), goal_cell_(cell_of(p.goal, p.params.cell_length)) {
    validate_problem(p);
    if (!o.allow_short_moves) p.params.check_geometry();
    HeuristicKind kind = o.heuristic;
    if (kind == HeuristicKind::kAuto) {
      const bool road_only = o.static_mode || (p.obstacles.empty() && p.params.w_t == 0.0);
      kind = road_only ? HeuristicKind::kCenterline : HeuristicKind::kEuclidean;
    }
    centerline_ = kind == HeuristicKind::kCenterline;
    goal_s_ = p.road.s_at(p.goal);
  }

  double heuristic(const KinodynState& s) const {
    const auto& prm = p_.params;
    if (cell_of(s.pos, prm.cell_length) == goal_cell_) return 0.0;
    const double d = centerline_ ? std::max(0.0, goal_s_ - p_.road.s_at(s.pos)) : (p_.goal - s.pos).norm();
    if (opt_.static_mode) return d;
    return prm.w_t * d / prm.max_speed + prm.w_c * d;
  }

  Block block(const KinodynState& s) const {
    if (opt_.static_mode) return Block{cell_of(s.pos, p_.params.cell_length), 0};
    return block_of(s, p_.params);
  }

  SearchKey key(int i) const { return SearchKey::one(nodes_[i].g + eps_ * nodes_[i].h); }

  void start(double eps) {
    eps_ = eps;
    KinodynState s = p_.start;
    if (opt_.static_mode) s.speed = 0.0;
    Node n{s, block(s), 0.0, heuristic(s), -1, 0.0, 0.0};
    nodes_.push_back(n);
    insert_open(0);
    if (anytime_ && n.block.cell == goal_cell_) {
      g_goal_ = 0.0;
      goal_node_ = 0;
    }
  }

  void set_eps(double eps) {
    eps_ = eps;
    for (int i : incons_order_) {
      const Block& b = nodes_[i].block;
      auto it = open_by_block_.find(b);
      if (it == open_by_block_.end()) {
        insert_open(i);
      } else if (nodes_[it->second].g > nodes_[i].g) {
        open_.erase(it->second);
        insert_open(i);
      }
    }
    incons_order_.clear();
    incons_.clear();
    closed_.clear();
    open_.rekey([&](int id) { return key(id); });
  }

  // One improvePath (anytime) or the whole search (A*). Returns expansions.
  long run(CycleStats& stats) {
    long expansions = 0;
    const long inserted_before = open_inserted_;
    while (!open_.empty()) {
      if (anytime_ && !(g_goal_ > open_.top_key()->k1())) break;
      if (total_expansions_ >= opt_.max_expansions) {
        budget_exhausted_ = true;
        break;
      }
      const int u = open_.pop_min().id;
      const Node un = nodes_[u];
      open_by_block_.erase(un.block);
      closed_.emplace(un.block, un.g);
      ++expansions;
      ++total_expansions_;
      const auto succs = opt_.static_mode ? succ_static(un.state.pos, p_.road, p_.map, p_.params)
                                          : dyn_succ(un.state, p_.road, p_.map, p_.obstacles, p_.params);
      for (const auto& s : succs) admit(u, s);
      if (!anytime_ && un.block.cell == goal_cell_) {
        goal_node_ = u;
        g_goal_ = un.g;
        break;
      }
    }
    stats.expansions = expansions;
    stats.open_inserted = open_inserted_ - inserted_before;
    stats.incons = static_cast<long>(incons_order_.size());
    stats.cost = g_goal_;
    return expansions;
  }

  void fill(PlanResult& r) const {
    r.open_inserted = open_inserted_;
    r.expansions = total_expansions_;
    r.budget_exhausted = budget_exhausted_;
    r.success = goal_node_ >= 0;
    if (!r.success) return;
    r.cost = g_goal_;
    std::vector<int> chain;
    for (int i = goal_node_; i >= 0; i = nodes_[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const Node& n = nodes_[chain[k]];
      r.path.push_back(n.state);
      if (k > 0) {
        r.step_theta.push_back(n.theta);
        r.step_accel.push_back(n.accel);
      }
    }
    r.path_length = static_cast<double>(r.path.size() - 1) * p_.params.move_length;
    r.path_time = r.path.back().t - r.path.front().t;
  }

 private:
  void insert_open(int i) {
    open_.insert_or_update(i, key(i));
    // Replacing a block's node does not admit a new block.
    if (open_by_block_.insert_or_assign(nodes_[i].block, i).second) ++open_inserted_;
  }

  void admit(int parent, const Successor& s) {
    Node v{s.state, block(s.state), nodes_[parent].g + s.cost, 0.0, parent, s.theta, s.accel};
    auto closed_it = closed_.find(v.block);
    if (closed_it != closed_.end()) {
      // Only strict improvements over the expanded node are kept for later
      // cycles; the first one per block wins.
      if (anytime_ && v.g < closed_it->second && !incons_.count(v.block)) {
        v.h = heuristic(v.state);
        nodes_.push_back(v);
        incons_.insert(v.block);
        incons_order_.push_back(static_cast<int>(nodes_.size()) - 1);
      }
      return;
    }
    auto open_it = open_by_block_.find(v.block);
    if (open_it != open_by_block_.end() && !(nodes_[open_it->second].g > v.g)) return;
    v.h = heuristic(v.state);
    nodes_.push_back(v);
    const int idx = static_cast<int>(nodes_.size()) - 1;
    if (open_it != open_by_block_.end()) open_.erase(open_it->second);
    insert_open(idx);
    if (anytime_ && v.block.cell == goal_cell_ && g_goal_ > v.g) {
      g_goal_ = v.g;
      goal_node_ = idx;
    }
  }

  const KinodynProblem& p_;
  KinodynSearchOptions opt_;
  bool anytime_;
  RoadCell goal_cell_;
  bool centerline_ = false;
  double goal_s_ = 0.0;
  double eps_ = 1.0;

  std::vector<Node> nodes_;
  KeyedQueue<int> open_;
  std::unordered_map<Block, int, BlockHash> open_by_block_;
  std::unordered_map<Block, double, BlockHash> closed_;
  std::unordered_set<Block, BlockHash> incons_;
  std::vector<int> incons_order_;
  double g_goal_ = std::numeric_limits<double>::infinity();
  int goal_node_ = -1;
  long open_inserted_ = 0;
  long total_expansions_ = 0;
  bool budget_exhausted_ = false;
};

}  // namespace

PlanResult modified_astar(const KinodynProblem& problem, double eps, const KinodynSearchOptions& options) {
  if (!(eps >= 1.0) || !std::isfinite(eps)) throw ValidationError("eps must be a finite value >= 1");
  const auto t0 = Clock::now();
  BlockSearch search(problem, options, false);
  search.start(eps);
  CycleStats stats;
  stats.eps = eps;
  search.run(stats);
  PlanResult r;
  search.fill(r);
  r.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  stats.wall_time = r.wall_time;
  r.cycles.push_back(stats);
  return r;
}

PlanResult modified_arastar(const KinodynProblem& problem, const AnytimeSchedule& schedule,
                            const KinodynSearchOptions& options) {
  schedule.validate();
  const auto t_start = Clock::now();
  BlockSearch search(problem, options, true);
  InflationSchedule eps(schedule.eps0, schedule.step);
  PlanResult r;
  search.start(eps.current());
  while (true) {
    const auto t0 = Clock::now();
    CycleStats stats;
    stats.eps = eps.current();
    search.run(stats);
    stats.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    r.cycles.push_back(stats);
    if (!std::isfinite(stats.cost)) break;
    if (eps.current() <= schedule.eps_final + 1e-9 || eps.at_floor()) break;
    eps.decrease();
    if (eps.current() < schedule.eps_final) break;
    search.set_eps(eps.current());
  }
  search.fill(r);
  r.wall_time = std::chrono::duration<double>(Clock::now() - t_start).count();
  return r;
}

}  // namespace dplan
