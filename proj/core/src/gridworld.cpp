#include "dplan/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <queue>
#include <tuple>

#include "rng.hpp"

namespace dplan {

std::string to_string(const Cell& c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

double GridCost::value() const noexcept {
  if (infinite_) return std::numeric_limits<double>::infinity();
  return static_cast<double>(straight_) + static_cast<double>(diagonal_) * kSqrt2;
}

void ScenarioScript::validate() const {
  int last = 0;
  for (const auto& e : events) {
    if (e.at_step < 1) throw ValidationError("scenario event at_step must be >= 1");
    if (e.at_step < last) throw ValidationError("scenario events must be sorted by at_step");
    last = e.at_step;
  }
}

GridWorld::GridWorld(int width, int height, std::vector<std::uint8_t> obstacles, Cell start, std::vector<Cell> goals)
    : width_(width), height_(height), obstacles_(std::move(obstacles)), start_(start), goals_(std::move(goals)) {
  std::sort(goals_.begin(), goals_.end(), [](const Cell& a, const Cell& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  validate();
}

GridWorld GridWorld::empty(int width, int height, Cell start, std::vector<Cell> goals) {
  if (width <= 0 || height <= 0) throw ValidationError("grid dimensions must be positive");
  return GridWorld(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0), start,
                   std::move(goals));
}

void GridWorld::validate() const {
  if (width_ <= 0 || height_ <= 0) throw ValidationError("grid dimensions must be positive");
  if (obstacles_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw ValidationError("obstacle matrix size does not match grid dimensions");
  }
  if (!in_bounds(start_)) throw ValidationError("start " + to_string(start_) + " out of bounds");
  if (is_obstacle(start_)) throw ValidationError("start " + to_string(start_) + " is on an obstacle");
  if (goals_.empty()) throw ValidationError("grid needs at least one goal");
  for (const auto& g : goals_) {
    if (!in_bounds(g)) throw ValidationError("goal " + to_string(g) + " out of bounds");
    if (is_obstacle(g)) throw ValidationError("goal " + to_string(g) + " is on an obstacle");
  }
}

bool GridWorld::is_goal(const Cell& c) const noexcept {
  return std::find(goals_.begin(), goals_.end(), c) != goals_.end();
}

int GridWorld::obstacle_count() const noexcept {
  return static_cast<int>(std::count_if(obstacles_.begin(), obstacles_.end(), [](std::uint8_t v) { return v != 0; }));
}

double GridWorld::density_percent() const noexcept {
  return 100.0 * static_cast<double>(obstacle_count()) / static_cast<double>(cell_count());
}

GridWorld GridWorld::with_start(const Cell& start) const {
  GridWorld copy = *this;
  copy.start_ = start;
  copy.validate();
  return copy;
}

GridWorld GridWorld::with_goals(std::vector<Cell> goals) const {
  GridWorld copy = *this;
  copy.goals_ = std::move(goals);
  copy.validate();
  return copy;
}

GridWorld GridWorld::apply_event(const ScenarioEvent& event) const {
  GridWorld copy = *this;
  for (const auto& c : event.add) {
    if (!in_bounds(c)) throw ValidationError("event cell " + to_string(c) + " out of bounds");
    if (c == start_) throw ValidationError("cannot place an obstacle on the start cell " + to_string(c));
    if (is_goal(c)) throw ValidationError("cannot place an obstacle on goal cell " + to_string(c));
    copy.obstacles_[index(c)] = 1;
  }
  for (const auto& c : event.remove) {
    if (!in_bounds(c)) throw ValidationError("event cell " + to_string(c) + " out of bounds");
    copy.obstacles_[index(c)] = 0;
  }
  return copy;
}

std::vector<Cell> GridWorld::changed_cells(const GridWorld& other) const {
  if (!same_layout(other)) throw ValidationError("changed_cells on grids of different dimensions");
  std::vector<Cell> out;
  for (int i = 0; i < cell_count(); ++i) {
    if ((obstacles_[i] != 0) != (other.obstacles_[i] != 0)) out.push_back(cell_at(i));
  }
  return out;
}

bool GridWorld::same_layout(const GridWorld& other) const noexcept {
  return width_ == other.width_ && height_ == other.height_;
}

bool operator==(const GridWorld& a, const GridWorld& b) {
  return a.width_ == b.width_ && a.height_ == b.height_ && a.obstacles_ == b.obstacles_ && a.start_ == b.start_ &&
         a.goals_ == b.goals_;
}

namespace {

constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

}  // namespace

std::vector<Cell> adjacent8(const GridWorld& world, const Cell& cell) {
  std::vector<Cell> out;
  out.reserve(8);
  for (int k = 0; k < 8; ++k) {
    Cell n{cell.x + kDx[k], cell.y + kDy[k]};
    if (world.in_bounds(n)) out.push_back(n);
  }
  return out;
}

std::vector<Cell> neighbors8(const GridWorld& world, const Cell& cell) {
  if (!world.in_bounds(cell)) throw ValidationError("neighbors8: cell " + to_string(cell) + " out of bounds");
  std::vector<Cell> out;
  out.reserve(8);
  for (int k = 0; k < 8; ++k) {
    Cell n{cell.x + kDx[k], cell.y + kDy[k]};
    if (world.is_free(n)) out.push_back(n);
  }
  return out;
}

GridCost grid_cost8(const GridWorld& world, const Cell& a, const Cell& b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  if (dx > 1 || dy > 1 || (dx == 0 && dy == 0)) return GridCost::infinity();
  if (!world.is_free(a) || !world.is_free(b)) return GridCost::infinity();
  return (dx + dy == 2) ? GridCost(0, 1) : GridCost(1, 0);
}

double cost8(const GridWorld& world, const Cell& a, const Cell& b) { return grid_cost8(world, a, b).value(); }

GridCost h_diagonal_cost(const Cell& a, const Cell& b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  return GridCost(std::abs(dx - dy), std::min(dx, dy));
}

double h_diagonal(const Cell& a, const Cell& b) { return h_diagonal_cost(a, b).value(); }

std::vector<std::uint8_t> flood_fill(const GridWorld& world, const Cell& from) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(world.cell_count()), 0);
  if (!world.is_free(from)) return seen;
  std::deque<Cell> frontier{from};
  seen[world.index(from)] = 1;
  while (!frontier.empty()) {
    Cell c = frontier.front();
    frontier.pop_front();
    for (const Cell& n : neighbors8(world, c)) {
      if (!seen[world.index(n)]) {
        seen[world.index(n)] = 1;
        frontier.push_back(n);
      }
    }
  }
  return seen;
}

namespace {

// Optimal path from `from` to the nearest goal; used only to script
// scenarios. Ties resolve on cell index so the result is deterministic.
std::vector<Cell> optimal_path(const GridWorld& world, const Cell& from) {
  const int n = world.cell_count();
  std::vector<GridCost> dist(n, GridCost::infinity());
  std::vector<int> parent(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[world.index(from)] = GridCost::zero();
  pq.push({0.0, world.index(from)});
  int reached = -1;
  while (!pq.empty()) {
    auto [d, idx] = pq.top();
    pq.pop();
    if (d != dist[idx].value()) continue;
    Cell c = world.cell_at(idx);
    if (world.is_goal(c)) {
      reached = idx;
      break;
    }
    for (const Cell& nb : neighbors8(world, c)) {
      const int j = world.index(nb);
      GridCost cand = dist[idx] + grid_cost8(world, c, nb);
      if (cand < dist[j]) {
        dist[j] = cand;
        parent[j] = idx;
        pq.push({cand.value(), j});
      }
    }
  }
  std::vector<Cell> path;
  for (int i = reached; i >= 0; i = parent[i]) path.push_back(world.cell_at(i));
  std::reverse(path.begin(), path.end());
  return path;
}

bool any_goal_reachable(const GridWorld& world, const Cell& from) {
  auto seen = flood_fill(world, from);
  for (const auto& g : world.goals()) {
    if (seen[world.index(g)]) return true;
  }
  return false;
}

}  // namespace

namespace {

// True when the free cells around `c` stay 8-connected through each other
// after `c` becomes an obstacle, which keeps the whole free region connected.
bool keeps_free_space_connected(const GridWorld& probe, const std::vector<std::uint8_t>& obs, const Cell& c) {
  static constexpr int kRing[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}};
  Cell free_cells[8];
  int n = 0;
  for (const auto& d : kRing) {
    const Cell m{c.x + d[0], c.y + d[1]};
    if (probe.in_bounds(m) && obs[probe.index(m)] == 0) free_cells[n++] = m;
  }
  if (n <= 1) return true;
  int comp[8];
  for (int i = 0; i < n; ++i) comp[i] = i;
  auto find = [&](int i) {
    while (comp[i] != i) i = comp[i] = comp[comp[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(free_cells[i].x - free_cells[j].x) <= 1 && std::abs(free_cells[i].y - free_cells[j].y) <= 1) {
        comp[find(i)] = find(j);
      }
    }
  }
  for (int i = 1; i < n; ++i) {
    if (find(i) != find(0)) return false;
  }
  return true;
}

}  // namespace

GridWorld gen_maze(const MazeSpec& spec) {
  if (spec.width < 4 || spec.height < 4) throw ValidationError("maze dimensions must be at least 4x4");
  if (!(spec.density_percent >= 0.0) || spec.density_percent >= 60.0) {
    throw ValidationError("maze density must be in [0, 60) percent");
  }
  if (spec.goal_count < 1) throw ValidationError("maze needs at least one goal");
  const int cells = spec.width * spec.height;
  const int target = static_cast<int>(std::lround(spec.density_percent / 100.0 * cells));
  if (target > cells - 1 - spec.goal_count) throw ValidationError("maze density leaves no room for start and goals");

  GridWorld probe = GridWorld::empty(spec.width, spec.height, spec.start, {spec.start});
  const int max_len = std::max(2, std::min(spec.width, spec.height) / 3);

  constexpr int kAttempts = 500;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    detail::Rng rng(detail::mix_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::uint8_t> obs(static_cast<std::size_t>(cells), 0);
    int placed = 0;
    long tries = 0;
    const long max_tries = 200L * cells;
    while (placed < target && tries < max_tries) {
      const int x0 = rng.uniform_int(1, spec.width);
      const int y0 = rng.uniform_int(1, spec.height);
      const bool horizontal = rng.below(2) == 0;
      const int len = rng.uniform_int(1, max_len);
      for (int k = 0; k < len && placed < target; ++k, ++tries) {
        Cell c{horizontal ? x0 + k : x0, horizontal ? y0 : y0 + k};
        if (!probe.in_bounds(c) || c == spec.start) continue;
        auto& slot = obs[probe.index(c)];
        if (slot == 0 && keeps_free_space_connected(probe, obs, c)) {
          slot = 1;
          ++placed;
        }
      }
    }
    if (placed < target) continue;

    GridWorld layout(spec.width, spec.height, obs, spec.start, {spec.start});
    auto seen = flood_fill(layout, spec.start);
    const int free_cells = cells - target;
    const int reachable = static_cast<int>(std::count(seen.begin(), seen.end(), 1));
    if (reachable < (free_cells * 7) / 10) continue;

    // Goals from the far half of the reachable region.
    double far = 0.0;
    for (int i = 0; i < cells; ++i) {
      if (seen[i]) far = std::max(far, h_diagonal(spec.start, layout.cell_at(i)));
    }
    std::vector<Cell> candidates;
    for (int i = 0; i < cells; ++i) {
      Cell c = layout.cell_at(i);
      if (seen[i] && c != spec.start && h_diagonal(spec.start, c) >= 0.5 * far) candidates.push_back(c);
    }
    if (static_cast<int>(candidates.size()) < spec.goal_count) continue;
    std::vector<Cell> goals;
    for (int g = 0; g < spec.goal_count; ++g) {
      const auto pick = rng.below(candidates.size());
      goals.push_back(candidates[pick]);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return GridWorld(spec.width, spec.height, std::move(obs), spec.start, std::move(goals));
  }
  throw GenerationError("gen_maze: no connected layout after " + std::to_string(kAttempts) + " attempts");
}

GridWorld gen_maze(int width, int height, double density_percent, int goal_count, std::uint64_t seed) {
  MazeSpec spec;
  spec.width = width;
  spec.height = height;
  spec.density_percent = density_percent;
  spec.goal_count = goal_count;
  spec.seed = seed;
  return gen_maze(spec);
}

ScenarioScript gen_scenario(const GridWorld& world, const ScenarioSpec& spec) {
  if (spec.change_count < 0) throw ValidationError("change_count must be >= 0");
  detail::Rng rng(detail::mix_seed(spec.seed, 0xC4A1));
  ScenarioScript script;
  auto path = optimal_path(world, world.start());
  if (path.empty()) throw GenerationError("gen_scenario: start cannot reach any goal");
  if (spec.change_count == 0) return script;

  // Changes spread over the first ~70% of the initial route.
  const int route = static_cast<int>(path.size()) - 1;
  const int span = std::max(spec.change_count, (route * 7) / 10);
  std::vector<int> steps;
  for (int k = 0; k < spec.change_count; ++k) {
    int s = 1 + (k * span) / spec.change_count;
    steps.push_back(std::max(s, steps.empty() ? 1 : steps.back() + 1));
  }

  GridWorld current = world;
  Cell agent = world.start();
  int step = 0;
  std::size_t next_event = 0;
  while (next_event < steps.size()) {
    path = optimal_path(current, agent);
    if (path.size() < 2) break;
    agent = path[1];
    ++step;
    current = current.with_start(agent);
    if (step != steps[next_event]) continue;

    path = optimal_path(current, agent);
    ScenarioEvent ev;
    ev.at_step = step;
    // Block a stretch of the upcoming route, a couple of cells ahead.
    for (std::size_t i = 2; i < path.size() && static_cast<int>(ev.add.size()) < spec.block_size; ++i) {
      const Cell& c = path[i];
      if (current.is_goal(c) || c == agent) break;
      ScenarioEvent trial = ev;
      trial.add.push_back(c);
      if (any_goal_reachable(current.apply_event(trial), agent)) ev.add.push_back(c);
    }
    std::vector<Cell> obstacles;
    for (int i = 0; i < current.cell_count(); ++i) {
      Cell c = current.cell_at(i);
      if (current.is_obstacle(c) && std::find(ev.add.begin(), ev.add.end(), c) == ev.add.end()) obstacles.push_back(c);
    }
    for (int r = 0; r < spec.removals && !obstacles.empty(); ++r) {
      const auto pick = rng.below(obstacles.size());
      ev.remove.push_back(obstacles[pick]);
      obstacles.erase(obstacles.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(ev.add.begin(), ev.add.end());
    std::sort(ev.remove.begin(), ev.remove.end());
    current = current.apply_event(ev);
    script.events.push_back(std::move(ev));
    ++next_event;
  }
  // Routes shorter than the schedule get their remaining changes on the last step.
  while (next_event < steps.size()) {
    ScenarioEvent ev;
    ev.at_step = std::max(1, step);
    script.events.push_back(ev);
    ++next_event;
  }
  script.validate();
  return script;
}

GridStats grid_stats(const GridWorld& world, const ScenarioScript& script) {
  GridStats s;
  s.width = world.width();
  s.height = world.height();
  s.cell_count = world.cell_count();
  s.goal_count = static_cast<int>(world.goals().size());
  s.density_percent = world.density_percent();
  s.change_count = static_cast<int>(script.change_count());
  return s;
}

}  // namespace dplan
