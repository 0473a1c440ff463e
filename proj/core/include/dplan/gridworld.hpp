#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dplan/errors.hpp"

namespace dplan {

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Grid coordinate. x is the column, y the row; both 1-based.
struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

std::string to_string(const Cell& c);

/// Exact cost of a path on the 8-connected grid: `straight` unit moves plus
/// `diagonal` moves of length sqrt(2). Two finite costs are equal iff their
/// counts are equal, so sums taken in any order compare bitwise-identical.
class GridCost {
 public:
  constexpr GridCost() = default;
  constexpr GridCost(int straight, int diagonal) : straight_(straight), diagonal_(diagonal) {}

  static constexpr GridCost zero() { return GridCost(0, 0); }
  static constexpr GridCost infinity() {
    GridCost c;
    c.infinite_ = true;
    return c;
  }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  int straight() const noexcept { return straight_; }
  int diagonal() const noexcept { return diagonal_; }
  double value() const noexcept;

  friend GridCost operator+(const GridCost& a, const GridCost& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return GridCost(a.straight_ + b.straight_, a.diagonal_ + b.diagonal_);
  }
  friend bool operator==(const GridCost& a, const GridCost& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.straight_ == b.straight_ && a.diagonal_ == b.diagonal_;
  }
  friend bool operator<(const GridCost& a, const GridCost& b) {
    if (a == b) return false;
    return a.value() < b.value();
  }
  friend bool operator>(const GridCost& a, const GridCost& b) { return b < a; }
  friend bool operator<=(const GridCost& a, const GridCost& b) { return !(b < a); }
  friend bool operator>=(const GridCost& a, const GridCost& b) { return !(a < b); }

 private:
  int straight_ = 0;
  int diagonal_ = 0;
  bool infinite_ = false;
};

/// One batch of scripted obstacle changes, applied after the agent's
/// `at_step`-th move.
struct ScenarioEvent {
  int at_step = 1;
  std::vector<Cell> add;
  std::vector<Cell> remove;
};

struct ScenarioScript {
  std::vector<ScenarioEvent> events;

  /// Throws ValidationError when events are unsorted or at_step < 1.
  void validate() const;
  std::size_t change_count() const { return events.size(); }
};

/// Occupancy grid with a start cell and a non-empty goal set.
/// Immutable: every modification returns an updated copy.
class GridWorld {
 public:
  /// `obstacles` is row-major (index = (y-1)*width + (x-1)).
  GridWorld(int width, int height, std::vector<std::uint8_t> obstacles, Cell start, std::vector<Cell> goals);

  static GridWorld empty(int width, int height, Cell start, std::vector<Cell> goals);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int cell_count() const noexcept { return width_ * height_; }
  const Cell& start() const noexcept { return start_; }
  /// Row-major order.
  std::span<const Cell> goals() const noexcept { return goals_; }
  const std::vector<std::uint8_t>& obstacles() const noexcept { return obstacles_; }

  bool in_bounds(const Cell& c) const noexcept { return c.x >= 1 && c.y >= 1 && c.x <= width_ && c.y <= height_; }
  int index(const Cell& c) const noexcept { return (c.y - 1) * width_ + (c.x - 1); }
  Cell cell_at(int idx) const noexcept { return Cell{idx % width_ + 1, idx / width_ + 1}; }
  bool is_obstacle(const Cell& c) const noexcept { return in_bounds(c) && obstacles_[index(c)] != 0; }
  bool is_free(const Cell& c) const noexcept { return in_bounds(c) && obstacles_[index(c)] == 0; }
  bool is_goal(const Cell& c) const noexcept;

  int obstacle_count() const noexcept;
  /// Obstacle cells over total cells, in percent.
  double density_percent() const noexcept;

  GridWorld with_start(const Cell& start) const;
  GridWorld with_goals(std::vector<Cell> goals) const;
  /// Adds then removes the event's cells. Rejects obstacles on start or goals.
  GridWorld apply_event(const ScenarioEvent& event) const;

  /// Cells whose obstacle flag differs from `other` (same dimensions required).
  std::vector<Cell> changed_cells(const GridWorld& other) const;
  bool same_layout(const GridWorld& other) const noexcept;

  friend bool operator==(const GridWorld& a, const GridWorld& b);

 private:
  void validate() const;

  int width_;
  int height_;
  std::vector<std::uint8_t> obstacles_;
  Cell start_;
  std::vector<Cell> goals_;
};

/// In-bounds, non-obstacle subset of the 8 surrounding cells, in a fixed
/// order (row above left to right, same row, row below).
std::vector<Cell> neighbors8(const GridWorld& world, const Cell& cell);

/// In-bounds subset of the 8 surrounding cells regardless of occupancy.
std::vector<Cell> adjacent8(const GridWorld& world, const Cell& cell);

/// 1 for 4-adjacent cells, sqrt(2) for diagonal ones, +inf otherwise or when
/// either endpoint is an obstacle.
double cost8(const GridWorld& world, const Cell& a, const Cell& b);
GridCost grid_cost8(const GridWorld& world, const Cell& a, const Cell& b);

/// Octile distance: min(|dx|,|dy|)*sqrt(2) + ||dx|-|dy||.
double h_diagonal(const Cell& a, const Cell& b);
GridCost h_diagonal_cost(const Cell& a, const Cell& b);

/// Cells reachable from `from` through free cells (8-connectivity).
std::vector<std::uint8_t> flood_fill(const GridWorld& world, const Cell& from);

struct MazeSpec {
  int width = 0;
  int height = 0;
  double density_percent = 0.0;
  int goal_count = 1;
  Cell start{1, 1};
  std::uint64_t seed = 1;
};

/// Deterministic wall-segment maze with exactly round(density * cells)
/// obstacles, start at `spec.start` and goals mutually reachable from it.
/// Throws GenerationError after a bounded number of unreachable attempts.
GridWorld gen_maze(const MazeSpec& spec);
GridWorld gen_maze(int width, int height, double density_percent, int goal_count, std::uint64_t seed);

struct ScenarioSpec {
  int change_count = 1;
  std::uint64_t seed = 1;
  /// Cells added per change, placed on the agent's upcoming optimal path.
  int block_size = 3;
  /// Obstacle cells removed per change, chosen among existing obstacles.
  int removals = 2;
};

/// Movement scenario whose changes block the agent's upcoming optimal path
/// (simulated with an agent following fresh optimal plans). Every change
/// keeps the start/goals connected.
ScenarioScript gen_scenario(const GridWorld& world, const ScenarioSpec& spec);

/// Summary statistics of a bundled grid.
struct GridStats {
  int width = 0;
  int height = 0;
  int cell_count = 0;
  int goal_count = 0;
  double density_percent = 0.0;
  int change_count = 0;
};

GridStats grid_stats(const GridWorld& world, const ScenarioScript& script);

}  // namespace dplan

template <>
struct std::hash<dplan::Cell> {
  std::size_t operator()(const dplan::Cell& c) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(c.x) << 32) ^ static_cast<unsigned>(c.y));
  }
};
