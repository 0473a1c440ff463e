#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dplan/grid_io.hpp"
#include "dplan/gridworld.hpp"
#include "dplan/sim_harness.hpp"

using namespace dplan;

namespace {

GridWorld empty3() { return GridWorld::empty(3, 3, {1, 1}, {{3, 3}}); }

}  // namespace

TEST(Neighbors8, CountsOnSmallGrid) {
  const GridWorld w = empty3();
  EXPECT_EQ(neighbors8(w, {2, 2}).size(), 8u);
  EXPECT_EQ(neighbors8(w, {1, 1}).size(), 3u);
  const GridWorld blocked = w.apply_event({1, {{2, 1}}, {}});
  EXPECT_EQ(neighbors8(blocked, {2, 2}).size(), 7u);
  EXPECT_THROW(neighbors8(w, {0, 2}), ValidationError);
}

TEST(Cost8, StraightDiagonalAndInvalid) {
  const GridWorld w = GridWorld::empty(5, 5, {1, 1}, {{5, 5}});
  EXPECT_EQ(cost8(w, {2, 2}, {3, 2}), 1.0);
  EXPECT_EQ(cost8(w, {2, 2}, {3, 3}), kSqrt2);
  EXPECT_TRUE(std::isinf(cost8(w, {2, 2}, {4, 2})));
  const GridWorld b = w.apply_event({1, {{3, 2}}, {}});
  EXPECT_TRUE(std::isinf(cost8(b, {2, 2}, {3, 2})));
}

TEST(HDiagonal, Examples) {
  EXPECT_EQ(h_diagonal({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(h_diagonal({0, 0}, {5, 0}), 5.0);
  EXPECT_EQ(h_diagonal_cost({0, 0}, {3, 4}), GridCost(1, 3));
}

TEST(HDiagonal, EqualsOptimalCostOnEmptyGrid) {
  const GridWorld w = GridWorld::empty(6, 6, {1, 1}, {{6, 6}});
  const auto dist = oracle_dijkstra(w);
  for (int i = 0; i < w.cell_count(); ++i) {
    EXPECT_EQ(dist[i], h_diagonal_cost(w.start(), w.cell_at(i))) << to_string(w.cell_at(i));
  }
}

TEST(HDiagonal, ConsistentOnEveryEdge) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GridWorld w = gen_maze(8, 8, 25.0, 1, seed);
    const Cell goal = w.goals()[0];
    for (int i = 0; i < w.cell_count(); ++i) {
      const Cell u = w.cell_at(i);
      if (!w.is_free(u)) continue;
      for (const Cell& v : neighbors8(w, u)) {
        EXPECT_LE(h_diagonal(v, goal) - h_diagonal(u, goal), cost8(w, u, v) + 1e-12);
      }
    }
  }
}

TEST(ApplyEvent, AddRemoveAndCopySemantics) {
  const GridWorld w = GridWorld::empty(4, 4, {1, 1}, {{4, 4}});
  const GridWorld a = w.apply_event({1, {{2, 2}}, {}});
  EXPECT_TRUE(a.is_obstacle({2, 2}));
  EXPECT_FALSE(w.is_obstacle({2, 2}));
  const GridWorld b = a.apply_event({2, {}, {{2, 2}}});
  EXPECT_EQ(b, w);
  EXPECT_THROW(w.apply_event({1, {{1, 1}}, {}}), ValidationError);
  EXPECT_THROW(w.apply_event({1, {{4, 4}}, {}}), ValidationError);
  EXPECT_THROW(w.apply_event({1, {{5, 1}}, {}}), ValidationError);
}

TEST(ApplyEvent, InverseRestoresOnRandomGrids) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GridWorld w = gen_maze(10, 9, 20.0, 2, seed);
    std::vector<Cell> frees, walls;
    for (int i = 0; i < w.cell_count(); ++i) {
      const Cell c = w.cell_at(i);
      if (c == w.start() || w.is_goal(c)) continue;
      (w.is_obstacle(c) ? walls : frees).push_back(c);
    }
    frees.resize(std::min<std::size_t>(frees.size(), 3));
    walls.resize(std::min<std::size_t>(walls.size(), 3));
    const GridWorld changed = w.apply_event({1, frees, walls});
    const GridWorld back = changed.apply_event({2, walls, frees});
    EXPECT_EQ(back.obstacles(), w.obstacles());
  }
}

TEST(GenMaze, DeterministicAndReachable) {
  const GridWorld a = gen_maze(20, 15, 30.0, 3, 9);
  const GridWorld b = gen_maze(20, 15, 30.0, 3, 9);
  EXPECT_EQ(a, b);
  const auto seen = flood_fill(a, a.start());
  for (const auto& g : a.goals()) EXPECT_TRUE(seen[a.index(g)]);
  EXPECT_NEAR(a.density_percent(), 30.0, 0.5);
}

TEST(GenMaze, ZeroDensityIsEmpty) {
  const GridWorld w = gen_maze(7, 5, 0.0, 1, 3);
  EXPECT_EQ(w.obstacle_count(), 0);
}

TEST(GenMaze, PaperGridStatistics) {
  MazeSpec spec{6, 7, 35.71, 1, {1, 6}, 1};
  const GridWorld w = gen_maze(spec);
  EXPECT_EQ(w.cell_count(), 42);
  EXPECT_EQ(w.goals().size(), 1u);
  EXPECT_NEAR(w.density_percent(), 35.71, 0.5);
}

TEST(GenMaze, RejectsBadSpecs) {
  EXPECT_THROW(gen_maze(3, 8, 10.0, 1, 1), ValidationError);
  EXPECT_THROW(gen_maze(8, 8, 60.0, 1, 1), ValidationError);
  EXPECT_THROW(gen_maze(8, 8, 10.0, 0, 1), ValidationError);
}

struct BundledGrid {
  const char* name;
  int width, height, goals;
  Cell start;
  double density;
  int changes;
};

class BundledGrids : public ::testing::TestWithParam<BundledGrid> {};

TEST_P(BundledGrids, MatchTable2Statistics) {
  const auto& p = GetParam();
  const std::string base = DPLAN_DATA_DIR;
  const GridWorld w = load_grid(base + "/grids/" + p.name + ".txt");
  const ScenarioScript s = load_scenario(base + "/scenarios/" + p.name + ".json", w);
  const GridStats st = grid_stats(w, s);
  EXPECT_EQ(st.width, p.width);
  EXPECT_EQ(st.height, p.height);
  EXPECT_EQ(st.cell_count, p.width * p.height);
  EXPECT_EQ(st.goal_count, p.goals);
  EXPECT_EQ(w.start(), p.start);
  EXPECT_NEAR(st.density_percent, p.density, 0.5);
  EXPECT_EQ(st.change_count, p.changes);
  const auto seen = flood_fill(w, w.start());
  for (const auto& g : w.goals()) EXPECT_TRUE(seen[w.index(g)]);
}

INSTANTIATE_TEST_SUITE_P(Table2, BundledGrids,
                         ::testing::Values(BundledGrid{"paperGrid", 6, 7, 1, {1, 6}, 35.71, 1},
                                           BundledGrid{"complexGrid", 26, 15, 2, {1, 1}, 21.54, 3},
                                           BundledGrid{"largeGrid", 55, 99, 4, {1, 1}, 37.25, 7}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(GenScenario, KeepsGoalsReachable) {
  const GridWorld w = gen_maze(20, 20, 20.0, 2, 5);
  ScenarioSpec spec;
  spec.change_count = 5;
  spec.seed = 5;
  const ScenarioScript s = gen_scenario(w, spec);
  EXPECT_EQ(s.change_count(), 5u);
  GridWorld cur = w;
  for (const auto& e : s.events) {
    cur = cur.apply_event(e);
    EXPECT_TRUE(oracle_optimum(cur).is_finite());
  }
}

TEST(GridIo, RoundTrip) {
  const GridWorld w = gen_maze(9, 6, 20.0, 2, 4);
  EXPECT_EQ(parse_grid(format_grid(w)), w);
}

TEST(GridIo, ParseErrorsNameTheLine) {
  try {
    parse_grid("S..\n.x.\n..G\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_grid("...\n..G\n"), ParseError);
  EXPECT_THROW(parse_grid("S..\n...\n"), ParseError);
  EXPECT_THROW(parse_grid("S..\n..\n..G\n"), ParseError);
}

TEST(GridIo, ScenarioRoundTripAndValidation) {
  const GridWorld w = GridWorld::empty(5, 5, {1, 1}, {{5, 5}});
  const std::string text = R"({"events":[{"at_step":2,"add":[[3,3]],"remove":[]},{"at_step":4,"add":[],"remove":[[3,3]]}]})";
  const ScenarioScript s = parse_scenario(text, w);
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].add[0], (Cell{3, 3}));
  const ScenarioScript again = parse_scenario(format_scenario(s), w);
  EXPECT_EQ(again.events.size(), 2u);
  EXPECT_EQ(again.events[1].remove[0], (Cell{3, 3}));
  EXPECT_THROW(parse_scenario(R"({"events":[{"at_step":1,"add":[[1,1]],"remove":[]}]})", w), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"events":[{"at_step":1,"add":[[9,1]],"remove":[]}]})", w), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"events":[{"at_step":3},{"at_step":1}]})"), Error);
  EXPECT_THROW(parse_scenario("{not json"), ParseError);
}
