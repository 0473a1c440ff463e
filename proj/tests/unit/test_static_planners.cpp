#include <gtest/gtest.h>

#include <set>

#include "dplan/grid_io.hpp"
#include "dplan/sim_harness.hpp"
#include "dplan/static_planners.hpp"

using namespace dplan;

namespace {

GridWorld random_grid(std::uint64_t seed) {
  const int w = 6 + static_cast<int>(seed % 15);
  const int h = 6 + static_cast<int>((seed * 7) % 15);
  const double density = 10.0 + static_cast<double>((seed * 13) % 30);
  return gen_maze(w, h, density, 1 + static_cast<int>(seed % 3), seed);
}

GridWorld sealed_goal() {
  return parse_grid(
      "S....\n"
      ".....\n"
      "..###\n"
      "..#G#\n"
      "..###\n");
}

void expect_valid_path(const GridWorld& w, const PlanSession& s) {
  ASSERT_TRUE(s.success);
  const auto path = trace_path(s);
  ASSERT_FALSE(path.empty());
  EXPECT_EQ(path.front(), w.start());
  EXPECT_TRUE(w.is_goal(path.back()));
  for (const auto& c : path) EXPECT_TRUE(w.is_free(c));
  EXPECT_EQ(path_cost(w, path), s.cost);
  EXPECT_EQ(static_cast<int>(path.size()) - 1, s.metrics.path_length);
}

}  // namespace

TEST(PlannerKind, NamesRoundTrip) {
  for (PlannerKind k : all_planner_kinds()) EXPECT_EQ(parse_planner_kind(to_string(k)), k);
  EXPECT_FALSE(parse_planner_kind("focused-dstar"));
}

TEST(Dijkstra, EmptyGridCornerToCorner) {
  const GridWorld w = GridWorld::empty(5, 5, {1, 1}, {{5, 5}});
  const PlanSession s = plan_dijkstra(w);
  EXPECT_EQ(s.cost, GridCost(0, 4));
  EXPECT_EQ(s.records[w.index(w.start())].g, GridCost::zero());
}

TEST(Dijkstra, WalledOffRegionStaysInfinite) {
  const GridWorld w = sealed_goal();
  const PlanSession s = plan_dijkstra(w);
  EXPECT_FALSE(s.success);
  EXPECT_TRUE(s.records[w.index({4, 4})].g.is_infinite());
  EXPECT_THROW(trace_path(s), PlanningError);
}

TEST(AStar, StartEqualsGoal) {
  const GridWorld w = GridWorld::empty(4, 4, {2, 2}, {{2, 2}});
  for (auto dir : {SearchDirection::kForward, SearchDirection::kBackward}) {
    const PlanSession s = plan_astar(w, dir);
    ASSERT_TRUE(s.success);
    EXPECT_EQ(s.cost, GridCost::zero());
    EXPECT_EQ(trace_path(s), (std::vector<Cell>{Cell{2, 2}}));
  }
}

TEST(AStar, SealedGoalFails) {
  const GridWorld w = sealed_goal();
  EXPECT_FALSE(plan_astar(w, SearchDirection::kForward).success);
  EXPECT_FALSE(plan_astar(w, SearchDirection::kBackward).success);
  for (PlannerKind k : all_planner_kinds()) EXPECT_FALSE(plan(k, w, nullptr).success) << to_string(k);
}

TEST(TracePath, EmptyThreeByThree) {
  const GridWorld w = GridWorld::empty(3, 3, {1, 1}, {{3, 3}});
  for (PlannerKind k : all_planner_kinds()) {
    const PlanSession s = plan(k, w, nullptr);
    const auto path = trace_path(s);
    EXPECT_EQ(path.size(), 3u) << to_string(k);
    EXPECT_EQ(path_cost(w, path), GridCost(0, 2)) << to_string(k);
  }
}

TEST(OracleEquivalence, AllExactPlannersMatchDijkstra) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const GridWorld w = random_grid(seed);
    const GridCost opt = oracle_optimum(w);
    ASSERT_TRUE(opt.is_finite());
    EXPECT_EQ(plan_dijkstra(w).cost, opt) << seed;
    for (PlannerKind k : {PlannerKind::kAStarForward, PlannerKind::kAStarBackward, PlannerKind::kDStarLite,
                          PlannerKind::kDStarLiteOptimized, PlannerKind::kADStar, PlannerKind::kADStarOptimized}) {
      const PlanSession s = plan(k, w, nullptr);
      EXPECT_EQ(s.cost, opt) << to_string(k) << " seed " << seed;
      expect_valid_path(w, s);
    }
  }
}

TEST(DStarLite, UnchangedWorldReplanExpandsNothing) {
  const GridWorld w = random_grid(3);
  for (bool opt : {false, true}) {
    const PlanSession first = plan_dstar_lite(w, nullptr, opt);
    const PlanSession again = plan_dstar_lite(w, &first, opt);
    EXPECT_EQ(again.metrics.expansions, 0);
    EXPECT_EQ(again.cost, first.cost);
  }
}

TEST(DStarLite, RemovingObstacleOpensShortcut) {
  const GridWorld w = parse_grid(
      "S.#..\n"
      "..#..\n"
      "..#..\n"
      "..#.G\n"
      ".....\n");
  const PlanSession first = plan_dstar_lite(w, nullptr, false);
  const GridWorld open = w.apply_event({1, {}, {{3, 2}}});
  const PlanSession next = plan_dstar_lite(open, &first, false);
  EXPECT_LT(next.cost, first.cost);
  EXPECT_EQ(next.cost, oracle_optimum(open));
  expect_valid_path(open, next);
}

TEST(DStarLite, BlockingCurrentPathRepairsToOptimum) {
  const GridWorld w = GridWorld::empty(8, 8, {1, 1}, {{8, 8}});
  const PlanSession first = plan_dstar_lite(w, nullptr, true);
  const auto path = trace_path(first);
  const GridWorld blocked = w.apply_event({1, {path[3], path[4]}, {}});
  const PlanSession next = plan_dstar_lite(blocked, &first, true);
  EXPECT_EQ(next.cost, oracle_optimum(blocked));
  expect_valid_path(blocked, next);
}

TEST(DStarLite, ReplanningSoundnessOverChangeScripts) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GridWorld w = random_grid(seed);
    ScenarioSpec spec;
    spec.change_count = 1 + static_cast<int>(seed % 10);
    spec.seed = seed;
    const ScenarioScript script = gen_scenario(w, spec);
    for (bool opt : {false, true}) {
      GridWorld cur = w;
      PlanSession s = plan_dstar_lite(cur, nullptr, opt);
      for (const auto& ev : script.events) {
        cur = cur.apply_event(ev);
        s = plan_dstar_lite(cur, &s, opt);
        EXPECT_EQ(s.cost, plan_astar(cur, SearchDirection::kBackward).cost) << seed;
        if (s.success) expect_valid_path(cur, s);
      }
    }
  }
}

TEST(DStarLite, OptimizedVariantRecomputesFewerRhsValues) {
  long plain = 0, optimized = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const GridWorld w = random_grid(seed);
    ScenarioSpec spec;
    spec.change_count = 5;
    spec.seed = seed;
    const ScenarioScript script = gen_scenario(w, spec);
    GridWorld cur = w;
    PlanSession a = plan_dstar_lite(cur, nullptr, false);
    PlanSession b = plan_dstar_lite(cur, nullptr, true);
    for (const auto& ev : script.events) {
      cur = cur.apply_event(ev);
      a = plan_dstar_lite(cur, &a, false);
      b = plan_dstar_lite(cur, &b, true);
      EXPECT_EQ(a.cost, b.cost);
    }
    plain += a.metrics.cumulative_rhs_recomputations;
    optimized += b.metrics.cumulative_rhs_recomputations;
  }
  EXPECT_LT(optimized, plain);
}

TEST(DStarLite, RhsCoherentAlongPath) {
  const GridWorld w = random_grid(11);
  const PlanSession s = plan_dstar_lite(w, nullptr, false);
  const auto path = trace_path(s);
  for (const Cell& c : path) {
    if (w.is_goal(c)) continue;
    GridCost best = GridCost::infinity();
    for (const Cell& n : neighbors8(w, c)) {
      const GridCost cand = grid_cost8(w, c, n) + s.records[w.index(n)].g;
      if (cand < best) best = cand;
    }
    EXPECT_EQ(s.records[w.index(c)].rhs, best) << to_string(c);
    EXPECT_EQ(s.records[w.index(c)].rhs, s.records[w.index(c)].g) << to_string(c);
  }
}

TEST(ARAStar, EpsOneIsOptimal) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GridWorld w = random_grid(seed);
    const PlanSession s = plan_arastar(w, nullptr, InflationSchedule(1.0, 0.5));
    EXPECT_EQ(s.cost, oracle_optimum(w));
  }
}

TEST(AnytimePlanners, EpsBoundAndConvergence) {
  for (double eps0 : {1.5, 2.5, 4.5}) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const GridWorld w = random_grid(seed);
      const double opt = oracle_optimum(w).value();
      for (PlannerKind k : {PlannerKind::kARAStar, PlannerKind::kADStar, PlannerKind::kADStarOptimized}) {
        PlannerOptions o;
        o.eps0 = eps0;
        o.eps_step = 0.5;
        PlanSession s = plan(k, w, nullptr, o);
        for (int call = 0; call < 20; ++call) {
          ASSERT_TRUE(s.success);
          EXPECT_LE(s.cost.value(), s.metrics.eps * opt + 1e-9) << to_string(k);
          expect_valid_path(w, s);
          if (s.metrics.eps == 1.0) break;
          s = plan(k, w, &s, o);
        }
        EXPECT_EQ(s.metrics.eps, 1.0);
        EXPECT_EQ(s.cost, oracle_optimum(w)) << to_string(k) << " seed " << seed;
      }
    }
  }
}

TEST(AnytimePlanners, NoNodeExpandedTwicePerCycle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GridWorld w = random_grid(seed);
    ScenarioSpec spec;
    spec.change_count = 3;
    spec.seed = seed;
    const ScenarioScript script = gen_scenario(w, spec);
    for (PlannerKind k : {PlannerKind::kARAStar, PlannerKind::kADStar}) {
      PlannerOptions o;
      o.eps0 = 3.0;
      o.record_expansions = true;
      GridWorld cur = w;
      PlanSession s = plan(k, cur, nullptr, o);
      auto check = [&](const PlanSession& ss) {
        for (const auto& cycle : ss.cycle_expanded) {
          std::set<int> seen(cycle.begin(), cycle.end());
          EXPECT_EQ(seen.size(), cycle.size()) << to_string(k);
        }
      };
      check(s);
      for (const auto& ev : script.events) {
        cur = cur.apply_event(ev);
        s = plan(k, cur, &s, o);
        check(s);
      }
    }
  }
}

TEST(ADStar, MatchesDStarLiteCostOnScriptWithEpsOne) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GridWorld w = random_grid(seed);
    ScenarioSpec spec;
    spec.change_count = 4;
    spec.seed = seed;
    const ScenarioScript script = gen_scenario(w, spec);
    PlanSession d = plan_dstar_lite(w, nullptr, false);
    PlanSession a = plan_adstar(w, nullptr, InflationSchedule(1.0, 0.5), false);
    EXPECT_EQ(a.cost, d.cost);
    for (const auto& ev : script.events) {
      w = w.apply_event(ev);
      d = plan_dstar_lite(w, &d, false);
      a = plan_adstar(w, &a, InflationSchedule(1.0, 0.5), false);
      EXPECT_EQ(a.cost, d.cost) << seed;
    }
  }
}

TEST(ADStar, ChangeAfterConvergenceGivesFreshOptimum) {
  GridWorld w = random_grid(17);
  PlanSession s = plan_adstar(w, nullptr, InflationSchedule(2.5, 0.5), true);
  while (s.metrics.eps > 1.0) s = plan_adstar(w, &s, InflationSchedule(2.5, 0.5), true);
  const auto path = trace_path(s);
  ASSERT_GT(path.size(), 3u);
  w = w.apply_event({1, {path[path.size() / 2]}, {}});
  s = plan_adstar(w, &s, InflationSchedule(2.5, 0.5), true);
  EXPECT_EQ(s.cost, oracle_optimum(w));
}

TEST(ADStar, AbortBudgetFallsBackToScratch) {
  GridWorld w = random_grid(8);
  PlannerOptions o;
  o.abort_budget = 1;
  PlanSession s = plan(PlannerKind::kDStarLite, w, nullptr, o);
  const auto path = trace_path(s);
  ASSERT_GT(path.size(), 3u);
  w = w.apply_event({1, {path[path.size() / 2]}, {}});
  s = plan(PlannerKind::kDStarLite, w, &s, o);
  EXPECT_TRUE(s.metrics.aborted);
  EXPECT_EQ(s.cost, oracle_optimum(w));
}

TEST(MultiGoal, PicksCheapestGoal) {
  const GridWorld w = GridWorld::empty(10, 3, {5, 2}, {{1, 2}, {10, 2}});
  for (PlannerKind k : all_planner_kinds()) {
    const PlanSession s = plan(k, w, nullptr);
    EXPECT_EQ(s.cost, GridCost(4, 0)) << to_string(k);
    EXPECT_EQ(trace_path(s).back(), (Cell{1, 2})) << to_string(k);
  }
}
