#include <benchmark/benchmark.h>

#include <random>

#include "dplan/grid_io.hpp"
#include "dplan/kinodyn_io.hpp"
#include "dplan/search_core.hpp"
#include "dplan/sim_harness.hpp"

using namespace dplan;

namespace {

std::string data(const std::string& rel) { return std::string(DPLAN_DATA_DIR) + "/" + rel; }

void BM_QueueInsertPop(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<double> keys(n);
  for (auto& k : keys) k = static_cast<double>(rng() % 100000);
  for (auto _ : state) {
    KeyedQueue<int> q;
    for (int i = 0; i < n; ++i) q.insert_or_update(i, SearchKey::two(keys[i], 0.0));
    while (!q.empty()) benchmark::DoNotOptimize(q.pop_min());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_QueueInsertPop)->Arg(1 << 10)->Arg(1 << 14);

void BM_LargeGridFirstPlan(benchmark::State& state) {
  const GridWorld w = load_grid(data("grids/largeGrid.txt"));
  const auto kind = static_cast<PlannerKind>(state.range(0));
  PlannerOptions o;
  if (is_anytime(kind)) o.eps0 = 4.5;
  o.eps_step = 0.08;
  for (auto _ : state) benchmark::DoNotOptimize(plan(kind, w, nullptr, o).cost);
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_LargeGridFirstPlan)->DenseRange(0, 7);

void BM_LargeGridScenario(benchmark::State& state) {
  const GridWorld w = load_grid(data("grids/largeGrid.txt"));
  const ScenarioScript s = load_scenario(data("scenarios/largeGrid.json"), w);
  const auto kind = static_cast<PlannerKind>(state.range(0));
  PlannerOptions o;
  if (is_anytime(kind)) o.eps0 = 4.5;
  o.eps_step = 0.08;
  for (auto _ : state) benchmark::DoNotOptimize(run_grid_scenario(w, s, kind, o).total_expansions);
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_LargeGridScenario)->DenseRange(0, 7)->Unit(benchmark::kMillisecond);

void BM_StraightRoadStatic(benchmark::State& state) {
  KinodynProblem p;
  p.road = load_road(data("roads/straight100.csv"));
  p.params.w_t = 0.0;
  p.params.w_c = 1.0;
  p.start = KinodynState{{0.05, 0.25}, 0.0, 0.0};
  p.goal = {100.05, 0.25};
  KinodynSearchOptions o;
  o.static_mode = true;
  for (auto _ : state) benchmark::DoNotOptimize(modified_astar(p, 1.0, o).cost);
}
BENCHMARK(BM_StraightRoadStatic)->Unit(benchmark::kMillisecond);

void BM_DynamicAraStar(benchmark::State& state) {
  const KinodynProblem p = load_problem(data("problems/road_seed10.json"));
  for (auto _ : state) benchmark::DoNotOptimize(modified_arastar(p, AnytimeSchedule{2.0, 0.1, 1.1}).cost);
}
BENCHMARK(BM_DynamicAraStar)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
