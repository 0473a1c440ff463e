#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "dplan/grid_io.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using dplan::cli::run_cli;

namespace {

std::string data(const std::string& rel) { return std::string(DPLAN_DATA_DIR) + "/" + rel; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dplan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    dplan::write_text_file(dir_ / name, text);
    return path(name);
  }
  static std::string read(const std::string& p) { return dplan::read_text_file(p); }

  // Drops the trailing wall_time column from every CSV line.
  static std::string strip_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, result;
    while (std::getline(in, line)) result += line.substr(0, line.rfind(',')) + "\n";
    return result;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EmptyGridSinglePlanningRow) {
  const std::string grid = write("g.txt", "S....\n.....\n....G\n");
  const auto r = run({"plan-grid", "--grid", grid, "--planner", "astar", "--metrics-out", path("m.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read(path("m.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST_F(CliTest, MalformedGridNamesLine) {
  const std::string grid = write("g.txt", "S..\n.x.\n..G\n");
  const auto r = run({"plan-grid", "--grid", grid, "--planner", "astar", "--metrics-out", path("m.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, SealedGoalExitsOne) {
  const std::string grid = write("g.txt", "S....\n...##\n...#G\n");
  const auto r = run({"plan-grid", "--grid", grid, "--planner", "dijkstra", "--metrics-out", path("m.csv")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, UnknownPlannerAndMissingFileExitTwo) {
  const std::string grid = write("g.txt", "S.G\n");
  EXPECT_EQ(run({"plan-grid", "--grid", grid, "--planner", "best-first", "--metrics-out", path("m.csv")}).code, 2);
  EXPECT_EQ(run({"plan-grid", "--grid", path("nope.txt"), "--planner", "astar", "--metrics-out", path("m.csv")}).code,
            2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
}

TEST_F(CliTest, PlanRoadTable6) {
  const std::string road = data("roads/straight100.csv");
  auto r = run({"plan-road", "--road", road, "--start", "0.05,0.25", "--goal", "100.05,0.25", "--move-length", "1",
                "--cell-length", "0.5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nodes 101, length 100"), std::string::npos) << r.out;

  r = run({"plan-road", "--road", road, "--start", "0.05,0.25", "--goal", "100.05,0.25", "--move-length", "0.4",
           "--cell-length", "0.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("sqrt(2)"), std::string::npos) << r.err;

  r = run({"plan-road", "--road", road, "--start", "0.05,0.25", "--goal", "100.05,0.25", "--move-length", "0.4",
           "--cell-length", "0.5", "--allow-short-moves"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("expanded 1"), std::string::npos) << r.out;

  r = run({"plan-road", "--road", road, "--start", "0.05,0.25", "--goal", "0.1,0.3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("nodes 1,"), std::string::npos) << r.out;
}

TEST_F(CliTest, PlanRoadSweepCsv) {
  const auto r = run({"plan-road", "--road", data("roads/straight100.csv"), "--start", "0.05,0.25", "--goal",
                      "100.05,0.25", "--sweep-move-length", "0.4,1", "--csv-out", path("sweep.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read(path("sweep.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "move_length,success,nodes,length,cost,expanded,open_inserted,wall_time");
  EXPECT_NE(csv.find("\n0.4,0,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\n1,1,101,100,"), std::string::npos) << csv;
}

TEST_F(CliTest, PlanDynamicWeightsAndCycles) {
  const std::string problem = data("problems/road_seed10.json");
  const auto t = run({"plan-dynamic", "--problem", problem, "--planner", "astar", "--wt", "1", "--eps", "1.1",
                      "--profile-out", path("pt.csv")});
  const auto c = run({"plan-dynamic", "--problem", problem, "--planner", "astar", "--wc", "1", "--eps", "1.1",
                      "--profile-out", path("pc.csv")});
  ASSERT_EQ(t.code, 0) << t.err;
  ASSERT_EQ(c.code, 0) << c.err;
  const auto last_time = [](const std::string& csv) {
    const auto pos = csv.rfind('\n', csv.size() - 2);
    return std::stod(csv.substr(pos + 1));
  };
  EXPECT_LE(last_time(read(path("pt.csv"))), last_time(read(path("pc.csv"))));

  const auto a = run({"plan-dynamic", "--problem", problem, "--planner", "arastar", "--eps0", "2", "--eps-step", "0.1",
                      "--eps-final", "1.1", "--cycles-out", path("cycles.csv")});
  ASSERT_EQ(a.code, 0) << a.err;
  const std::string cycles = read(path("cycles.csv"));
  EXPECT_EQ(cycles.substr(0, cycles.find('\n')), "cycle,eps,expansions,open_inserted,incons,cost,wall_time");
  EXPECT_EQ(std::count(cycles.begin(), cycles.end(), '\n'), 11);
}

TEST_F(CliTest, PlannerSeedOverridesFlag) {
  ::setenv("PLANNER_SEED", "5", 1);
  const auto a = run({"gen-grid", "--width", "12", "--height", "9", "--density", "20", "--seed", "1", "--out",
                      path("a.txt")});
  ::unsetenv("PLANNER_SEED");
  const auto b = run({"gen-grid", "--width", "12", "--height", "9", "--density", "20", "--seed", "5", "--out",
                      path("b.txt")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(read(path("a.txt")), read(path("b.txt")));
}

TEST_F(CliTest, RepeatedRunsIdentical) {
  const std::vector<std::string> base{"plan-grid",  "--grid",     data("grids/complexGrid.txt"),
                                      "--scenario", data("scenarios/complexGrid.json"),
                                      "--planner",  "adstar"};
  for (const std::string tag : {"1", "2"}) {
    auto args = base;
    args.insert(args.end(), {"--metrics-out", path("m" + tag + ".csv"), "--svg-out", path("svg" + tag)});
    ASSERT_EQ(run(args).code, 0);
  }
  EXPECT_EQ(strip_last_column(read(path("m1.csv"))), strip_last_column(read(path("m2.csv"))));
  int files = 0;
  for (const auto& e : fs::directory_iterator(path("svg1"))) {
    ++files;
    EXPECT_EQ(read(e.path().string()), read(path("svg2") + "/" + e.path().filename().string()));
  }
  EXPECT_GT(files, 1);
}

TEST_F(CliTest, GoldenSvg) {
  const auto r = run({"plan-grid", "--grid", data("grids/paperGrid.txt"), "--scenario",
                      data("scenarios/paperGrid.json"), "--planner", "dstar-lite", "--metrics-out", path("m.csv"),
                      "--svg-out", path("svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read(path("svg/plan_000_step_0000.svg")), read(std::string(DPLAN_GOLDEN_DIR) + "/paperGrid_dstar_lite.svg"));
}

TEST(Svg, ZeroGUsesLowAnchor) {
  const dplan::cli::RenderSpec spec;
  EXPECT_EQ(dplan::cli::to_hex(dplan::cli::g_color(0.0, 10.0, spec)), "#ffff00");
  EXPECT_EQ(dplan::cli::to_hex(dplan::cli::g_color(10.0, 10.0, spec)), "#00ffff");
}

TEST(Svg, EmptySessionDrawsGridOnly) {
  const dplan::GridWorld w = dplan::GridWorld::empty(3, 3, {1, 1}, {{3, 3}});
  const std::string svg = dplan::cli::grid_svg(w, nullptr, {}, dplan::cli::RenderSpec{});
  EXPECT_EQ(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}
