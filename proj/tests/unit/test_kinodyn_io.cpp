#include <gtest/gtest.h>

#include <filesystem>

#include "dplan/errors.hpp"
#include "dplan/kinodyn_io.hpp"

using namespace dplan;

TEST(RoadIo, CsvRoundTrip) {
  const RoadModel road = RoadModel::straight({-5.0, 0.0}, 0.0, 20.0, 1.0, 6.0, 1.0);
  const RoadModel back = parse_road_csv(format_road_csv(road), 6.0, 1.0);
  ASSERT_EQ(back.samples().size(), road.samples().size());
  for (std::size_t i = 0; i < road.samples().size(); ++i) {
    EXPECT_EQ(back.samples()[i].pos, road.samples()[i].pos);
    EXPECT_EQ(back.samples()[i].phi, road.samples()[i].phi);
  }
}

TEST(RoadIo, RejectsBadCsv) {
  EXPECT_THROW(parse_road_csv("s,x,y\n0,0,0\n", 6.0, 1.0), Error);
  EXPECT_THROW(parse_road_csv("s,x,y,phi\n0,0,0,abc\n", 6.0, 1.0), Error);
}

TEST(RoadIo, BundledRoadLoadsWithSidecar) {
  const RoadModel road = load_road(std::string(DPLAN_DATA_DIR) + "/roads/straight100.csv");
  EXPECT_EQ(road.half_width(), 6.0);
  EXPECT_EQ(road.agent_radius(), 1.0);
  EXPECT_EQ(road.samples().size(), 111u);
}

TEST(ProblemIo, RoundTripPreservesEverything) {
  ProblemSpec spec;
  spec.seed = 4;
  const KinodynProblem p = gen_problem(spec);
  const KinodynProblem q = parse_problem(format_problem(p));
  EXPECT_EQ(format_problem(q), format_problem(p));
  EXPECT_EQ(q.obstacles.size(), p.obstacles.size());
  EXPECT_EQ(q.params.theta_step, p.params.theta_step);
  EXPECT_EQ(q.start.speed, p.start.speed);
}

TEST(ProblemIo, SaveLoadFile) {
  const auto dir = std::filesystem::temp_directory_path() / "dplan_io_test";
  std::filesystem::create_directories(dir);
  ProblemSpec spec;
  spec.seed = 6;
  const KinodynProblem p = gen_problem(spec);
  save_problem(p, dir / "p.json");
  EXPECT_EQ(format_problem(load_problem(dir / "p.json")), format_problem(p));
  std::filesystem::remove_all(dir);
}

TEST(ProblemIo, RejectsInvalidContent) {
  EXPECT_THROW(parse_problem("{"), ParseError);
  ProblemSpec spec;
  KinodynProblem p = gen_problem(spec);
  p.params.theta_step = deg_to_rad(7.0);
  EXPECT_THROW(parse_problem(format_problem(p)), ValidationError);
}

TEST(GenProblem, DeterministicAndValid) {
  ProblemSpec spec;
  spec.seed = 9;
  const KinodynProblem a = gen_problem(spec);
  const KinodynProblem b = gen_problem(spec);
  EXPECT_EQ(format_problem(a), format_problem(b));
  EXPECT_NO_THROW(validate_problem(a));
  EXPECT_EQ(a.obstacles.size(), 6u);
  for (const auto& o : a.obstacles) {
    EXPECT_GT((o.pos0 - a.start.pos).norm(), o.radius + a.road.agent_radius());
  }
  EXPECT_EQ(a.params.max_speed, 20.0);
  spec.seed = 10;
  EXPECT_NE(format_problem(gen_problem(spec)), format_problem(a));
}
