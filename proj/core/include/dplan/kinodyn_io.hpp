#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dplan/kinodyn.hpp"

namespace dplan {

// Road files: CSV with header `s,x,y,phi` (meters, radians) and a sidecar
// JSON next to it (same stem, .json) holding {"half_width": w, "agent_radius": r}.

RoadModel parse_road_csv(std::string_view csv, double half_width, double agent_radius);
RoadModel load_road(const std::filesystem::path& csv_path);
std::string format_road_csv(const RoadModel& road);
void save_road(const RoadModel& road, const std::filesystem::path& csv_path);
std::filesystem::path road_sidecar_path(const std::filesystem::path& csv_path);

// Obstacle files: JSON list of {"pos":[x,y], "vel":[vx,vy], "radius":r, "t0":t}.

std::vector<MovingObstacle> parse_obstacles(std::string_view json_text);
std::string format_obstacles(const std::vector<MovingObstacle>& obstacles);

// Problem files bundle road, static cells, moving obstacles, parameters,
// start state and goal position:
//   {"road": {"csv": "file.csv"} | {"samples": [[s,x,y,phi],...], "half_width": w, "agent_radius": r},
//    "static_obstacles": {"resolution": 0.5, "cells": [[i,j],...]},
//    "obstacles": [...],
//    "params": {"move_length":1, "cell_length":0.5, "speed_range":0.01, "theta_max_deg":30,
//               "theta_step_deg":10, "a_max":4, "a_step":1, "max_speed":25, "w_t":0.5, "w_c":0.5,
//               "radius_growth":0, "check_step":0.5, "strict":false},
//    "start": {"pos":[x,y], "speed":v, "t":0}, "goal": [x,y]}
// Missing params keep their defaults. A relative road csv path is resolved
// against `base_dir`.

KinodynProblem parse_problem(std::string_view json_text, const std::filesystem::path& base_dir = {});
KinodynProblem load_problem(const std::filesystem::path& path);
std::string format_problem(const KinodynProblem& problem);
void save_problem(const KinodynProblem& problem, const std::filesystem::path& path);

struct ProblemSpec {
  std::uint64_t seed = 1;
  double road_length = 130.0;
  double half_width = 6.0;
  double agent_radius = 1.0;
  double goal_ahead = 100.0;
  double start_speed = 17.0;
  int obstacle_count = 6;
  double max_speed = 20.0;
  double a_max = 2.0;
  double speed_range = 0.01;
};

/// Straight rightward road with vehicles moving along it at random lanes and
/// speeds, none overlapping the agent's start. Deterministic in `seed`.
KinodynProblem gen_problem(const ProblemSpec& spec);

}  // namespace dplan
