#pragma once

#include <string>
#include <vector>

#include "dplan/gridworld.hpp"
#include "dplan/kinodyn.hpp"
#include "dplan/static_planners.hpp"

namespace dplan::cli {

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
};

std::string to_hex(Rgb c);

struct RenderSpec {
  bool grid_lines = true;
  bool explored = true;
  bool path = true;
  int cell_px = 16;
  Rgb low{255, 255, 0};
  Rgb high{0, 255, 255};
  Rgb obstacle{40, 40, 40};
  Rgb free{255, 255, 255};
  Rgb start{0, 160, 0};
  Rgb goal{200, 0, 0};
  Rgb path_color{0, 0, 200};
};

/// Linear blend between spec.low (g = 0) and spec.high (g = g_max).
Rgb g_color(double g, double g_max, const RenderSpec& spec);

/// Grid with obstacles, start and goals; explored cells of `session`
/// colored by g when given; `path` drawn as a polyline.
std::string grid_svg(const GridWorld& world, const PlanSession* session, const std::vector<Cell>& path,
                     const RenderSpec& spec = {});

/// Road band, static cells, obstacles at their snapshot positions, and the
/// path when non-empty. `px_per_m` scales meters to pixels.
std::string road_svg(const KinodynProblem& problem, const std::vector<KinodynState>& path, double px_per_m = 8.0);

}  // namespace dplan::cli
