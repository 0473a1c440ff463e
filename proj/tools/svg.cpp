#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dplan::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string rect(double x, double y, double w, double h, const std::string& fill) {
  return "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"" + fill + "\"/>\n";
}

}  // namespace

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb g_color(double g, double g_max, const RenderSpec& spec) {
  const double f = g_max > 0.0 ? std::clamp(g / g_max, 0.0, 1.0) : 0.0;
  auto mix = [f](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
  return {mix(spec.low.r, spec.high.r), mix(spec.low.g, spec.high.g), mix(spec.low.b, spec.high.b)};
}

std::string grid_svg(const GridWorld& world, const PlanSession* session, const std::vector<Cell>& path,
                     const RenderSpec& spec) {
  const int px = spec.cell_px;
  const int w = world.width() * px;
  const int h = world.height() * px;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
                    std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
  out += rect(0, 0, w, h, to_hex(spec.free));

  auto cell_rect = [&](const Cell& c, Rgb color) {
    out += rect((c.x - 1) * px, (c.y - 1) * px, px, px, to_hex(color));
  };

  if (spec.explored && session != nullptr && session->records.size() == static_cast<std::size_t>(world.cell_count())) {
    double g_max = 0.0;
    for (const auto& r : session->records) {
      if (r.g.is_finite()) g_max = std::max(g_max, r.g.value());
    }
    for (int i = 0; i < world.cell_count(); ++i) {
      const auto& r = session->records[i];
      if (r.g.is_finite() && !world.obstacles()[i]) cell_rect(world.cell_at(i), g_color(r.g.value(), g_max, spec));
    }
  }
  for (int i = 0; i < world.cell_count(); ++i) {
    if (world.obstacles()[i]) cell_rect(world.cell_at(i), spec.obstacle);
  }
  for (const auto& g : world.goals()) cell_rect(g, spec.goal);
  cell_rect(world.start(), spec.start);

  if (spec.grid_lines) {
    out += "<g stroke=\"#c0c0c0\" stroke-width=\"0.5\">\n";
    for (int x = 0; x <= world.width(); ++x) {
      out += "<line x1=\"" + std::to_string(x * px) + "\" y1=\"0\" x2=\"" + std::to_string(x * px) + "\" y2=\"" +
             std::to_string(h) + "\"/>\n";
    }
    for (int y = 0; y <= world.height(); ++y) {
      out += "<line x1=\"0\" y1=\"" + std::to_string(y * px) + "\" x2=\"" + std::to_string(w) + "\" y2=\"" +
             std::to_string(y * px) + "\"/>\n";
    }
    out += "</g>\n";
  }
  if (spec.path && path.size() > 1) {
    out += "<polyline fill=\"none\" stroke=\"" + to_hex(spec.path_color) + "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) out += " ";
      out += num((path[i].x - 0.5) * px) + "," + num((path[i].y - 0.5) * px);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string road_svg(const KinodynProblem& problem, const std::vector<KinodynState>& path, double px_per_m) {
  const auto& samples = problem.road.samples();
  const double hw = problem.road.half_width();
  double x0 = samples.front().pos.x, x1 = x0, y0 = samples.front().pos.y, y1 = y0;
  for (const auto& s : samples) {
    x0 = std::min(x0, s.pos.x);
    x1 = std::max(x1, s.pos.x);
    y0 = std::min(y0, s.pos.y);
    y1 = std::max(y1, s.pos.y);
  }
  x0 -= hw + 1.0;
  y0 -= hw + 1.0;
  x1 += hw + 1.0;
  y1 += hw + 1.0;
  // SVG y grows downwards; flip so the road reads in the usual orientation.
  auto sx = [&](double x) { return num((x - x0) * px_per_m); };
  auto sy = [&](double y) { return num((y1 - y) * px_per_m); };
  const double w = (x1 - x0) * px_per_m;
  const double h = (y1 - y0) * px_per_m;

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
                    "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
  out += rect(0, 0, w, h, "#ffffff");

  out += "<polygon fill=\"#d8d8d8\" points=\"";
  for (const auto& s : samples) {
    const Vec2 n{-std::sin(s.phi), std::cos(s.phi)};
    const Vec2 p = s.pos + n * hw;
    out += sx(p.x) + "," + sy(p.y) + " ";
  }
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    const Vec2 n{-std::sin(it->phi), std::cos(it->phi)};
    const Vec2 p = it->pos - n * hw;
    out += sx(p.x) + "," + sy(p.y) + " ";
  }
  out += "\"/>\n";

  const double res = problem.map.resolution();
  for (const auto& c : problem.map.cells()) {
    out += "<rect x=\"" + sx(c.x * res) + "\" y=\"" + sy((c.y + 1) * res) + "\" width=\"" + num(res * px_per_m) +
           "\" height=\"" + num(res * px_per_m) + "\" fill=\"#282828\"/>\n";
  }
  for (const auto& o : problem.obstacles) {
    out += "<circle cx=\"" + sx(o.pos0.x) + "\" cy=\"" + sy(o.pos0.y) + "\" r=\"" + num(o.radius * px_per_m) +
           "\" fill=\"#ff8000\" fill-opacity=\"0.6\"/>\n";
  }
  if (path.size() > 1) {
    out += "<polyline fill=\"none\" stroke=\"#0000c8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) out += " ";
      out += sx(path[i].pos.x) + "," + sy(path[i].pos.y);
    }
    out += "\"/>\n";
  }
  out += "<circle cx=\"" + sx(problem.start.pos.x) + "\" cy=\"" + sy(problem.start.pos.y) + "\" r=\"" +
         num(problem.road.agent_radius() * px_per_m) + "\" fill=\"#00a000\"/>\n";
  out += "<circle cx=\"" + sx(problem.goal.x) + "\" cy=\"" + sy(problem.goal.y) + "\" r=\"" + num(0.5 * px_per_m) +
         "\" fill=\"#c80000\"/>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace dplan::cli
