#include "dplan/kinodyn_io.hpp"

#include <cstdio>
#include <sstream>

#include "dplan/grid_io.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace dplan {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + field + "'", line);
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Vec2 vec_of(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(std::string(what) + " must be [x, y]");
  }
  return Vec2{j[0].get<double>(), j[1].get<double>()};
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

double number_field(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ParseError(std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

std::vector<MovingObstacle> obstacles_from_json(const json& doc) {
  if (!doc.is_array()) throw ParseError("obstacles must be a JSON list");
  std::vector<MovingObstacle> out;
  for (const auto& o : doc) {
    if (!o.is_object() || !o.contains("pos")) throw ParseError("obstacle entries need 'pos'");
    MovingObstacle m;
    m.pos0 = vec_of(o["pos"], "obstacle pos");
    m.vel = o.contains("vel") ? vec_of(o["vel"], "obstacle vel") : Vec2{};
    m.radius = number_field(o, "radius", 1.0);
    m.t0 = number_field(o, "t0", 0.0);
    m.validate();
    out.push_back(m);
  }
  return out;
}

json obstacles_to_json(const std::vector<MovingObstacle>& obstacles) {
  json arr = json::array();
  for (const auto& o : obstacles) {
    arr.push_back(json{{"pos", vec_json(o.pos0)}, {"vel", vec_json(o.vel)}, {"radius", o.radius}, {"t0", o.t0}});
  }
  return arr;
}

}  // namespace

std::filesystem::path road_sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

RoadModel parse_road_csv(std::string_view csv, double half_width, double agent_radius) {
  std::istringstream in{std::string(csv)};
  std::string line;
  int line_no = 0;
  bool header = false;
  std::vector<RoadSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "s,x,y,phi") throw ParseError("expected header 's,x,y,phi'", line_no);
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 4) throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
    RoadSample r{parse_double(fields[0], line_no), {parse_double(fields[1], line_no), parse_double(fields[2], line_no)},
                 parse_double(fields[3], line_no)};
    if (!samples.empty() && !(r.s > samples.back().s)) throw ParseError("s must be strictly increasing", line_no);
    samples.push_back(r);
  }
  if (!header) throw ParseError("road file is empty", 1);
  return RoadModel(std::move(samples), half_width, agent_radius);
}

RoadModel load_road(const std::filesystem::path& csv_path) {
  const auto sidecar = road_sidecar_path(csv_path);
  const json meta = parse_json(read_text_file(sidecar), sidecar.string().c_str());
  if (!meta.is_object()) throw ParseError(sidecar.string() + ": expected a JSON object");
  const double hw = number_field(meta, "half_width", 0.0);
  const double ra = number_field(meta, "agent_radius", 0.0);
  try {
    return parse_road_csv(read_text_file(csv_path), hw, ra);
  } catch (const ParseError& e) {
    throw ParseError(csv_path.string() + ": " + e.what(), e.line());
  }
}

std::string format_road_csv(const RoadModel& road) {
  std::string out = "s,x,y,phi\n";
  for (const auto& r : road.samples()) {
    out += num(r.s) + "," + num(r.pos.x) + "," + num(r.pos.y) + "," + num(r.phi) + "\n";
  }
  return out;
}

void save_road(const RoadModel& road, const std::filesystem::path& csv_path) {
  write_text_file(csv_path, format_road_csv(road));
  json meta{{"half_width", road.half_width()}, {"agent_radius", road.agent_radius()}};
  write_text_file(road_sidecar_path(csv_path), meta.dump(2) + "\n");
}

std::vector<MovingObstacle> parse_obstacles(std::string_view json_text) {
  return obstacles_from_json(parse_json(json_text, "obstacles JSON"));
}

std::string format_obstacles(const std::vector<MovingObstacle>& obstacles) {
  return obstacles_to_json(obstacles).dump(2) + "\n";
}

KinodynProblem parse_problem(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text, "problem JSON");
  if (!doc.is_object()) throw ParseError("problem JSON must be an object");
  KinodynProblem p;

  if (!doc.contains("road") || !doc["road"].is_object()) throw ParseError("problem needs a 'road' object");
  const json& road = doc["road"];
  if (road.contains("csv")) {
    std::filesystem::path csv = road["csv"].get<std::string>();
    if (csv.is_relative()) csv = base_dir / csv;
    p.road = load_road(csv);
  } else {
    if (!road.contains("samples") || !road["samples"].is_array()) throw ParseError("road needs 'csv' or 'samples'");
    std::vector<RoadSample> samples;
    for (const auto& s : road["samples"]) {
      if (!s.is_array() || s.size() != 4) throw ParseError("road samples must be [s, x, y, phi]");
      samples.push_back(RoadSample{s[0].get<double>(), {s[1].get<double>(), s[2].get<double>()}, s[3].get<double>()});
    }
    p.road = RoadModel(std::move(samples), number_field(road, "half_width", 0.0), number_field(road, "agent_radius", 0.0));
  }

  if (doc.contains("static_obstacles")) {
    const json& so = doc["static_obstacles"];
    p.map = OccupancyMap(number_field(so, "resolution", 0.5));
    if (!(p.map.resolution() > 0.0)) throw ParseError("static_obstacles resolution must be > 0");
    for (const auto& c : so.value("cells", json::array())) {
      if (!c.is_array() || c.size() != 2) throw ParseError("static cells must be [i, j]");
      p.map.add(RoadCell{c[0].get<std::int64_t>(), c[1].get<std::int64_t>()});
    }
  }
  if (doc.contains("obstacles")) p.obstacles = obstacles_from_json(doc["obstacles"]);

  if (doc.contains("params")) {
    const json& j = doc["params"];
    if (!j.is_object()) throw ParseError("'params' must be an object");
    KinodynParams& k = p.params;
    k.move_length = number_field(j, "move_length", k.move_length);
    k.cell_length = number_field(j, "cell_length", k.cell_length);
    k.speed_range = number_field(j, "speed_range", k.speed_range);
    k.theta_max = deg_to_rad(number_field(j, "theta_max_deg", rad_to_deg(k.theta_max)));
    k.theta_step = deg_to_rad(number_field(j, "theta_step_deg", rad_to_deg(k.theta_step)));
    k.a_max = number_field(j, "a_max", k.a_max);
    k.a_step = number_field(j, "a_step", k.a_step);
    k.max_speed = number_field(j, "max_speed", k.max_speed);
    k.w_t = number_field(j, "w_t", k.w_t);
    k.w_c = number_field(j, "w_c", k.w_c);
    k.radius_growth = number_field(j, "radius_growth", k.radius_growth);
    k.check_step = number_field(j, "check_step", k.check_step);
    if (j.contains("strict")) k.strict = j["strict"].get<bool>();
  }

  if (!doc.contains("start") || !doc["start"].is_object()) throw ParseError("problem needs a 'start' object");
  p.start.pos = vec_of(doc["start"].value("pos", json()), "start pos");
  p.start.speed = number_field(doc["start"], "speed", 0.0);
  p.start.t = number_field(doc["start"], "t", 0.0);
  if (!doc.contains("goal")) throw ParseError("problem needs a 'goal'");
  p.goal = vec_of(doc["goal"], "goal");
  try {
    validate_problem(p);
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  return p;
}

KinodynProblem load_problem(const std::filesystem::path& path) {
  try {
    return parse_problem(read_text_file(path), path.parent_path());
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_problem(const KinodynProblem& p) {
  json samples = json::array();
  for (const auto& r : p.road.samples()) samples.push_back(json::array({r.s, r.pos.x, r.pos.y, r.phi}));
  json cells = json::array();
  for (const auto& c : p.map.cells()) cells.push_back(json::array({c.x, c.y}));
  const KinodynParams& k = p.params;
  json doc;
  doc["road"] = {{"samples", samples}, {"half_width", p.road.half_width()}, {"agent_radius", p.road.agent_radius()}};
  doc["static_obstacles"] = {{"resolution", p.map.resolution()}, {"cells", cells}};
  doc["obstacles"] = obstacles_to_json(p.obstacles);
  doc["params"] = {{"move_length", k.move_length},   {"cell_length", k.cell_length},
                   {"speed_range", k.speed_range},   {"theta_max_deg", rad_to_deg(k.theta_max)},
                   {"theta_step_deg", rad_to_deg(k.theta_step)},
                   {"a_max", k.a_max},               {"a_step", k.a_step},
                   {"max_speed", k.max_speed},       {"w_t", k.w_t},
                   {"w_c", k.w_c},                   {"radius_growth", k.radius_growth},
                   {"check_step", k.check_step},     {"strict", k.strict}};
  doc["start"] = {{"pos", vec_json(p.start.pos)}, {"speed", p.start.speed}, {"t", p.start.t}};
  doc["goal"] = vec_json(p.goal);
  return doc.dump(2) + "\n";
}

void save_problem(const KinodynProblem& problem, const std::filesystem::path& path) {
  write_text_file(path, format_problem(problem));
}

KinodynProblem gen_problem(const ProblemSpec& spec) {
  if (!(spec.goal_ahead > 0.0) || spec.goal_ahead + 5.0 > spec.road_length) {
    throw ValidationError("goal must lie on the road, at least 5 m before its end");
  }
  if (spec.obstacle_count < 0) throw ValidationError("obstacle_count must be >= 0");
  detail::Rng rng(detail::mix_seed(spec.seed, 0x6b696e6fULL));
  KinodynProblem p;
  p.road = RoadModel::straight({-10.0, 0.0}, 0.0, spec.road_length + 10.0, 1.0, spec.half_width, spec.agent_radius);
  p.start = KinodynState{{0.05, 0.25}, spec.start_speed, 0.0};
  p.goal = {p.start.pos.x + spec.goal_ahead, p.start.pos.y};
  p.params.theta_step = deg_to_rad(10.0);
  p.params.a_max = spec.a_max;
  p.params.max_speed = spec.max_speed;
  p.params.speed_range = spec.speed_range;

  const double lane_span = spec.half_width - spec.agent_radius - 0.5;
  for (int i = 0; i < spec.obstacle_count; ++i) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      MovingObstacle o;
      o.radius = rng.uniform(0.8, 1.6);
      o.pos0 = {rng.uniform(15.0, spec.goal_ahead), rng.uniform(-lane_span, lane_span)};
      o.vel = {rng.uniform(3.0, 15.0), rng.uniform(-0.6, 0.6)};
      o.t0 = 0.0;
      if ((o.pos0 - p.start.pos).norm() > spec.agent_radius + o.radius + 5.0) {
        p.obstacles.push_back(o);
        break;
      }
    }
  }
  return p;
}

}  // namespace dplan
