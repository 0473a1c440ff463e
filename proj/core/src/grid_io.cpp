#include "dplan/grid_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dplan {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed: " + path.string());
}

GridWorld parse_grid(std::string_view text) {
  std::vector<std::string> rows;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(line);
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw ParseError("grid file is empty", 1);

  const int width = static_cast<int>(rows.front().size());
  if (width == 0) throw ParseError("empty grid row", 1);
  const int height = static_cast<int>(rows.size());
  std::vector<std::uint8_t> obstacles(static_cast<std::size_t>(width) * height, 0);
  std::optional<Cell> start;
  std::vector<Cell> goals;
  for (int y = 1; y <= height; ++y) {
    const std::string& row = rows[y - 1];
    if (static_cast<int>(row.size()) != width) {
      throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " + std::to_string(width), y);
    }
    for (int x = 1; x <= width; ++x) {
      const char ch = row[x - 1];
      const std::size_t idx = static_cast<std::size_t>(y - 1) * width + (x - 1);
      switch (ch) {
        case '.':
          break;
        case '#':
          obstacles[idx] = 1;
          break;
        case 'S':
          if (start) throw ParseError("second start cell at column " + std::to_string(x), y);
          start = Cell{x, y};
          break;
        case 'G':
          goals.push_back(Cell{x, y});
          break;
        default:
          throw ParseError(std::string("unexpected character '") + ch + "' at column " + std::to_string(x), y);
      }
    }
  }
  if (!start) throw ParseError("grid has no start cell 'S'");
  if (goals.empty()) throw ParseError("grid has no goal cell 'G'");
  return GridWorld(width, height, std::move(obstacles), *start, std::move(goals));
}

GridWorld load_grid(const std::filesystem::path& path) {
  try {
    return parse_grid(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string format_grid(const GridWorld& world) {
  std::string out;
  out.reserve(static_cast<std::size_t>(world.cell_count() + world.height()));
  for (int y = 1; y <= world.height(); ++y) {
    for (int x = 1; x <= world.width(); ++x) {
      const Cell c{x, y};
      if (c == world.start()) {
        out += 'S';
      } else if (world.is_goal(c)) {
        out += 'G';
      } else {
        out += world.is_obstacle(c) ? '#' : '.';
      }
    }
    out += '\n';
  }
  return out;
}

void save_grid(const GridWorld& world, const std::filesystem::path& path) { write_text_file(path, format_grid(world)); }

namespace {

std::vector<Cell> parse_cells(const json& arr, const char* field, int event_no) {
  std::vector<Cell> out;
  if (arr.is_null()) return out;
  if (!arr.is_array()) throw ParseError(std::string("event ") + std::to_string(event_no) + ": '" + field + "' must be a list");
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() || !item[1].is_number_integer()) {
      throw ParseError(std::string("event ") + std::to_string(event_no) + ": '" + field + "' entries must be [x,y]");
    }
    out.push_back(Cell{item[0].get<int>(), item[1].get<int>()});
  }
  return out;
}

}  // namespace

ScenarioScript parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("events") || !doc["events"].is_array()) {
    throw ParseError("scenario JSON must be an object with an 'events' list");
  }
  ScenarioScript script;
  int n = 0;
  for (const auto& ev : doc["events"]) {
    ++n;
    if (!ev.is_object() || !ev.contains("at_step") || !ev["at_step"].is_number_integer()) {
      throw ParseError("event " + std::to_string(n) + ": missing integer 'at_step'");
    }
    ScenarioEvent e;
    e.at_step = ev["at_step"].get<int>();
    e.add = parse_cells(ev.value("add", json()), "add", n);
    e.remove = parse_cells(ev.value("remove", json()), "remove", n);
    script.events.push_back(std::move(e));
  }
  script.validate();
  return script;
}

ScenarioScript parse_scenario(std::string_view json_text, const GridWorld& world) {
  ScenarioScript script = parse_scenario(json_text);
  for (const auto& ev : script.events) {
    for (const auto& c : ev.add) {
      if (!world.in_bounds(c)) throw ValidationError("scenario adds out-of-bounds cell " + to_string(c));
      if (c == world.start() || world.is_goal(c)) {
        throw ValidationError("scenario places an obstacle on start/goal cell " + to_string(c));
      }
    }
    for (const auto& c : ev.remove) {
      if (!world.in_bounds(c)) throw ValidationError("scenario removes out-of-bounds cell " + to_string(c));
    }
  }
  return script;
}

ScenarioScript load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text_file(path)); }

ScenarioScript load_scenario(const std::filesystem::path& path, const GridWorld& world) {
  return parse_scenario(read_text_file(path), world);
}

std::string format_scenario(const ScenarioScript& script) {
  json events = json::array();
  for (const auto& e : script.events) {
    json add = json::array();
    for (const auto& c : e.add) add.push_back({c.x, c.y});
    json remove = json::array();
    for (const auto& c : e.remove) remove.push_back({c.x, c.y});
    events.push_back(json{{"at_step", e.at_step}, {"add", add}, {"remove", remove}});
  }
  return json{{"events", events}}.dump(2) + "\n";
}

void save_scenario(const ScenarioScript& script, const std::filesystem::path& path) {
  write_text_file(path, format_scenario(script));
}

}  // namespace dplan
