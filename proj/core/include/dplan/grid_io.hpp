#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dplan/gridworld.hpp"

namespace dplan {

// Grid files are ASCII maps, one row per line (first line is y = 1):
//   '.' free, '#' obstacle, 'S' start (exactly one), 'G' goal (one or more).
// Blank trailing lines are ignored.

GridWorld parse_grid(std::string_view text);
GridWorld load_grid(const std::filesystem::path& path);
std::string format_grid(const GridWorld& world);
void save_grid(const GridWorld& world, const std::filesystem::path& path);

// Scenario files are JSON:
//   {"events":[{"at_step":n,"add":[[x,y],...],"remove":[[x,y],...]}, ...]}

ScenarioScript parse_scenario(std::string_view json_text);
/// Also rejects adds that target `world`'s start or goal cells.
ScenarioScript parse_scenario(std::string_view json_text, const GridWorld& world);
ScenarioScript load_scenario(const std::filesystem::path& path);
ScenarioScript load_scenario(const std::filesystem::path& path, const GridWorld& world);
std::string format_scenario(const ScenarioScript& script);
void save_scenario(const ScenarioScript& script, const std::filesystem::path& path);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dplan
