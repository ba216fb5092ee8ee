#pragma once

// The analyses behind each CLI subcommand, producing numeric tables.

#include <string>
#include <vector>

#include "cstirap/config.hpp"
#include "cstirap/sweeps.hpp"
#include "cstirap/table.hpp"

namespace cstirap {

struct CommandResult {
  Table table;
  bool complete = true;  // false: output written but the analysis is not conclusive
  std::string note;
};

std::vector<std::string> command_names();

/// Validates `cfg` and runs one of simulate, spectrum, sweep, noise,
/// linewidth, crossing.
CommandResult run_command(const RunConfig& cfg, const std::string& name);

/// Long format: one column per axis (named after its parameter), then
/// P1, maxP2, norm. Failed points are written as nan.
Table map_to_table(const EfficiencyMap& map);
/// Inverse of map_to_table for a complete, equally spaced grid.
EfficiencyMap map_from_table(const Table& t);

}  // namespace cstirap
