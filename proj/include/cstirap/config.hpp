#pragma once

// Run configuration: INI text with [protocol], [integrator], [sweep],
// [noise], [linewidth] and [run] sections. Keys carry the field names of the
// corresponding structs.

#include <string>
#include <vector>

#include "cstirap/model.hpp"
#include "cstirap/propagate.hpp"
#include "cstirap/sweeps.hpp"

namespace cstirap {

struct LinewidthSpec {
  double direction_1 = 1.0;  // components along (axis1, axis2) of the map
  double direction_2 = 0.0;
  double threshold = -1.0;   // negative: half the value at the origin
  std::string map;           // CSV written by `sweep`; empty: compute it

  friend bool operator==(const LinewidthSpec&, const LinewidthSpec&) = default;
};

struct RunConfig {
  ProtocolParams protocol;
  Tolerances tolerances;
  OutputGrid grid;

  SweepAxis axis1{SweepParameter::stray_two_photon, -2.0, 2.0, 61};
  SweepAxis axis2{SweepParameter::stray_p, -2.0, 2.0, 61};
  bool use_axis2 = true;

  NoiseSpec noise;
  LinewidthSpec linewidth;

  std::string out;          // empty: standard output
  std::size_t threads = 0;  // 0: environment or hardware default

  /// Checks every block. Throws Error(invalid_argument).
  void validate() const;

  SweepSpec sweep_spec() const;

  // axis2 is compared only when it is in use.
  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// `key` is "section.name". Throws Error(parse) for unknown keys or
/// malformed values; does not validate ranges.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);
std::vector<std::string> config_keys();

std::string dump_config(const RunConfig& cfg);

}  // namespace cstirap
