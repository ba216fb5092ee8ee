#include "cstirap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "cstirap/error.hpp"

namespace cstirap {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorCode::parse, fmt::format("{}: cannot parse '{}' as {}", key, value, expected));
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) bad_value(key, s, "a finite number");
  return v;
}

std::size_t to_size(const std::string& key, const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, s, "a non-negative integer");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, s, "a non-negative integer");
  return v;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

struct Field {
  const char* section;
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string& key, const std::string&)> set;
};

#define DOUBLE_FIELD(sec, nm, member)                                                        \
  Field {                                                                                    \
    sec, nm, [](const RunConfig& c) { return num(c.member); },                               \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); } \
  }

#define SIZE_FIELD(sec, nm, member)                                                        \
  Field {                                                                                  \
    sec, nm, [](const RunConfig& c) { return std::to_string(c.member); },                  \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_size(k, v); } \
  }

SweepParameter to_parameter(const std::string& key, const std::string& v) {
  try {
    return sweep_parameter_from_string(v);
  } catch (const Error&) {
    bad_value(key, v, "a sweep parameter");
  }
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      DOUBLE_FIELD("protocol", "omega0_T", protocol.omega0_T),
      DOUBLE_FIELD("protocol", "kappa", protocol.kappa),
      DOUBLE_FIELD("protocol", "kappa_delta", protocol.kappa_delta),
      DOUBLE_FIELD("protocol", "h_delta", protocol.h_delta),
      DOUBLE_FIELD("protocol", "tau", protocol.tau),
      DOUBLE_FIELD("protocol", "tau_ch", protocol.tau_ch),
      DOUBLE_FIELD("protocol", "gamma2", protocol.gamma2),
      DOUBLE_FIELD("protocol", "stray_s", protocol.stray_s),
      DOUBLE_FIELD("protocol", "stray_p", protocol.stray_p),
      Field{"protocol", "mode", [](const RunConfig& c) { return std::string(to_string(c.protocol.mode)); },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              try {
                c.protocol.mode = drive_mode_from_string(v);
              } catch (const Error&) {
                bad_value(k, v, "stokes-always-on or pump-always-on");
              }
            }},
      Field{"protocol", "detuning_sign",
            [](const RunConfig& c) { return std::string(c.protocol.detuning_sign > 0 ? "+1" : "-1"); },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "+1" || v == "1")
                c.protocol.detuning_sign = 1;
              else if (v == "-1")
                c.protocol.detuning_sign = -1;
              else
                bad_value(k, v, "+1 or -1");
            }},
      Field{"protocol", "pulse_center",
            [](const RunConfig& c) {
              return c.protocol.pulse_center ? num(*c.protocol.pulse_center) : std::string("auto");
            },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "auto")
                c.protocol.pulse_center.reset();
              else
                c.protocol.pulse_center = to_double(k, v);
            }},

      DOUBLE_FIELD("integrator", "rtol", tolerances.rtol),
      DOUBLE_FIELD("integrator", "atol", tolerances.atol),
      SIZE_FIELD("integrator", "max_steps", tolerances.max_steps),
      SIZE_FIELD("integrator", "samples", grid.samples),

      Field{"sweep", "axis1", [](const RunConfig& c) { return std::string(to_string(c.axis1.parameter)); },
            [](RunConfig& c, const std::string& k, const std::string& v) { c.axis1.parameter = to_parameter(k, v); }},
      DOUBLE_FIELD("sweep", "axis1_min", axis1.min),
      DOUBLE_FIELD("sweep", "axis1_max", axis1.max),
      SIZE_FIELD("sweep", "axis1_count", axis1.count),
      Field{"sweep", "axis2",
            [](const RunConfig& c) {
              return c.use_axis2 ? std::string(to_string(c.axis2.parameter)) : std::string("none");
            },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "none") {
                c.use_axis2 = false;
              } else {
                c.axis2.parameter = to_parameter(k, v);
                c.use_axis2 = true;
              }
            }},
      DOUBLE_FIELD("sweep", "axis2_min", axis2.min),
      DOUBLE_FIELD("sweep", "axis2_max", axis2.max),
      SIZE_FIELD("sweep", "axis2_count", axis2.count),

      DOUBLE_FIELD("noise", "sigma_s", noise.sigma_s),
      DOUBLE_FIELD("noise", "sigma_p", noise.sigma_p),
      DOUBLE_FIELD("noise", "rho", noise.rho),
      SIZE_FIELD("noise", "n_samples", noise.n_samples),
      Field{"noise", "seed", [](const RunConfig& c) { return std::to_string(c.noise.seed); },
            [](RunConfig& c, const std::string& k, const std::string& v) { c.noise.seed = to_u64(k, v); }},

      DOUBLE_FIELD("linewidth", "direction_1", linewidth.direction_1),
      DOUBLE_FIELD("linewidth", "direction_2", linewidth.direction_2),
      Field{"linewidth", "threshold",
            [](const RunConfig& c) {
              return c.linewidth.threshold < 0.0 ? std::string("half") : num(c.linewidth.threshold);
            },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.linewidth.threshold = v == "half" ? -1.0 : to_double(k, v);
            }},
      Field{"linewidth", "map", [](const RunConfig& c) { return c.linewidth.map; },
            [](RunConfig& c, const std::string&, const std::string& v) { c.linewidth.map = v; }},

      Field{"run", "out", [](const RunConfig& c) { return c.out; },
            [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      SIZE_FIELD("run", "threads", threads),
  };
  return table;
}

#undef DOUBLE_FIELD
#undef SIZE_FIELD

const Field& find_field(const std::string& key) {
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    for (const Field& f : fields()) {
      if (section == f.section && name == f.name) return f;
    }
  }
  throw Error(ErrorCode::parse, "unknown configuration key '" + key + "'");
}

// Keys omitted from the dump when the second sweep axis is off.
bool hidden(const RunConfig& c, const Field& f) {
  return !c.use_axis2 && std::string_view(f.section) == "sweep" && std::string_view(f.name).starts_with("axis2_");
}

}  // namespace

void RunConfig::validate() const {
  protocol.validate();
  if (!(tolerances.rtol > 0.0) || !(tolerances.atol > 0.0))
    throw Error(ErrorCode::invalid_argument, "integrator tolerances must be positive");
  if (tolerances.max_steps == 0) throw Error(ErrorCode::invalid_argument, "integrator.max_steps must be positive");
  if (grid.samples < 2) throw Error(ErrorCode::invalid_argument, "integrator.samples must be >= 2");
  sweep_spec().validate();
  noise.validate();
  if (!(linewidth.threshold < 0.0) && !(linewidth.threshold > 0.0 && linewidth.threshold < 1.0))
    throw Error(ErrorCode::invalid_argument, "linewidth.threshold must be 'half' or lie in (0, 1)");
  if (linewidth.direction_1 == 0.0 && linewidth.direction_2 == 0.0)
    throw Error(ErrorCode::invalid_argument, "linewidth direction must be nonzero");
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.axis1 = axis1;
  if (use_axis2) s.axis2 = axis2;
  s.base = protocol;
  s.tolerances = tolerances;
  s.grid = grid;
  return s;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.protocol == b.protocol && a.tolerances == b.tolerances && a.grid == b.grid && a.axis1 == b.axis1 &&
         a.use_axis2 == b.use_axis2 && (!a.use_axis2 || a.axis2 == b.axis2) && a.noise == b.noise &&
         a.linewidth == b.linewidth && a.out == b.out && a.threads == b.threads;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_field(key).set(cfg, key, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return find_field(key).get(cfg); }

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(std::string(f.section) + "." + f.name);
  return keys;
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::parse, fmt::format("config line {}: {}", e.line(), e.message()));
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorCode::parse, "config key '" + section + "' is outside any section");
    for (const auto& [name, leaf] : body) set_config_value(cfg, section + "." + name, leaf.data());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  std::string_view current;
  for (const Field& f : fields()) {
    if (hidden(cfg, f)) continue;
    if (current != f.section) {
      if (!current.empty()) out += '\n';
      out += fmt::format("[{}]\n", f.section);
      current = f.section;
    }
    out += fmt::format("{} = {}\n", f.name, f.get(cfg));
  }
  return out;
}

}  // namespace cstirap
