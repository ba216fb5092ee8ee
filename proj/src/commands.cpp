#include "cstirap/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cstirap/analysis.hpp"
#include "cstirap/error.hpp"
#include "cstirap/propagate.hpp"

namespace cstirap {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

CommandResult simulate(const RunConfig& cfg) {
  const Trajectory traj = evolve_schrodinger(cfg.protocol, cfg.tolerances, cfg.grid);
  const Protocol proto(cfg.protocol);
  const LeakageEstimate bare = ae_bare(proto, traj.times);
  // The Stokes-basis elimination assumes a constant Stokes field.
  const bool stokes_basis = cfg.protocol.mode == DriveMode::stokes_always_on;
  LeakageEstimate dressed;
  if (stokes_basis) dressed = ae_stokes(proto, traj.times);

  CommandResult r;
  r.table.columns = {"t_over_T", "P0", "P1", "P2", "norm", "P2_ae_bare", "P2_ae_stokes"};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    r.table.rows.push_back({traj.times[i], traj.p0[i], traj.p1[i], traj.p2[i], traj.norm[i], bare.p2[i],
                            stokes_basis ? dressed.p2[i] : nan});
  }
  return r;
}

CommandResult spectrum(const RunConfig& cfg) {
  const Protocol proto(cfg.protocol);
  const std::vector<double> times = sample_times(proto.window(), cfg.grid);
  const std::vector<SpectrumSample> full = spectrum_full(proto, times);
  CommandResult r;
  r.table.columns = {"t_over_T", "s0", "s_plus", "s_minus", "e1",      "e2",
                     "e3",       "delta_s", "delta_p", "delta", "omega_p"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const StokesEigenvalues s = stokes_eigenvalues(proto, t);
    r.table.rows.push_back({t, s.s0, s.s_plus, s.s_minus, full[i].energies[0], full[i].energies[1],
                            full[i].energies[2], proto.delta_s(t), proto.delta_p(t), proto.delta(t),
                            proto.omega_p(t)});
  }
  return r;
}

CommandResult sweep(const RunConfig& cfg) {
  const SweepSpec spec = cfg.sweep_spec();
  const EfficiencyMap map = spec.axis2 ? sweep_2d(spec, cfg.threads) : sweep_1d(spec, cfg.threads);
  CommandResult r;
  r.table = map_to_table(map);
  const auto failed = std::count_if(map.entries.begin(), map.entries.end(), [](const MapEntry& e) { return !e.valid; });
  if (failed > 0) r.note = fmt::format("{} grid point(s) failed and are written as nan", failed);
  return r;
}

CommandResult noise(const RunConfig& cfg) {
  const NoiseAverage avg = quasistatic_average(cfg.protocol, cfg.noise, cfg.tolerances, cfg.grid, cfg.threads);
  CommandResult r;
  r.table.columns = {"mean_P1", "std_P1", "stderr_P1", "n_samples"};
  r.table.rows.push_back({avg.mean_p1, avg.std_p1, avg.stderr_p1, static_cast<double>(avg.n_samples)});
  return r;
}

CommandResult linewidth_report(const RunConfig& cfg) {
  EfficiencyMap map;
  if (!cfg.linewidth.map.empty()) {
    map = map_from_table(read_csv(cfg.linewidth.map));
  } else {
    map = cfg.use_axis2 ? sweep_2d(cfg.sweep_spec(), cfg.threads) : sweep_1d(cfg.sweep_spec(), cfg.threads);
  }
  const Linewidth lw = linewidth(map, cfg.linewidth.direction_1, cfg.linewidth.direction_2, cfg.linewidth.threshold);
  CommandResult r;
  r.table.columns = {"width", "bracketed", "threshold", "origin_value", "direction_1", "direction_2"};
  r.table.rows.push_back({lw.width, lw.bracketed ? 1.0 : 0.0, lw.threshold, lw.origin_value,
                          cfg.linewidth.direction_1, cfg.linewidth.direction_2});
  if (!lw.bracketed) {
    r.complete = false;
    r.note = "region above threshold reaches the map boundary; width is a lower bound";
  }
  return r;
}

CommandResult crossing(const RunConfig& cfg) {
  const CrossingPair c = find_crossings(cfg.protocol);
  ProtocolParams ideal = cfg.protocol;
  ideal.stray_s = ideal.stray_p = 0.0;
  const Protocol ideal_proto(ideal);
  const Protocol proto(cfg.protocol);
  const double residual =
      std::max(std::abs(ideal_proto.crossing_function(c.t_minus)), std::abs(ideal_proto.crossing_function(c.t_plus)));
  const std::vector<double> actual = proto.crossing_times();
  CommandResult r;
  r.table.columns = {"t_minus", "t_plus", "delta_s_at_t_plus", "delta_p_at_t_plus", "residual", "pulse_center",
                     "n_actual_crossings"};
  r.table.rows.push_back({c.t_minus, c.t_plus, ideal_proto.delta_s(c.t_plus), ideal_proto.delta_p(c.t_plus),
                          residual, proto.pulse_center(), static_cast<double>(actual.size())});
  return r;
}

}  // namespace

std::vector<std::string> command_names() { return {"simulate", "spectrum", "sweep", "noise", "linewidth", "crossing"}; }

CommandResult run_command(const RunConfig& cfg, const std::string& name) {
  cfg.validate();
  if (name == "simulate") return simulate(cfg);
  if (name == "spectrum") return spectrum(cfg);
  if (name == "sweep") return sweep(cfg);
  if (name == "noise") return noise(cfg);
  if (name == "linewidth") return linewidth_report(cfg);
  if (name == "crossing") return crossing(cfg);
  throw Error(ErrorCode::invalid_argument, "unknown command '" + name + "'");
}

Table map_to_table(const EfficiencyMap& map) {
  Table t;
  t.columns.emplace_back(to_string(map.axis1.parameter));
  if (map.axis2) t.columns.emplace_back(to_string(map.axis2->parameter));
  for (const char* c : {"P1", "maxP2", "norm"}) t.columns.emplace_back(c);
  for (std::size_t i1 = 0; i1 < map.n1(); ++i1) {
    for (std::size_t i2 = 0; i2 < map.n2(); ++i2) {
      const MapEntry& e = map.at(i1, i2);
      std::vector<double> row{map.axis1.value(i1)};
      if (map.axis2) row.push_back(map.axis2->value(i2));
      if (e.valid) {
        row.insert(row.end(), {e.p1_final, e.max_p2, e.final_norm});
      } else {
        row.insert(row.end(), {nan, nan, nan});
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

EfficiencyMap map_from_table(const Table& t) {
  const std::size_t n_axes = t.columns.size() >= 3 ? t.columns.size() - 3 : 0;
  if (n_axes < 1 || n_axes > 2 || t.columns[n_axes] != "P1" || t.columns[n_axes + 1] != "maxP2" ||
      t.columns[n_axes + 2] != "norm")
    throw Error(ErrorCode::parse, "map csv must have 1 or 2 axis columns followed by P1,maxP2,norm");
  if (t.rows.size() < 2) throw Error(ErrorCode::parse, "map csv has fewer than two rows");

  std::size_t n2 = 1;
  if (n_axes == 2) {
    while (n2 < t.rows.size() && t.rows[n2][0] == t.rows[0][0]) ++n2;
  }
  if (t.rows.size() % n2 != 0) throw Error(ErrorCode::parse, "map csv is not a complete grid");
  const std::size_t n1 = t.rows.size() / n2;

  EfficiencyMap map;
  map.axis1 = SweepAxis{sweep_parameter_from_string(t.columns[0]), t.rows.front()[0], t.rows.back()[0], n1};
  if (n_axes == 2)
    map.axis2 = SweepAxis{sweep_parameter_from_string(t.columns[1]), t.rows.front()[1], t.rows[n2 - 1][1], n2};
  if (map.axis1.count < 2 || !(map.axis1.max > map.axis1.min) ||
      (map.axis2 && (map.axis2->count < 2 || !(map.axis2->max > map.axis2->min))))
    throw Error(ErrorCode::parse, "map csv axes must be increasing with at least two values");

  auto close = [](double a, double b, const SweepAxis& ax) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(ax.min), std::abs(ax.max)});
  };
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      const auto& row = t.rows[i1 * n2 + i2];
      if (!close(row[0], map.axis1.value(i1), map.axis1) || (map.axis2 && !close(row[1], map.axis2->value(i2), *map.axis2)))
        throw Error(ErrorCode::parse, "map csv is not an equally spaced row-major grid");
      MapEntry e;
      e.p1_final = row[n_axes];
      e.max_p2 = row[n_axes + 1];
      e.final_norm = row[n_axes + 2];
      e.valid = !std::isnan(e.p1_final);
      map.entries.push_back(e);
    }
  }
  return map;
}

}  // namespace cstirap
