#pragma once

// Parameter sweeps, quasistatic noise averaging and linewidth extraction.
// Grid points and Monte Carlo samples are independent work items written to
// pre-assigned slots, so results do not depend on the thread count.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cstirap/model.hpp"
#include "cstirap/propagate.hpp"

namespace cstirap {

enum class SweepParameter {
  kappa,
  kappa_delta,
  stray_s,
  stray_p,
  stray_two_photon,
  omega0_T,
  gamma2,
};

std::string_view to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(std::string_view s);

struct SweepAxis {
  SweepParameter parameter = SweepParameter::kappa;
  double min = 0.0;
  double max = 1.0;
  std::size_t count = 2;

  double value(std::size_t i) const;
  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SweepSpec {
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  ProtocolParams base;
  Tolerances tolerances;
  OutputGrid grid;

  void validate() const;
};

/// Parameters of a single grid point. A stray_two_photon axis sets
/// stray_s = stray_p - value after all other axes are applied.
ProtocolParams params_at(const SweepSpec& spec, std::size_t i1, std::size_t i2 = 0);

struct MapEntry {
  double p1_final = 0.0;
  double max_p2 = 0.0;
  double final_norm = 0.0;
  bool valid = true;  // false when the propagation failed
};

struct EfficiencyMap {
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  std::vector<MapEntry> entries;  // row-major: index = i1 * n2 + i2

  std::size_t n1() const { return axis1.count; }
  std::size_t n2() const { return axis2 ? axis2->count : 1; }
  const MapEntry& at(std::size_t i1, std::size_t i2 = 0) const { return entries[i1 * n2() + i2]; }
};

/// Number of worker threads: `requested` if nonzero, else the CSTIRAP_THREADS
/// environment variable, else the hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

EfficiencyMap sweep_1d(const SweepSpec& spec, std::size_t threads = 0);
EfficiencyMap sweep_2d(const SweepSpec& spec, std::size_t threads = 0);

struct NoiseSpec {
  double sigma_s = 0.0;  // std dev of stray_s, units of Omega0
  double sigma_p = 0.0;
  double rho = 0.0;      // correlation in [-1, 1]
  std::size_t n_samples = 100;
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct NoiseSample {
  double stray_s = 0.0;
  double stray_p = 0.0;
};

/// The k-th draw of the bivariate Gaussian; depends only on (seed, k).
NoiseSample draw_noise(const NoiseSpec& n, std::size_t k);

struct NoiseAverage {
  double mean_p1 = 0.0;
  double std_p1 = 0.0;     // sample standard deviation
  double stderr_p1 = 0.0;  // std_p1 / sqrt(n)
  std::size_t n_samples = 0;
};

/// Monte Carlo average of P1(t_f) over static stray detunings added to
/// those already present in `p`.
NoiseAverage quasistatic_average(const ProtocolParams& p, const NoiseSpec& n, const Tolerances& tol = {},
                                 const OutputGrid& grid = {}, std::size_t threads = 0);

struct Linewidth {
  double width = 0.0;
  double threshold = 0.0;
  double origin_value = 0.0;
  bool bracketed = true;
};

/// Full width along `direction` (normalised internally) of the connected
/// region around the origin where P1_final >= threshold, with the map
/// bilinearly interpolated. A negative threshold selects half the value at
/// the origin. Unbracketed regions report the extent reached with
/// bracketed = false.
Linewidth linewidth(const EfficiencyMap& map, double dir1, double dir2, double threshold = -1.0);

}  // namespace cstirap
