#include "cstirap/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace cstirap {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kappa:
      return "kappa";
    case SweepParameter::kappa_delta:
      return "kappa_delta";
    case SweepParameter::stray_s:
      return "stray_s";
    case SweepParameter::stray_p:
      return "stray_p";
    case SweepParameter::stray_two_photon:
      return "stray_two_photon";
    case SweepParameter::omega0_T:
      return "omega0_T";
    case SweepParameter::gamma2:
      return "gamma2";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view s) {
  for (auto p : {SweepParameter::kappa, SweepParameter::kappa_delta, SweepParameter::stray_s,
                 SweepParameter::stray_p, SweepParameter::stray_two_photon, SweepParameter::omega0_T,
                 SweepParameter::gamma2}) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorCode::invalid_argument, "unknown sweep parameter '" + std::string(s) + "'");
}

double SweepAxis::value(std::size_t i) const {
  if (count < 2) return min;
  if (i + 1 == count) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void SweepSpec::validate() const {
  auto check = [](const SweepAxis& a) {
    if (a.count < 2) throw Error(ErrorCode::invalid_argument, "sweep axis count must be >= 2");
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.max > a.min))
      throw Error(ErrorCode::invalid_argument, "sweep axis needs finite min < max");
  };
  check(axis1);
  if (axis2) {
    check(*axis2);
    if (axis2->parameter == axis1.parameter)
      throw Error(ErrorCode::invalid_argument, "sweep axes must be different parameters");
  }
  base.validate();
}

ProtocolParams params_at(const SweepSpec& spec, std::size_t i1, std::size_t i2) {
  ProtocolParams p = spec.base;
  std::optional<double> two_photon;
  auto apply = [&](const SweepAxis& a, double v) {
    switch (a.parameter) {
      case SweepParameter::kappa:
        p.kappa = v;
        break;
      case SweepParameter::kappa_delta:
        p.kappa_delta = v;
        break;
      case SweepParameter::stray_s:
        p.stray_s = v;
        break;
      case SweepParameter::stray_p:
        p.stray_p = v;
        break;
      case SweepParameter::stray_two_photon:
        two_photon = v;
        break;
      case SweepParameter::omega0_T:
        p.omega0_T = v;
        break;
      case SweepParameter::gamma2:
        p.gamma2 = v;
        break;
    }
  };
  apply(spec.axis1, spec.axis1.value(i1));
  if (spec.axis2) apply(*spec.axis2, spec.axis2->value(i2));
  if (two_photon) p.stray_s = p.stray_p - *two_photon;
  return p;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CSTIRAP_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

MapEntry run_point(const ProtocolParams& p, const Tolerances& tol, const OutputGrid& grid) {
  try {
    const Efficiency e = efficiency(evolve_schrodinger(p, tol, grid));
    return MapEntry{e.p1_final, e.max_p2, e.final_norm, true};
  } catch (const Error&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return MapEntry{nan, nan, nan, false};
  }
}

EfficiencyMap run_sweep(const SweepSpec& spec, std::size_t threads) {
  spec.validate();
  EfficiencyMap map;
  map.axis1 = spec.axis1;
  map.axis2 = spec.axis2;
  const std::size_t n2 = map.n2();
  map.entries.resize(map.n1() * n2);
  parallel_for(map.entries.size(), threads, [&](std::size_t k) {
    map.entries[k] = run_point(params_at(spec, k / n2, k % n2), spec.tolerances, spec.grid);
  });
  return map;
}

}  // namespace

EfficiencyMap sweep_1d(const SweepSpec& spec, std::size_t threads) {
  if (spec.axis2) throw Error(ErrorCode::invalid_argument, "sweep_1d given a second axis");
  return run_sweep(spec, threads);
}

EfficiencyMap sweep_2d(const SweepSpec& spec, std::size_t threads) {
  if (!spec.axis2) throw Error(ErrorCode::invalid_argument, "sweep_2d needs a second axis");
  return run_sweep(spec, threads);
}

void NoiseSpec::validate() const {
  if (!(sigma_s >= 0.0) || !(sigma_p >= 0.0) || !std::isfinite(sigma_s) || !std::isfinite(sigma_p))
    throw Error(ErrorCode::invalid_argument, "noise standard deviations must be finite and >= 0");
  if (!(rho >= -1.0 && rho <= 1.0)) throw Error(ErrorCode::invalid_argument, "noise correlation must lie in [-1, 1]");
  if (n_samples < 1) throw Error(ErrorCode::invalid_argument, "noise n_samples must be >= 1");
}

NoiseSample draw_noise(const NoiseSpec& n, std::size_t k) {
  const auto k64 = static_cast<std::uint64_t>(k);
  std::seed_seq seq{static_cast<std::uint32_t>(n.seed), static_cast<std::uint32_t>(n.seed >> 32),
                    static_cast<std::uint32_t>(k64), static_cast<std::uint32_t>(k64 >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double z1 = gauss(rng);
  const double z2 = gauss(rng);
  const double orth = std::sqrt(std::max(0.0, 1.0 - n.rho * n.rho));
  return NoiseSample{n.sigma_s * z1, n.sigma_p * (n.rho * z1 + orth * z2)};
}

NoiseAverage quasistatic_average(const ProtocolParams& p, const NoiseSpec& n, const Tolerances& tol,
                                 const OutputGrid& grid, std::size_t threads) {
  n.validate();
  p.validate();
  NoiseAverage avg;
  avg.n_samples = n.n_samples;
  if (n.sigma_s == 0.0 && n.sigma_p == 0.0) {
    // Every sample is the unperturbed run.
    avg.mean_p1 = efficiency(evolve_schrodinger(p, tol, grid)).p1_final;
    return avg;
  }
  std::vector<double> p1(n.n_samples);
  {
    parallel_for(n.n_samples, threads, [&](std::size_t k) {
      const NoiseSample s = draw_noise(n, k);
      ProtocolParams q = p;
      q.stray_s += s.stray_s;
      q.stray_p += s.stray_p;
      p1[k] = efficiency(evolve_schrodinger(q, tol, grid)).p1_final;
    });
  }
  double sum = 0.0;
  for (double v : p1) sum += v;
  avg.mean_p1 = sum / static_cast<double>(p1.size());
  if (p1.size() > 1) {
    double ss = 0.0;
    for (double v : p1) ss += (v - avg.mean_p1) * (v - avg.mean_p1);
    avg.std_p1 = std::sqrt(ss / static_cast<double>(p1.size() - 1));
  }
  avg.stderr_p1 = avg.std_p1 / std::sqrt(static_cast<double>(p1.size()));
  return avg;
}

namespace {

// Bilinear (or linear, for 1D maps) interpolation of P1_final. Invalid
// entries poison the cells they touch with NaN.
double interpolate(const EfficiencyMap& map, double x, double y) {
  auto locate = [](const SweepAxis& a, double v, std::size_t& i, double& frac) {
    const double step = (a.max - a.min) / static_cast<double>(a.count - 1);
    double pos = (v - a.min) / step;
    pos = std::clamp(pos, 0.0, static_cast<double>(a.count - 1));
    i = std::min(static_cast<std::size_t>(pos), a.count - 2);
    frac = pos - static_cast<double>(i);
  };
  auto value = [&](std::size_t i1, std::size_t i2) {
    const MapEntry& e = map.at(i1, i2);
    return e.valid ? e.p1_final : std::numeric_limits<double>::quiet_NaN();
  };
  std::size_t i = 0;
  double fx = 0.0;
  locate(map.axis1, x, i, fx);
  if (!map.axis2) return (1.0 - fx) * value(i, 0) + fx * value(i + 1, 0);
  std::size_t j = 0;
  double fy = 0.0;
  locate(*map.axis2, y, j, fy);
  return (1.0 - fx) * (1.0 - fy) * value(i, j) + fx * (1.0 - fy) * value(i + 1, j) +
         (1.0 - fx) * fy * value(i, j + 1) + fx * fy * value(i + 1, j + 1);
}

bool inside(const EfficiencyMap& map, double x, double y) {
  const double eps = 0.0;
  if (x < map.axis1.min - eps || x > map.axis1.max + eps) return false;
  if (map.axis2 && (y < map.axis2->min - eps || y > map.axis2->max + eps)) return false;
  return true;
}

}  // namespace

Linewidth linewidth(const EfficiencyMap& map, double dir1, double dir2, double threshold) {
  const double n = std::hypot(dir1, dir2);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::invalid_argument, "linewidth: zero direction");
  dir1 /= n;
  dir2 /= n;
  if (!map.axis2 && std::abs(dir2) > 1e-12)
    throw Error(ErrorCode::invalid_argument, "linewidth: 1D map only supports the axis direction");
  if (!inside(map, 0.0, 0.0)) throw Error(ErrorCode::invalid_argument, "linewidth: map does not cover the origin");

  Linewidth out;
  out.origin_value = interpolate(map, 0.0, 0.0);
  out.threshold = threshold < 0.0 ? 0.5 * out.origin_value : threshold;
  if (!(out.threshold > 0.0 && out.threshold < 1.0))
    throw Error(ErrorCode::invalid_argument, "linewidth: threshold must lie in (0, 1)");
  if (!(out.origin_value >= out.threshold)) {
    out.width = 0.0;
    return out;
  }

  auto step_len = [&] {
    double h = std::numeric_limits<double>::infinity();
    const double d1 = (map.axis1.max - map.axis1.min) / static_cast<double>(map.axis1.count - 1);
    if (std::abs(dir1) > 0.0) h = std::min(h, d1 / std::abs(dir1));
    if (map.axis2 && std::abs(dir2) > 0.0) {
      const double d2 = (map.axis2->max - map.axis2->min) / static_cast<double>(map.axis2->count - 1);
      h = std::min(h, d2 / std::abs(dir2));
    }
    return h / 16.0;
  }();

  // Distance from the origin to the map boundary along sign * direction.
  auto extent = [&](double sign) {
    double s_max = std::numeric_limits<double>::infinity();
    auto clip = [&](double d, double lo, double hi) {
      if (d > 0.0) s_max = std::min(s_max, hi / d);
      if (d < 0.0) s_max = std::min(s_max, lo / d);
    };
    clip(sign * dir1, map.axis1.min, map.axis1.max);
    if (map.axis2) clip(sign * dir2, map.axis2->min, map.axis2->max);
    return s_max;
  };

  auto half_width = [&](double sign) {
    const double s_max = extent(sign);
    double s_prev = 0.0;
    double v_prev = out.origin_value;
    for (int k = 1;; ++k) {
      const double s = std::min(step_len * k, s_max);
      const double v = interpolate(map, sign * s * dir1, sign * s * dir2);
      if (!(v >= out.threshold)) {
        if (std::isnan(v)) {
          out.bracketed = false;
          return s_prev;
        }
        return s_prev + (s - s_prev) * (v_prev - out.threshold) / (v_prev - v);
      }
      if (s >= s_max) {
        out.bracketed = false;
        return s_max;
      }
      s_prev = s;
      v_prev = v;
    }
  };
  out.width = half_width(+1.0) + half_width(-1.0);
  return out;
}

}  // namespace cstirap
