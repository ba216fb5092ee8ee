#include "cstirap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cstirap {

std::string_view to_string(DriveMode mode) {
  switch (mode) {
    case DriveMode::stokes_always_on:
      return "stokes-always-on";
    case DriveMode::pump_always_on:
      return "pump-always-on";
  }
  return "?";
}

DriveMode drive_mode_from_string(std::string_view s) {
  if (s == "stokes-always-on") return DriveMode::stokes_always_on;
  if (s == "pump-always-on") return DriveMode::pump_always_on;
  throw Error(ErrorCode::invalid_argument, "unknown mode '" + std::string(s) + "'");
}

void ProtocolParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); };
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(omega0_T > 0.0) || !finite(omega0_T)) fail("omega0_T must be > 0");
  if (!(tau_ch > 0.0) || !finite(tau_ch)) fail("tau_ch must be > 0");
  if (!(h_delta > 0.0) || !finite(h_delta)) fail("h_delta must be > 0");
  if (!(gamma2 >= 0.0) || !finite(gamma2)) fail("gamma2 must be >= 0");
  if (!(kappa >= 0.0) || !finite(kappa)) fail("kappa must be >= 0");
  if (!finite(kappa_delta)) fail("kappa_delta must be finite");
  if (!finite(tau)) fail("tau must be finite");
  if (!finite(stray_s) || !finite(stray_p)) fail("stray detunings must be finite");
  if (detuning_sign != 1 && detuning_sign != -1) fail("detuning_sign must be +1 or -1");
  if (pulse_center && !finite(*pulse_center)) fail("pulse_center must be finite");
}

double detuning_ramp(const ProtocolParams& p, double t) {
  return p.detuning_sign * 0.5 * p.h_delta *
         (std::tanh((t - p.tau) / p.tau_ch) + std::tanh((t + p.tau) / p.tau_ch));
}

namespace {

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

double detuning_ramp_integral(const ProtocolParams& p, double t) {
  const double c = log_cosh(p.tau / p.tau_ch);
  return p.detuning_sign * 0.5 * p.h_delta * p.tau_ch *
         (log_cosh((t - p.tau) / p.tau_ch) - c + log_cosh((t + p.tau) / p.tau_ch) - c);
}

namespace {

// Bisection on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CrossingPair find_crossings(const ProtocolParams& p) {
  p.validate();
  const double kd = p.kappa_delta;
  if (!(kd > 1.0)) {
    std::ostringstream os;
    os << "no crossing: kappa_delta = " << kd << " <= 1";
    throw Error(ErrorCode::no_crossing, os.str());
  }
  // Stray-free: delta = (kd - 1) r, delta_p = kd r for the ramp r(t) (the dual
  // mode gives the same condition with the roles of the detunings swapped),
  // so the condition reads 4 kd (kd - 1) r^2 = 1.
  auto g = [&](double t) {
    const double r = detuning_ramp(p, t);
    return 4.0 * kd * (kd - 1.0) * r * r - 1.0;
  };
  const double r_needed = 1.0 / std::sqrt(4.0 * kd * (kd - 1.0));
  if (r_needed >= p.h_delta) {
    std::ostringstream os;
    os << "no crossing: required detuning " << r_needed << " Omega0 exceeds h_delta = " << p.h_delta;
    throw Error(ErrorCode::no_crossing, os.str());
  }
  // |r| is monotone in |t| and odd in t.
  const double lo = 0.0;
  double hi = std::abs(p.tau) + p.tau_ch;
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e6 * (std::abs(p.tau) + p.tau_ch))
      throw Error(ErrorCode::no_crossing, "no crossing: root not bracketed");
  }
  if (g(lo) >= 0.0) throw Error(ErrorCode::no_crossing, "no crossing: root not bracketed at t = 0");
  const double t_plus = bisect(g, lo, hi);
  const double t_minus = bisect(g, -hi, -lo);
  return CrossingPair{t_minus, t_plus};
}

Protocol::Protocol(ProtocolParams params) : params_(std::move(params)) {
  params_.validate();
  double tc_abs = 0.0;
  try {
    const CrossingPair c = find_crossings(params_);
    tc_abs = c.t_plus;
    has_crossing_ = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_crossing) throw;
    // Centre of the schedule, where the ramp passes through zero.
    tc_abs = 0.0;
    has_crossing_ = false;
  }
  const double sign = params_.mode == DriveMode::stokes_always_on ? 1.0 : -1.0;
  pulse_center_ = params_.pulse_center.value_or(sign * tc_abs);

  const double span = std::abs(params_.tau) +
                      std::max(6.0 * params_.tau_ch, std::abs(pulse_center_) + 6.0);
  window_ = TimeWindow{-span, span};
}

double Protocol::delta_s(double t) const {
  const double r = detuning_ramp(params_, t);
  const double ideal = params_.mode == DriveMode::stokes_always_on ? r : params_.kappa_delta * r;
  return ideal + params_.stray_s;
}

double Protocol::delta_p(double t) const {
  const double r = detuning_ramp(params_, t);
  const double ideal = params_.mode == DriveMode::stokes_always_on ? params_.kappa_delta * r : r;
  return ideal + params_.stray_p;
}

double Protocol::delta_s_integral(double t) const {
  const double r = detuning_ramp_integral(params_, t);
  const double ideal = params_.mode == DriveMode::stokes_always_on ? r : params_.kappa_delta * r;
  return ideal + params_.stray_s * t;
}

double Protocol::delta_p_integral(double t) const {
  const double r = detuning_ramp_integral(params_, t);
  const double ideal = params_.mode == DriveMode::stokes_always_on ? params_.kappa_delta * r : r;
  return ideal + params_.stray_p * t;
}

double Protocol::omega_p(double t) const {
  if (params_.mode == DriveMode::pump_always_on) return 1.0;
  const double x = t - pulse_center_;
  return params_.kappa * std::exp(-x * x);
}

double Protocol::omega_s(double t) const {
  if (params_.mode == DriveMode::stokes_always_on) return 1.0;
  const double x = t - pulse_center_;
  return params_.kappa * std::exp(-x * x);
}

ComplexMat3 Protocol::hamiltonian_hermitian(double t) const {
  ComplexMat3 h;
  const double dp = delta_p(t);
  const double ds = delta_s(t);
  const double wp = omega_p(t);
  const double ws = omega_s(t);
  h(1, 1) = dp - ds;
  h(2, 2) = dp;
  h(0, 2) = 0.5 * wp;
  h(2, 0) = 0.5 * wp;
  h(1, 2) = 0.5 * ws;
  h(2, 1) = 0.5 * ws;
  h.set_hermitian(true);
  return h;
}

ComplexMat3 Protocol::hamiltonian_full(double t) const {
  ComplexMat3 h = hamiltonian_hermitian(t);
  if (params_.gamma2 > 0.0) {
    h(2, 2) -= cplx(0.0, params_.gamma2 / params_.omega0_T);
    h.set_hermitian(false);
  }
  return h;
}

ComplexMat3 Protocol::hamiltonian_stokes(double t) const {
  ComplexMat3 h = hamiltonian_hermitian(t);
  h(0, 2) = 0.0;
  h(2, 0) = 0.0;
  return h;
}

double Protocol::crossing_function(double t) const {
  const double ws = omega_s(t);
  const double wp = omega_p(t);
  if (params_.mode == DriveMode::stokes_always_on) return 4.0 * delta(t) * delta_p(t) - ws * ws;
  return -4.0 * delta(t) * delta_s(t) - wp * wp;
}

std::vector<double> Protocol::crossing_times() const {
  std::vector<double> roots;
  const int n = 20000;
  const double t0 = window_.t_initial;
  const double dt = (window_.t_final - t0) / n;
  auto f = [this](double t) { return crossing_function(t); };
  double prev_t = t0;
  double prev_f = f(t0);
  for (int i = 1; i <= n; ++i) {
    const double t = t0 + i * dt;
    const double ft = f(t);
    if (ft == 0.0) {
      roots.push_back(t);
    } else if (prev_f != 0.0 && (ft < 0.0) != (prev_f < 0.0)) {
      roots.push_back(bisect(f, prev_t, t));
    }
    prev_t = t;
    prev_f = ft;
  }
  return roots;
}

ProtocolParams dual_transform(const ProtocolParams& p) {
  ProtocolParams q = p;
  q.mode = p.mode == DriveMode::stokes_always_on ? DriveMode::pump_always_on
                                                 : DriveMode::stokes_always_on;
  std::swap(q.stray_s, q.stray_p);
  if (q.pulse_center) q.pulse_center = -*q.pulse_center;
  return q;
}

ProtocolParams flip_detunings(const ProtocolParams& p) {
  ProtocolParams q = p;
  q.detuning_sign = -p.detuning_sign;
  return q;
}

}  // namespace cstirap
