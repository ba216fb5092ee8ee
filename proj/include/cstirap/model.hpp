#pragma once

// Protocol parameterization for chirped STIRAP with one always-on field.
//
// Units: time in units of the pump width T, frequencies in units of the
// always-on Rabi frequency Omega0. The adiabaticity knob Omega0*T converts
// between the two; decay rates are given in units of 1/T.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cstirap/linalg3.hpp"

namespace cstirap {

enum class DriveMode {
  stokes_always_on,
  pump_always_on,  // dual protocol
};

std::string_view to_string(DriveMode mode);
DriveMode drive_mode_from_string(std::string_view s);

struct ProtocolParams {
  double omega0_T = 40.0;
  double kappa = 1.0;        // peak pulsed Rabi frequency / Omega0
  double kappa_delta = 1.2;  // ratio of chirp amplitudes
  double h_delta = 10.0;     // asymptotic detuning / Omega0
  double tau = 2.0;          // ramp half separation, units of T
  double tau_ch = 0.6;       // ramp timescale, units of T
  double gamma2 = 0.0;       // amplitude decay rate of |2>, units of 1/T
  double stray_s = 0.0;      // static stray detunings, units of Omega0
  double stray_p = 0.0;
  DriveMode mode = DriveMode::stokes_always_on;
  int detuning_sign = +1;
  // Centre of the pulsed field. Empty means: the protocol crossing of the
  // stray-free schedule (t_plus, or t_minus in the dual mode), or t = 0
  // when there is none.
  std::optional<double> pulse_center;

  double stray_two_photon() const { return stray_p - stray_s; }

  /// Throws Error(invalid_argument) on out-of-domain values.
  void validate() const;

  friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

/// Ramp shared by both detunings: (h/2)[tanh((t-tau)/tau_ch) + tanh((t+tau)/tau_ch)],
/// times detuning_sign. No stray part.
double detuning_ramp(const ProtocolParams& p, double t);
/// Antiderivative of detuning_ramp, zero at t = 0.
double detuning_ramp_integral(const ProtocolParams& p, double t);

struct CrossingPair {
  double t_minus = 0.0;
  double t_plus = 0.0;
};

/// Roots of the stray-free crossing condition 4 delta delta_p = Omega0^2
/// (stokes mode) or its dual counterpart -4 delta delta_s = Omega0^2.
/// Bisection refined to 1e-12 relative. Throws Error(no_crossing) if
/// kappa_delta <= 1 or the required detuning exceeds the ramp amplitude.
CrossingPair find_crossings(const ProtocolParams& p);

struct TimeWindow {
  double t_initial = 0.0;
  double t_final = 0.0;
};

/// Immutable view of a parameter set with the derived pulse centre and
/// integration window resolved. Cheap to copy.
class Protocol {
 public:
  explicit Protocol(ProtocolParams params);

  const ProtocolParams& params() const { return params_; }
  double pulse_center() const { return pulse_center_; }
  const TimeWindow& window() const { return window_; }
  // False when no crossing exists and the pulse centre fell back to t = 0.
  bool has_crossing() const { return has_crossing_; }

  double delta_s(double t) const;
  double delta_p(double t) const;
  double delta(double t) const { return delta_p(t) - delta_s(t); }
  // Antiderivatives of delta_s and delta_p, zero at t = 0.
  double delta_s_integral(double t) const;
  double delta_p_integral(double t) const;
  double omega_p(double t) const;
  double omega_s(double t) const;

  /// Rotating-frame Hamiltonian in units of Omega0 with the
  /// decay term -i*Gamma2/(Omega0 T) on |2><2|. Flagged Hermitian iff Gamma2 == 0.
  ComplexMat3 hamiltonian_full(double t) const;
  /// hamiltonian_full without the decay term.
  ComplexMat3 hamiltonian_hermitian(double t) const;
  /// Pump switched off, Hermitian part only.
  ComplexMat3 hamiltonian_stokes(double t) const;

  /// Crossing condition evaluated on the actual schedule (including stray
  /// terms): 4 delta delta_p - Omega_s^2 in the stokes mode.
  double crossing_function(double t) const;
  /// All sign changes of crossing_function inside the window, bisected.
  std::vector<double> crossing_times() const;

 private:
  ProtocolParams params_;
  double pulse_center_ = 0.0;
  bool has_crossing_ = false;
  TimeWindow window_;
};

/// Always-on pump dual: t_c -> -t_c, delta_p <-> delta_s, Omega_p <-> Omega_s.
/// Toggles the drive mode, so applying it twice is the identity.
ProtocolParams dual_transform(const ProtocolParams& p);

/// delta_k -> -delta_k for the ideal parts of both detunings.
ProtocolParams flip_detunings(const ProtocolParams& p);

}  // namespace cstirap
