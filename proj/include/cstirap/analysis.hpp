#pragma once

// Closed-form and semi-analytic structures of the Lambda system: dark state,
// Stokes spectrum and eigenbasis, continuity-labelled full spectrum, and
// adiabatic-elimination estimates of the transient population of |2>.

#include <array>
#include <vector>

#include "cstirap/linalg3.hpp"
#include "cstirap/model.hpp"

namespace cstirap {

/// (Omega_s |0> - Omega_p |1>) / sqrt(Omega_s^2 + Omega_p^2).
ComplexVec3 dark_state(double omega_p, double omega_s);

struct StokesEigenvalues {
  double s0 = 0.0;
  double s_plus = 0.0;   // delta + (delta_s + sqrt(delta_s^2 + Omega_s^2)) / 2
  double s_minus = 0.0;  // delta + (delta_s - sqrt(delta_s^2 + Omega_s^2)) / 2
};

StokesEigenvalues stokes_eigenvalues(const Protocol& proto, double t);

/// Eigenbasis of the Stokes-dressed {|1>, |2>} block,
/// |s_pm> = a1_pm |1> + a2_pm |2>, with a1_pm >= 0, and the effective pump
/// couplings Omega_pm = Omega_p [1 + 4 ((delta - s_mp) / Omega_s)^2]^(-1/2).
struct StokesFrame {
  double s0 = 0.0;
  double s_plus = 0.0;
  double s_minus = 0.0;
  double a1_plus = 0.0, a2_plus = 0.0;
  double a1_minus = 0.0, a2_minus = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
};

StokesFrame stokes_frame(const Protocol& proto, double t);

struct SpectrumSample {
  double t = 0.0;
  std::array<double, 3> energies{};  // continuity labelled from the window start
};

/// Eigenvalues of the Hermitian full Hamiltonian on `times`, labelled by
/// continuity starting from ascending order at times.front().
std::vector<SpectrumSample> spectrum_full(const Protocol& proto, const std::vector<double>& times);

/// Smallest splitting between the |0>-connected branch and its neighbours,
/// scanned over [t_lo, t_hi] with n points of the Hermitian full Hamiltonian.
double min_gap_near(const Protocol& proto, double t_lo, double t_hi, std::size_t n = 2001);

struct LeakageEstimate {
  std::vector<double> times;
  std::vector<double> c0;        // effective amplitude on |0>
  std::vector<double> c_other;   // |1> (bare) or the kept Stokes state
  std::vector<double> p2;        // estimated population of |2>; NaN where masked
  std::vector<bool> valid;       // false at singular points
};

/// Adiabatic elimination of |2> in the bare basis.
LeakageEstimate ae_bare(const Protocol& proto, const std::vector<double>& times);

enum class StokesVariant {
  as_written,       // magnitude of the kept state's coupling in the numerator
  self_consistent,  // direct substitution of the eliminated amplitude
};

/// Adiabatic elimination in the Stokes eigenbasis. At each time the Stokes
/// state closer to resonance with |0> is kept and the other one eliminated.
LeakageEstimate ae_stokes(const Protocol& proto, const std::vector<double>& times,
                          StokesVariant variant = StokesVariant::self_consistent);

/// Leakage at the protocol crossing from the bare-basis elimination:
/// ((kd - 1) / kd) (k - sqrt(k^2 + 4))^2 / (4 + (k + sqrt(k^2 + 4))^2).
double p2_figure_of_merit(double kappa, double kappa_delta);

}  // namespace cstirap
