#pragma once

#include <cstddef>
#include <vector>

#include "cstirap/linalg3.hpp"
#include "cstirap/model.hpp"

namespace cstirap {

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-12;
  std::size_t max_steps = 50'000'000;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

/// Equally spaced samples across the protocol window, endpoints included.
struct OutputGrid {
  std::size_t samples = 2000;

  friend bool operator==(const OutputGrid&, const OutputGrid&) = default;
};

std::vector<double> sample_times(const TimeWindow& w, const OutputGrid& grid);

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

struct Trajectory {
  std::vector<double> times;  // units of T
  std::vector<ComplexVec3> states;
  std::vector<double> p0, p1, p2;
  std::vector<double> norm;  // ||psi||, so p0 + p1 + p2 == norm^2
  ProtocolParams params;
  double pulse_center = 0.0;
  IntegratorStats stats;

  std::size_t size() const { return times.size(); }
};

/// Solves i d/dt psi = (Omega0 T) H(t) psi from |0> at the start of the window
/// with adaptive Dormand-Prince 5(4) and quartic dense output. Throws
/// Error(integration) on step-size underflow or when max_steps is exhausted.
Trajectory evolve_schrodinger(const ProtocolParams& p, const Tolerances& tol = {},
                              const OutputGrid& grid = {});

/// Populations of the instantaneous eigenvector of the Hermitian Hamiltonian
/// continuously connected to |0> at the start of the window. Requires
/// gamma2 == 0. Throws Error(degenerate) if the followed branch meets an
/// exact degeneracy.
Trajectory evolve_adiabatic(const ProtocolParams& p, const OutputGrid& grid = {});

struct Efficiency {
  double p1_final = 0.0;
  double max_p2 = 0.0;
  double final_norm = 0.0;
};

Efficiency efficiency(const Trajectory& traj);

}  // namespace cstirap
