#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cstirap/linalg3.hpp"
#include "cstirap/model.hpp"
#include "cstirap/propagate.hpp"

namespace test {

using namespace cstirap;

// Baseline: Omega0 T = 40, h = 10, kappa_delta = 1.2, kappa = 1.
inline ProtocolParams baseline() { return ProtocolParams{}; }

inline ComplexMat3 random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMat3 m;
  for (std::size_t r = 0; r < 3; ++r) {
    m(r, r) = g(rng);
    for (std::size_t c = r + 1; c < 3; ++c) {
      m(r, c) = cplx(g(rng), g(rng));
      m(c, r) = std::conj(m(r, c));
    }
  }
  m.set_hermitian(true);
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace test
