#include <doctest.h>

#include <numbers>

#include "cstirap/analysis.hpp"
#include "support.hpp"

using namespace cstirap;

namespace {

cplx det3(const ComplexMat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// Roots of det(lambda - M) = lambda^3 - t lambda^2 + s lambda - d by the
// trigonometric formula for three real roots, ascending.
std::array<double, 3> charpoly_roots(const ComplexMat3& m) {
  const double t = m.trace().real();
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) s += (m(i, i) * m(j, j) - m(i, j) * m(j, i)).real();
  const double d = det3(m).real();
  // lambda = x + t/3  ->  x^3 + p x + q = 0
  const double p = s - t * t / 3.0;
  const double q = -2.0 * t * t * t / 27.0 + t * s / 3.0 - d;
  std::array<double, 3> r{};
  if (p > -1e-300) {
    r.fill(t / 3.0);
    return r;
  }
  const double a = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * a), -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k) r[k] = t / 3.0 + a * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
  std::sort(r.begin(), r.end());
  return r;
}

double residual(const ComplexMat3& m, const EigenSystem3& es, std::size_t k) {
  Vec<3> r = m * es.vectors[k];
  r -= es.values[k] * es.vectors[k];
  return r.norm();
}

}  // namespace

TEST_SUITE("linalg3") {
  TEST_CASE("identity has triple eigenvalue one and an orthonormal basis") {
    const EigenSystem3 es = eig_hermitian_3(ComplexMat3::identity());
    for (int k = 0; k < 3; ++k) CHECK(es.values[k] == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(std::abs(inner(es.vectors[i], es.vectors[j]) - (i == j ? 1.0 : 0.0)) < 1e-14);
  }

  TEST_CASE("diagonal matrix gives sorted diagonal") {
    const EigenSystem3 es = eig_hermitian_3(ComplexMat3::diagonal({0.0, 0.7, -0.3}));
    CHECK(es.values[0] == doctest::Approx(-0.3));
    CHECK(es.values[1] == doctest::Approx(0.0));
    CHECK(es.values[2] == doctest::Approx(0.7));
    CHECK(es.ordering == EigenOrdering::by_value);
  }

  TEST_CASE("symmetric Stokes block has eigenvalues -1/2, 0, 1/2") {
    ComplexMat3 m;
    m(1, 2) = 0.5;
    m(2, 1) = 0.5;
    m.set_hermitian(true);
    const EigenSystem3 es = eig_hermitian_3(m);
    CHECK(std::abs(es.values[0] + 0.5) < 1e-15);
    CHECK(std::abs(es.values[1]) < 1e-15);
    CHECK(std::abs(es.values[2] - 0.5) < 1e-15);
  }

  TEST_CASE("non-Hermitian input is rejected") {
    ComplexMat3 m;
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(eig_hermitian_3(m), Error);  // not flagged
    m.set_hermitian(true);
    CHECK_THROWS_AS(eig_hermitian_3(m), Error);  // flagged but not Hermitian
    m(1, 0) = 1.0;
    CHECK_NOTHROW(eig_hermitian_3(m));
  }

  TEST_CASE("random Hermitian matrices: residual, orthonormality, trace, determinant, roots") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const double scale = std::pow(10.0, trial % 5 - 2);
      const ComplexMat3 m = test::random_hermitian(rng, scale);
      const EigenSystem3 es = eig_hermitian_3(m);
      const double norm = m.frobenius_norm();
      for (std::size_t k = 0; k < 3; ++k) CHECK(residual(m, es, k) <= 1e-12 * norm);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          CHECK(std::abs(inner(es.vectors[i], es.vectors[j]) - (i == j ? 1.0 : 0.0)) <= 1e-12);
      CHECK(es.values[0] <= es.values[1]);
      CHECK(es.values[1] <= es.values[2]);
      CHECK(std::abs(es.values[0] + es.values[1] + es.values[2] - m.trace().real()) <= 1e-11 * std::max(1.0, norm));
      const double prod = es.values[0] * es.values[1] * es.values[2];
      CHECK(std::abs(prod - det3(m).real()) <= 1e-10 * std::max(1.0, norm * norm * norm));
      const auto roots = charpoly_roots(m);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(roots[k] - es.values[k]) <= 1e-9 * norm);
    }
  }

  TEST_CASE("match_continuity leaves an identical system unchanged") {
    std::mt19937_64 rng(11);
    const EigenSystem3 es = eig_hermitian_3(test::random_hermitian(rng));
    const EigenSystem3 m = match_continuity(es, es);
    CHECK(m.ordering == EigenOrdering::by_continuity);
    CHECK_FALSE(m.ambiguous);
    for (int k = 0; k < 3; ++k) {
      CHECK(m.values[k] == es.values[k]);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(m.vectors[k][i] - es.vectors[k][i]) < 1e-15);
    }
  }

  TEST_CASE("match_continuity undoes a permutation and fixes phases") {
    std::mt19937_64 rng(12);
    const EigenSystem3 es = eig_hermitian_3(test::random_hermitian(rng));
    EigenSystem3 cur = es;
    std::swap(cur.values[1], cur.values[2]);
    std::swap(cur.vectors[1], cur.vectors[2]);
    cur.vectors[0] *= std::polar(1.0, 0.7);
    cur.vectors[2] *= std::polar(1.0, -2.1);
    const EigenSystem3 m = match_continuity(es, cur);
    for (int k = 0; k < 3; ++k) {
      CHECK(m.values[k] == es.values[k]);
      const cplx ov = inner(es.vectors[k], m.vectors[k]);
      CHECK(std::abs(ov.imag()) < 1e-14);
      CHECK(ov.real() > 1.0 - 1e-14);
    }
  }

  TEST_CASE("match_continuity flags a genuine degeneracy and resolves it by eigenvalue proximity") {
    const EigenSystem3 prev = eig_hermitian_3(ComplexMat3::diagonal({1.0, 2.0, 2.0}));
    // Same spectrum, basis rotated by 45 degrees inside the degenerate pair.
    EigenSystem3 cur = prev;
    const double h = 1.0 / std::sqrt(2.0);
    cur.vectors[1] = h * (prev.vectors[1] + prev.vectors[2]);
    cur.vectors[2] = h * (prev.vectors[1] - prev.vectors[2]);
    const EigenSystem3 m = match_continuity(prev, cur);
    CHECK(m.ambiguous);
    CHECK(m.values[0] == 1.0);
    CHECK(m.values[1] == 2.0);
    CHECK(m.values[2] == 2.0);
  }

  TEST_CASE("continuation through the Stokes crossings follows the closed-form curves") {
    const Protocol proto(test::baseline());
    const TimeWindow w = proto.window();
    const std::size_t n = 4001;
    EigenSystem3 prev;
    // Ascending order at the start: s_minus < s_plus < s0 = 0.
    double max_jump = 0.0;
    std::array<double, 3> last{};
    for (std::size_t i = 0; i < n; ++i) {
      const double t = w.t_initial + (w.t_final - w.t_initial) * static_cast<double>(i) / (n - 1);
      EigenSystem3 cur = eig_hermitian_3(proto.hamiltonian_stokes(t));
      if (i > 0) cur = match_continuity(prev, cur);
      const StokesEigenvalues s = stokes_eigenvalues(proto, t);
      CHECK(std::abs(cur.values[0] - s.s_minus) < 1e-11);
      CHECK(std::abs(cur.values[1] - s.s_plus) < 1e-11);
      CHECK(std::abs(cur.values[2] - s.s0) < 1e-11);
      if (i > 0)
        for (int k = 0; k < 3; ++k) max_jump = std::max(max_jump, std::abs(cur.values[k] - last[k]));
      last = cur.values;
      prev = cur;
    }
    // The fastest curve moves by at most ~h_delta * kappa_delta * dt / tau_ch per step.
    const double dt = (w.t_final - w.t_initial) / (n - 1);
    CHECK(max_jump < 12.0 * dt / 0.6 * 1.1);
  }
}
