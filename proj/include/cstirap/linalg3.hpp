#pragma once

// Small dense complex linear algebra for the three-level problem: state
// vectors, Hermitian matrices, a cyclic Jacobi eigensolver and
// overlap-based eigenvector continuation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>

#include "cstirap/error.hpp"

namespace cstirap {

using cplx = std::complex<double>;

template <std::size_t N>
struct Vec {
  std::array<cplx, N> c{};

  cplx& operator[](std::size_t i) { return c[i]; }
  const cplx& operator[](std::size_t i) const { return c[i]; }

  static Vec basis(std::size_t i) {
    Vec v;
    v.c[i] = 1.0;
    return v;
  }

  double population(std::size_t i) const { return std::norm(c[i]); }

  double norm() const {
    double s = 0.0;
    for (const auto& x : c) s += std::norm(x);
    return std::sqrt(s);
  }

  Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(cplx s) {
    for (auto& x : c) x *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(cplx s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, cplx s) { return a *= s; }
  friend bool operator==(const Vec&, const Vec&) = default;
};

/// <a|b>, conjugate-linear in the first argument.
template <std::size_t N>
cplx inner(const Vec<N>& a, const Vec<N>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

template <std::size_t N>
class Mat {
 public:
  Mat() = default;

  static Mat zero() { return Mat{}; }

  static Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    m.hermitian_ = true;
    return m;
  }

  static Mat diagonal(const std::array<double, N>& d) {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    m.hermitian_ = true;
    return m;
  }

  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * N + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * N + c]; }

  /// Assertion that the matrix is Hermitian. Checked by the eigensolver.
  bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : a_) s += std::norm(x);
    return std::sqrt(s);
  }

  double hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = r; c < N; ++c)
        worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return worst;
  }

  Mat adjoint() const {
    Mat m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) m(r, c) = std::conj((*this)(c, r));
    m.hermitian_ = hermitian_;
    return m;
  }

  cplx trace() const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (*this)(i, i);
    return s;
  }

  Vec<N> operator*(const Vec<N>& v) const {
    Vec<N> out;
    for (std::size_t r = 0; r < N; ++r) {
      cplx s = 0.0;
      for (std::size_t c = 0; c < N; ++c) s += (*this)(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

  Mat operator*(const Mat& o) const {
    Mat out;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += (*this)(r, k) * o(k, c);
        out(r, c) = s;
      }
    return out;
  }

 private:
  std::array<cplx, N * N> a_{};
  bool hermitian_ = false;
};

enum class EigenOrdering { by_value, by_continuity };

template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};
  std::array<Vec<N>, N> vectors{};
  EigenOrdering ordering = EigenOrdering::by_value;
  // Set by match_continuity when two assignments scored within the
  // ambiguity threshold and the tie was broken by eigenvalue proximity.
  bool ambiguous = false;
};

using ComplexVec3 = Vec<3>;
using ComplexMat3 = Mat<3>;
using EigenSystem3 = EigenSystem<3>;

namespace detail {

template <std::size_t N>
void fix_phase_largest_real(Vec<N>& v) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (std::abs(v[i]) > std::abs(v[k]) * (1.0 + 1e-12)) k = i;
  const double mag = std::abs(v[k]);
  if (mag > 0.0) v *= std::conj(v[k]) / mag;
}

}  // namespace detail

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues ascending; each eigenvector's largest component is
/// real positive.
template <std::size_t N>
EigenSystem<N> eig_hermitian(const Mat<N>& m) {
  const double scale = std::max(1.0, m.frobenius_norm());
  if (!m.hermitian())
    throw Error(ErrorCode::invalid_argument, "eig_hermitian: matrix not flagged Hermitian");
  if (m.hermiticity_defect() > 1e-14 * scale)
    throw Error(ErrorCode::invalid_argument, "eig_hermitian: matrix is not Hermitian");

  Mat<N> a = m;
  for (std::size_t i = 0; i < N; ++i) a(i, i) = a(i, i).real();
  Mat<N> v = Mat<N>::identity();

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= 1e-19 * scale) continue;
        const cplx phase = a(p, q) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * r);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // U acts on the (p, q) plane: U = D R with D = diag(1, conj(phase)).
        Mat<N> u = Mat<N>::identity();
        u(p, p) = c;
        u(p, q) = s;
        u(q, p) = -s * std::conj(phase);
        u(q, q) = c * std::conj(phase);

        a = u.adjoint() * a * u;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < N; ++i) a(i, i) = a(i, i).real();
        v = v * u;
      }
    }
  }

  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem<N> es;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t col = order[k];
    es.values[k] = a(col, col).real();
    for (std::size_t r = 0; r < N; ++r) es.vectors[k][r] = v(r, col);
    detail::fix_phase_largest_real(es.vectors[k]);
  }
  es.ordering = EigenOrdering::by_value;
  return es;
}

inline EigenSystem3 eig_hermitian_3(const ComplexMat3& m) { return eig_hermitian<3>(m); }

/// Relabels `cur` so that each eigenvector continues the one in `prev` with
/// the largest overlap, then rotates each phase so <prev_i|cur_i> is real
/// positive. Near-ties (assignment scores within 1e-6) fall back to
/// eigenvalue proximity, then to the lexicographically first permutation.
template <std::size_t N>
EigenSystem<N> match_continuity(const EigenSystem<N>& prev, const EigenSystem<N>& cur) {
  constexpr double kTie = 1e-6;

  std::array<std::array<cplx, N>, N> ov{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) ov[i][j] = inner(prev.vectors[i], cur.vectors[j]);

  std::array<std::size_t, N> perm{};
  std::iota(perm.begin(), perm.end(), 0);

  struct Candidate {
    std::array<std::size_t, N> perm;
    double overlap;
    double distance;
  };
  std::array<Candidate, 6> cands{};  // N <= 3
  std::size_t n_cands = 0;
  do {
    Candidate c{perm, 0.0, 0.0};
    for (std::size_t i = 0; i < N; ++i) {
      c.overlap += std::abs(ov[i][perm[i]]);
      c.distance += std::abs(prev.values[i] - cur.values[perm[i]]);
    }
    cands[n_cands++] = c;
  } while (std::next_permutation(perm.begin(), perm.end()));

  double best_overlap = 0.0;
  for (std::size_t k = 0; k < n_cands; ++k) best_overlap = std::max(best_overlap, cands[k].overlap);

  std::size_t chosen = n_cands;
  std::size_t n_tied = 0;
  for (std::size_t k = 0; k < n_cands; ++k) {
    if (cands[k].overlap < best_overlap - kTie) continue;
    ++n_tied;
    if (chosen == n_cands || cands[k].distance < cands[chosen].distance - 1e-15) chosen = k;
  }

  EigenSystem<N> out;
  out.ordering = EigenOrdering::by_continuity;
  out.ambiguous = n_tied > 1;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t j = cands[chosen].perm[i];
    out.values[i] = cur.values[j];
    out.vectors[i] = cur.vectors[j];
    const cplx o = ov[i][j];
    const double mag = std::abs(o);
    if (mag > 0.0) out.vectors[i] *= std::conj(o) / mag;
  }
  return out;
}

}  // namespace cstirap
