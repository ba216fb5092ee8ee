#include "cstirap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cstirap {

ComplexVec3 dark_state(double omega_p, double omega_s) {
  const double n = std::hypot(omega_p, omega_s);
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "dark_state: both Rabi frequencies are zero");
  ComplexVec3 d;
  d[0] = omega_s / n;
  d[1] = -omega_p / n;
  return d;
}

StokesEigenvalues stokes_eigenvalues(const Protocol& proto, double t) {
  const double ds = proto.delta_s(t);
  const double d = proto.delta(t);
  const double ws = proto.omega_s(t);
  const double root = std::sqrt(ds * ds + ws * ws);
  return StokesEigenvalues{0.0, d + 0.5 * (ds + root), d + 0.5 * (ds - root)};
}

namespace {

// Normalised eigenvector (a1, a2) of [[delta, ws/2], [ws/2, delta_p]] for
// eigenvalue lambda, with a1 >= 0.
std::array<double, 2> block_vector(double lambda, double delta, double ws) {
  double a1 = 0.5 * ws;
  double a2 = lambda - delta;
  const double n = std::hypot(a1, a2);
  if (n == 0.0) return {1.0, 0.0};
  a1 /= n;
  a2 /= n;
  if (a1 < 0.0) {
    a1 = -a1;
    a2 = -a2;
  }
  return {a1, a2};
}

}  // namespace

StokesFrame stokes_frame(const Protocol& proto, double t) {
  const StokesEigenvalues ev = stokes_eigenvalues(proto, t);
  const double d = proto.delta(t);
  const double ws = proto.omega_s(t);
  const double wp = proto.omega_p(t);

  StokesFrame f;
  f.s0 = ev.s0;
  f.s_plus = ev.s_plus;
  f.s_minus = ev.s_minus;
  const auto vp = block_vector(ev.s_plus, d, ws);
  const auto vm = block_vector(ev.s_minus, d, ws);
  f.a1_plus = vp[0];
  f.a2_plus = vp[1];
  f.a1_minus = vm[0];
  f.a2_minus = vm[1];
  if (ws > 0.0) {
    const double xp = (d - ev.s_minus) / ws;
    const double xm = (d - ev.s_plus) / ws;
    f.omega_plus = wp / std::sqrt(1.0 + 4.0 * xp * xp);
    f.omega_minus = wp / std::sqrt(1.0 + 4.0 * xm * xm);
  } else {
    f.omega_plus = wp * std::abs(vp[1]);
    f.omega_minus = wp * std::abs(vm[1]);
  }
  return f;
}

std::vector<SpectrumSample> spectrum_full(const Protocol& proto, const std::vector<double>& times) {
  std::vector<SpectrumSample> out;
  out.reserve(times.size());
  EigenSystem3 prev;
  for (std::size_t i = 0; i < times.size(); ++i) {
    EigenSystem3 cur = eig_hermitian_3(proto.hamiltonian_hermitian(times[i]));
    if (i > 0) cur = match_continuity(prev, cur);
    out.push_back(SpectrumSample{times[i], cur.values});
    prev = cur;
  }
  return out;
}

double min_gap_near(const Protocol& proto, double t_lo, double t_hi, std::size_t n) {
  if (n < 2 || !(t_hi > t_lo)) throw Error(ErrorCode::invalid_argument, "min_gap_near: bad scan range");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const EigenSystem3 es = eig_hermitian_3(proto.hamiltonian_hermitian(t));
    best = std::min({best, es.values[1] - es.values[0], es.values[2] - es.values[1]});
  }
  return best;
}

namespace {

using Mat2 = Mat<2>;
using EigenSystem2 = EigenSystem<2>;

Mat2 real_symmetric(double a, double b, double d) {
  Mat2 m;
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = b;
  m(1, 1) = d;
  m.set_hermitian(true);
  return m;
}

// Tracks the eigenvector of a sequence of 2x2 effective Hamiltonians that is
// continuously connected to the first basis state at the first valid time.
class BranchFollower {
 public:
  Vec<2> next(const Mat2& h) {
    EigenSystem2 es = eig_hermitian<2>(h);
    if (!started_) {
      branch_ = std::norm(es.vectors[0][0]) >= std::norm(es.vectors[1][0]) ? 0 : 1;
      started_ = true;
    } else {
      es = match_continuity(prev_, es);
    }
    prev_ = es;
    return es.vectors[branch_];
  }

 private:
  EigenSystem2 prev_;
  std::size_t branch_ = 0;
  bool started_ = false;
};

LeakageEstimate make_series(const std::vector<double>& times) {
  LeakageEstimate est;
  est.times = times;
  est.c0.assign(times.size(), std::numeric_limits<double>::quiet_NaN());
  est.c_other.assign(times.size(), std::numeric_limits<double>::quiet_NaN());
  est.p2.assign(times.size(), std::numeric_limits<double>::quiet_NaN());
  est.valid.assign(times.size(), false);
  return est;
}

}  // namespace

LeakageEstimate ae_bare(const Protocol& proto, const std::vector<double>& times) {
  LeakageEstimate est = make_series(times);
  BranchFollower follower;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double wp = proto.omega_p(t);
    const double ws = proto.omega_s(t);
    const double dp = proto.delta_p(t);
    const double d = proto.delta(t);
    if (std::abs(dp) <= 1e-12 * std::max({1.0, wp, ws})) continue;

    const double q = 1.0 / (4.0 * dp);
    const Vec<2> v = follower.next(real_symmetric(-wp * wp * q, -ws * wp * q, d - ws * ws * q));
    const double c0 = v[0].real();
    const double c1 = v[1].real();
    const double c2 = -(wp * c0 + ws * c1) / (2.0 * dp);
    est.c0[i] = c0;
    est.c_other[i] = c1;
    est.p2[i] = std::min(1.0, c2 * c2);
    est.valid[i] = true;
  }
  return est;
}

LeakageEstimate ae_stokes(const Protocol& proto, const std::vector<double>& times, StokesVariant variant) {
  LeakageEstimate est = make_series(times);
  BranchFollower follower;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const StokesFrame f = stokes_frame(proto, t);
    const double wp = proto.omega_p(t);

    const bool keep_plus = std::abs(f.s_plus) <= std::abs(f.s_minus);
    const double s_keep = keep_plus ? f.s_plus : f.s_minus;
    const double s_elim = keep_plus ? f.s_minus : f.s_plus;
    const double a2_keep = keep_plus ? f.a2_plus : f.a2_minus;
    const double a2_elim = keep_plus ? f.a2_minus : f.a2_plus;
    if (std::abs(s_elim) <= 1e-12 * std::max(1.0, wp)) continue;

    // Signed couplings <s|H|0> = Omega_p a2 / 2.
    const double w_keep = wp * a2_keep;
    const double w_elim = wp * a2_elim;
    const Vec<2> v = follower.next(real_symmetric(-w_elim * w_elim / (4.0 * s_elim), 0.5 * w_keep, s_keep));
    const double c0 = v[0].real();
    const double ck = v[1].real();

    double amp = 0.0;
    if (variant == StokesVariant::self_consistent) {
      amp = -(w_elim / (2.0 * s_elim)) * c0 * a2_elim + ck * a2_keep;
    } else {
      // Magnitude of the kept coupling; the sign is the one the printed
      // formula carries when the eliminated state has a2 < 0.
      const double w_keep_mag = keep_plus ? f.omega_plus : f.omega_minus;
      const double sign = a2_elim < 0.0 ? 1.0 : -1.0;
      amp = sign * (w_keep_mag / (2.0 * s_elim)) * c0 * a2_elim + ck * a2_keep;
    }
    est.c0[i] = c0;
    est.c_other[i] = ck;
    est.p2[i] = std::min(1.0, amp * amp);
    est.valid[i] = true;
  }
  return est;
}

double p2_figure_of_merit(double kappa, double kappa_delta) {
  if (!(kappa_delta > 1.0)) {
    std::ostringstream os;
    os << "p2_figure_of_merit: no crossing for kappa_delta = " << kappa_delta;
    throw Error(ErrorCode::no_crossing, os.str());
  }
  if (!(kappa >= 0.0)) throw Error(ErrorCode::invalid_argument, "p2_figure_of_merit: kappa must be >= 0");
  const double r = std::sqrt(kappa * kappa + 4.0);
  const double num = (kappa - r) * (kappa - r);
  const double den = 4.0 + (kappa + r) * (kappa + r);
  return (kappa_delta - 1.0) / kappa_delta * num / den;
}

}  // namespace cstirap
