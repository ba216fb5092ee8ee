#include "cstirap/propagate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace cstirap {

std::vector<double> sample_times(const TimeWindow& w, const OutputGrid& grid) {
  if (grid.samples < 2) throw Error(ErrorCode::invalid_argument, "output grid needs at least 2 samples");
  std::vector<double> t(grid.samples);
  const double span = w.t_final - w.t_initial;
  const double n = static_cast<double>(grid.samples - 1);
  for (std::size_t i = 0; i < grid.samples; ++i) t[i] = w.t_initial + span * (static_cast<double>(i) / n);
  t.back() = w.t_final;
  return t;
}

namespace {

// Dormand-Prince 5(4) tableau with Shampine's quartic dense output.
constexpr std::array<double, 6> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0};
constexpr double kA[6][5] = {
    {0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
};
constexpr std::array<double, 6> kB = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
constexpr std::array<double, 7> kE = {-71.0 / 57600, 0.0,          71.0 / 16695, -71.0 / 1920,
                                      17253.0 / 339200, -22.0 / 525, 1.0 / 40};
constexpr double kP[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0, 0, 0, 0},
    {0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};

// Right-hand side in the interaction picture of the Hermitian diagonal:
// psi_k = exp(-i phi_k(t)) c_k with phi_k the integrated diagonal energy.
// Decoupled components then stay constant, so the fast detuning phases do
// not feed the integrator's amplitude error.
class SchrodingerRhs {
 public:
  explicit SchrodingerRhs(const Protocol& proto)
      : proto_(proto), scale_(proto.params().omega0_T), gamma2_(proto.params().gamma2) {}

  // exp(-i phi_k(t)) for k = 1, 2; phi_0 = 0.
  std::array<cplx, 2> phases(double t) const {
    const double ip = proto_.delta_p_integral(t);
    const double is = proto_.delta_s_integral(t);
    return {std::polar(1.0, -scale_ * (ip - is)), std::polar(1.0, -scale_ * ip)};
  }

  ComplexVec3 to_lab(double t, const ComplexVec3& c) const {
    const auto ph = phases(t);
    ComplexVec3 psi = c;
    psi[1] *= ph[0];
    psi[2] *= ph[1];
    return psi;
  }

  ComplexVec3 operator()(double t, const ComplexVec3& c) {
    ++evaluations;
    const auto ph = phases(t);
    // Couplings rotated into the interaction picture: V_jk exp(i(phi_j - phi_k)).
    const cplx v02 = 0.5 * proto_.omega_p(t) * ph[1];
    const cplx v12 = 0.5 * proto_.omega_s(t) * ph[1] * std::conj(ph[0]);
    ComplexVec3 out;
    out[0] = v02 * c[2];
    out[1] = v12 * c[2];
    out[2] = std::conj(v02) * c[0] + std::conj(v12) * c[1];
    out *= cplx(0.0, -scale_);
    out[2] -= gamma2_ * c[2];
    return out;
  }

  std::size_t evaluations = 0;

 private:
  const Protocol& proto_;
  double scale_;
  double gamma2_;
};

double error_norm(const ComplexVec3& err, const ComplexVec3& y0, const ComplexVec3& y1, const Tolerances& tol) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double sc = tol.atol + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    s += r * r;
  }
  return std::sqrt(s / 3.0);
}

double initial_step(SchrodingerRhs& f, double t0, const ComplexVec3& y0, const ComplexVec3& f0,
                    const Tolerances& tol, double span) {
  auto scaled = [&](const ComplexVec3& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double r = std::abs(v[i]) / (tol.atol + tol.rtol * std::abs(y0[i]));
      s += r * r;
    }
    return std::sqrt(s / 3.0);
  };
  const double d0 = scaled(y0);
  const double d1 = scaled(f0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const ComplexVec3 y1 = y0 + f0 * cplx(h0);
  const ComplexVec3 f1 = f(t0 + h0, y1);
  const double d2 = scaled(f1 - f0) / h0;
  const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

Trajectory evolve_schrodinger(const ProtocolParams& p, const Tolerances& tol, const OutputGrid& grid) {
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0))
    throw Error(ErrorCode::invalid_argument, "integrator tolerances must be positive");
  const Protocol proto(p);
  const TimeWindow w = proto.window();
  const std::vector<double> out_t = sample_times(w, grid);

  Trajectory traj;
  traj.params = p;
  traj.pulse_center = proto.pulse_center();
  traj.times = out_t;
  traj.states.reserve(out_t.size());

  SchrodingerRhs f(proto);
  double t = w.t_initial;
  ComplexVec3 y = ComplexVec3::basis(0);
  ComplexVec3 fy = f(t, y);
  const double span = w.t_final - w.t_initial;
  double h = initial_step(f, t, y, fy, tol, span);

  std::size_t next_out = 0;
  traj.states.push_back(f.to_lab(t, y));
  next_out = 1;

  std::array<ComplexVec3, 7> k{};
  constexpr double kSafety = 0.9;
  constexpr double kMinFactor = 0.2;
  constexpr double kMaxFactor = 10.0;

  const bool conservative = p.gamma2 == 0.0;
  bool last_rejected = false;
  while (t < w.t_final) {
    if (traj.stats.steps + traj.stats.rejected >= tol.max_steps) {
      std::ostringstream os;
      os << "tolerance unreachable: step budget " << tol.max_steps << " exhausted at t = " << t;
      throw Error(ErrorCode::integration, os.str());
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) {
      std::ostringstream os;
      os << "step-size underflow at t = " << t << " (h = " << h << ")";
      throw Error(ErrorCode::integration, os.str());
    }
    h = std::min(h, w.t_final - t);

    k[0] = fy;
    for (std::size_t s = 1; s < 6; ++s) {
      ComplexVec3 ys = y;
      for (std::size_t j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) ys += k[j] * cplx(h * kA[s][j]);
      k[s] = f(t + kC[s] * h, ys);
    }
    ComplexVec3 y_new = y;
    for (std::size_t j = 0; j < 6; ++j)
      if (kB[j] != 0.0) y_new += k[j] * cplx(h * kB[j]);
    const double t_new = (h == w.t_final - t) ? w.t_final : t + h;
    k[6] = f(t_new, y_new);

    ComplexVec3 err;
    for (std::size_t j = 0; j < 7; ++j)
      if (kE[j] != 0.0) err += k[j] * cplx(h * kE[j]);
    const double en = error_norm(err, y, y_new, tol);

    if (en <= 1.0) {
      if (conservative) {
        // Project back onto the unit sphere; the RHS is linear, so the
        // derivative at t_new scales with the state.
        const double n = y_new.norm();
        y_new *= cplx(1.0 / n);
        k[6] *= cplx(1.0 / n);
      }
      // Dense output for samples inside (t, t_new].
      while (next_out < out_t.size() && out_t[next_out] <= t_new) {
        const double x = (out_t[next_out] - t) / h;
        std::array<ComplexVec3, 4> q{};
        for (std::size_t m = 0; m < 4; ++m)
          for (std::size_t j = 0; j < 7; ++j)
            if (kP[j][m] != 0.0) q[m] += k[j] * cplx(kP[j][m]);
        ComplexVec3 yo = y;
        double xp = x;
        for (std::size_t m = 0; m < 4; ++m) {
          yo += q[m] * cplx(h * xp);
          xp *= x;
        }
        if (next_out + 1 == out_t.size()) yo = y_new;
        traj.states.push_back(f.to_lab(out_t[next_out], yo));
        ++next_out;
      }
      t = t_new;
      y = y_new;
      fy = k[6];
      ++traj.stats.steps;
      double factor = en == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(en, -0.2));
      if (last_rejected) factor = std::min(1.0, factor);
      h *= factor;
      last_rejected = false;
    } else {
      ++traj.stats.rejected;
      last_rejected = true;
      h *= std::max(kMinFactor, kSafety * std::pow(en, -0.2));
    }
  }
  while (traj.states.size() < out_t.size()) traj.states.push_back(f.to_lab(t, y));

  traj.stats.rhs_evaluations = f.evaluations;
  const std::size_t n = traj.states.size();
  traj.p0.resize(n);
  traj.p1.resize(n);
  traj.p2.resize(n);
  traj.norm.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexVec3& s = traj.states[i];
    traj.p0[i] = s.population(0);
    traj.p1[i] = s.population(1);
    traj.p2[i] = s.population(2);
    traj.norm[i] = s.norm();
  }
  return traj;
}

Trajectory evolve_adiabatic(const ProtocolParams& p, const OutputGrid& grid) {
  if (p.gamma2 != 0.0)
    throw Error(ErrorCode::invalid_argument, "evolve_adiabatic requires gamma2 == 0");
  const Protocol proto(p);
  const std::vector<double> ts = sample_times(proto.window(), grid);

  Trajectory traj;
  traj.params = p;
  traj.pulse_center = proto.pulse_center();
  traj.times = ts;

  EigenSystem3 prev = eig_hermitian_3(proto.hamiltonian_hermitian(ts.front()));
  // Branch with the largest weight on |0> at the start.
  std::size_t branch = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (prev.vectors[i].population(0) > prev.vectors[branch].population(0)) branch = i;

  // Smallest gap between the sorted eigenvalues j and j+1 on [a, b].
  const auto min_gap = [&](double a, double b, std::size_t j) {
    auto gap = [&](double t) {
      const EigenSystem3 es = eig_hermitian_3(proto.hamiltonian_hermitian(t));
      return es.values[j + 1] - es.values[j];
    };
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double g1 = gap(x1);
    double g2 = gap(x2);
    for (int it = 0; it < 120 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      if (g1 < g2) {
        b = x2;
        x2 = x1;
        g2 = g1;
        x1 = b - kInvPhi * (b - a);
        g1 = gap(x1);
      } else {
        a = x1;
        x1 = x2;
        g1 = g2;
        x2 = a + kInvPhi * (b - a);
        g2 = gap(x2);
      }
    }
    return g1 < g2 ? std::pair{x1, g1} : std::pair{x2, g2};
  };

  traj.states.push_back(prev.vectors[branch]);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const EigenSystem3 cur = match_continuity(prev, eig_hermitian_3(proto.hamiltonian_hermitian(ts[i])));
    // The followed label passed another one: either a narrow avoided crossing
    // stepped over diabatically or an exact degeneracy.
    for (std::size_t j = 0; j < 3; ++j) {
      if (j == branch) continue;
      const double before = prev.values[branch] - prev.values[j];
      const double after = cur.values[branch] - cur.values[j];
      if ((before < 0.0) == (after < 0.0) && before != 0.0 && after != 0.0) continue;
      const std::size_t lower =
          static_cast<std::size_t>(std::count_if(cur.values.begin(), cur.values.end(), [&](double v) {
            return v < std::min(cur.values[branch], cur.values[j]);
          }));
      const auto [t_star, g] = min_gap(ts[i - 1], ts[i], std::min<std::size_t>(lower, 1));
      const double scale = std::max({1.0, std::abs(cur.values[0]), std::abs(cur.values[2])});
      if (g <= 1e-9 * scale) {
        std::ostringstream os;
        os.precision(10);
        os << "followed adiabatic branch meets an exact degeneracy at t = " << t_star << " T";
        throw Error(ErrorCode::degenerate, os.str());
      }
    }
    traj.states.push_back(cur.vectors[branch]);
    prev = cur;
  }

  const std::size_t n = traj.states.size();
  traj.p0.resize(n);
  traj.p1.resize(n);
  traj.p2.resize(n);
  traj.norm.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    traj.p0[i] = traj.states[i].population(0);
    traj.p1[i] = traj.states[i].population(1);
    traj.p2[i] = traj.states[i].population(2);
    traj.norm[i] = traj.states[i].norm();
  }
  return traj;
}

Efficiency efficiency(const Trajectory& traj) {
  if (traj.size() == 0) throw Error(ErrorCode::invalid_argument, "efficiency of an empty trajectory");
  Efficiency e;
  e.p1_final = traj.p1.back();
  e.max_p2 = *std::max_element(traj.p2.begin(), traj.p2.end());
  e.final_norm = traj.norm.back();
  return e;
}

}  // namespace cstirap
