#include "omit/time_domain.hpp"

#include "omit/errors.hpp"
#include "omit/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace omit {

State3 eom_rhs(const SystemParams& sp, const DriveConfig& dc, double t, const State3& y) {
  const cplx c = y(0), b1 = y(1), b2 = y(2);
  const double x1 = 2.0 * b1.real();
  const cplx beat = std::exp(-I * dc.xi * t);
  State3 d;
  d(0) = -cplx(sp.kappa / 2.0, dc.delta_c) * c + I * sp.g * x1 * c + dc.eps_l +
         dc.eps_p * beat * std::exp(-I * dc.phi_pl());
  d(1) = -cplx(sp.gamma[0] / 2.0, sp.omega_m[0]) * b1 + I * sp.g * std::norm(c) - I * sp.lambda * b2 +
         dc.eps[0] * beat * std::exp(-I * wrap_phase(dc.phi[0]));
  d(2) = -cplx(sp.gamma[1] / 2.0, sp.omega_m[1]) * b2 - I * sp.lambda * b1 +
         dc.eps[1] * beat * std::exp(-I * wrap_phase(dc.phi[1]));
  return d;
}

namespace {

double fastest_frequency(const SystemParams& sp, const DriveConfig& dc) {
  return std::max({sp.omega_m[0], sp.omega_m[1], std::abs(dc.delta_c), std::abs(dc.xi)});
}

Trajectory run_rk4(const SystemParams& sp, const DriveConfig& dc, double t_end, double dt, const State3& y0,
                   double record_from) {
  Trajectory tr;
  tr.dt = dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const std::size_t first = std::min<std::size_t>(
      n_steps, static_cast<std::size_t>(std::max(0.0, std::ceil(record_from / dt - 1e-9))));
  const std::size_t n_rec = n_steps - first + 1;
  tr.times.reserve(n_rec);
  tr.c.reserve(n_rec);
  tr.b1.reserve(n_rec);
  tr.b2.reserve(n_rec);

  State3 y = y0;
  auto record = [&](std::size_t k) {
    tr.times.push_back(static_cast<double>(k) * dt);
    tr.c.push_back(y(0));
    tr.b1.push_back(y(1));
    tr.b2.push_back(y(2));
  };
  if (first == 0) record(0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const State3 k1 = eom_rhs(sp, dc, t, y);
    const State3 k2 = eom_rhs(sp, dc, t + dt / 2.0, y + (dt / 2.0) * k1);
    const State3 k3 = eom_rhs(sp, dc, t + dt / 2.0, y + (dt / 2.0) * k2);
    const State3 k4 = eom_rhs(sp, dc, t + dt, y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", t + dt);
      throw NumericalError(NumericalError::Kind::nonfinite,
                           std::string("integrate_eom: state diverged at t = ") + buf + " s");
    }
    if (k + 1 >= first) record(k + 1);
  }
  tr.steps = n_steps;
  return tr;
}

}  // namespace

double default_time_step(const SystemParams& sp, const DriveConfig& dc) {
  return constants::two_pi / (200.0 * fastest_frequency(sp, dc));
}

double commensurate_time_step(const SystemParams& sp, const DriveConfig& dc) {
  const double target = default_time_step(sp, dc);
  if (dc.xi == 0.0) return target;
  const double period = constants::two_pi / std::abs(dc.xi);
  const double n = std::ceil(period / target);
  return period / n;
}

double transient_time(const SystemParams& sp) {
  return 10.0 / std::min({sp.gamma[0], sp.gamma[1], sp.kappa});
}

Trajectory integrate_eom(const SystemParams& sp, const DriveConfig& dc, double t_end, double dt,
                         const IntegrateOptions& opt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("integrate_eom: dt and t_end must be positive");
  double limit = std::numeric_limits<double>::infinity();
  for (double w : {sp.omega_m[0], sp.omega_m[1], std::abs(dc.delta_c), std::abs(dc.xi)}) {
    if (w > 0.0) limit = std::min(limit, 0.05 * constants::two_pi / w);
  }
  if (!(dt < limit)) {
    throw ConfigError("integrate_eom: dt = " + std::to_string(dt) + " exceeds stability limit " +
                      std::to_string(limit));
  }
  State3 y0;
  if (opt.initial) {
    y0 = *opt.initial;
  } else {
    const SteadyState ss = solve_steady(sp, dc, opt.branch);
    y0 << ss.c_s, ss.b1_s, ss.b2_s;
  }
  Trajectory tr = run_rk4(sp, dc, t_end, dt, y0, opt.record_from);
  if (opt.step_halving) {
    const Trajectory fine = run_rk4(sp, dc, t_end, dt / 2.0, y0, opt.record_from);
    double err = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const std::size_t j = static_cast<std::size_t>(std::llround((tr.times[k] - fine.times.front()) / fine.dt));
      if (j >= fine.size()) break;
      err = std::max({err, std::abs(tr.c[k] - fine.c[j]), std::abs(tr.b1[k] - fine.b1[j]),
                      std::abs(tr.b2[k] - fine.b2[j])});
    }
    tr.step_error = err * 16.0 / 15.0;
  }
  return tr;
}

namespace {

std::array<std::array<cplx, 5>, 3> project(const Trajectory& tr, double xi, std::size_t i0, std::size_t n) {
  std::array<std::array<cplx, 5>, 3> out{};
  const std::vector<cplx>* fields[3] = {&tr.c, &tr.b1, &tr.b2};
  for (std::size_t k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    const double t = tr.times[i0 + k];
    const cplx e1 = std::exp(I * xi * t);
    const cplx ph[5] = {std::conj(e1 * e1), std::conj(e1), 1.0, e1, e1 * e1};
    for (int f = 0; f < 3; ++f) {
      const cplx v = (*fields[f])[i0 + k] * w;
      for (int m = 0; m < 5; ++m) out[f][m] += v * ph[m];
    }
  }
  for (auto& row : out)
    for (cplx& z : row) z /= static_cast<double>(n);
  return out;
}

}  // namespace

HarmonicDecomposition extract_harmonics(const Trajectory& traj, double xi, const HarmonicWindow& window) {
  if (window.periods < 1) throw ConfigError("extract_harmonics: window shorter than one beat period");
  if (xi == 0.0) throw ConfigError("extract_harmonics: xi must be nonzero");
  if (traj.size() < 2) throw ConfigError("extract_harmonics: trajectory too short");
  const double period = constants::two_pi / std::abs(xi);
  const double span = window.periods * period;
  const double per_period = period / traj.dt;
  const double n_pp = std::round(per_period);
  if (std::abs(per_period - n_pp) > 1e-6) {
    throw ConfigError("extract_harmonics: dt is not commensurate with the beat period");
  }
  const double offset = (window.start - traj.times.front()) / traj.dt;
  if (offset < -1e-6 || std::abs(offset - std::round(offset)) > 1e-6) {
    throw ConfigError("extract_harmonics: window start is not on the recorded grid");
  }
  const auto i0 = static_cast<std::size_t>(std::llround(offset));
  const auto n = static_cast<std::size_t>(n_pp) * static_cast<std::size_t>(window.periods);
  if (i0 + n >= traj.size()) {
    throw ConfigError("extract_harmonics: window of " + std::to_string(span) + " s exceeds the trajectory");
  }

  HarmonicDecomposition hd;
  hd.xi = xi;
  hd.amp = project(traj, xi, i0, n);
  if (window.periods >= 2) {
    const std::size_t half = static_cast<std::size_t>(n_pp) * static_cast<std::size_t>(window.periods / 2);
    const auto a = project(traj, xi, i0, half);
    const auto b = project(traj, xi, i0 + half, half);
    for (int f = 0; f < 3; ++f) {
      double dominant = 0.0, diff = 0.0;
      for (int m = 0; m < 5; ++m) {
        dominant = std::max(dominant, std::abs(hd.amp[f][m]));
        diff = std::max(diff, std::abs(a[f][m] - b[f][m]));
      }
      if (dominant > 0.0) hd.leakage_estimate = std::max(hd.leakage_estimate, diff / dominant);
    }
  }
  return hd;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "t,re_c,im_c,re_b1,im_b1,re_b2,im_b2\n";
  char buf[256];
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[k],
                  traj.c[k].real(), traj.c[k].imag(), traj.b1[k].real(), traj.b1[k].imag(), traj.b2[k].real(),
                  traj.b2[k].imag());
    os << buf;
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace omit
