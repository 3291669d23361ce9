#include "omit/sideband.hpp"

#include "omit/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>

namespace omit {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kRcondTol = 1e-14;

// +-i w + rate/2 - i f
cplx h_value(int sign, double w, double rate, double f) { return cplx(rate / 2.0, sign * w - f); }

double backward_error(const Matrix6c& M, const Vector6c& u, const Vector6c& s) {
  const double num = (M * u - s).lpNorm<Eigen::Infinity>();
  const double den = M.cwiseAbs().rowwise().sum().maxCoeff() * u.lpNorm<Eigen::Infinity>() +
                     s.lpNorm<Eigen::Infinity>();
  return den == 0.0 ? 0.0 : num / den;
}

double rel_diff(cplx a, cplx ref) {
  const double d = std::abs(a - ref);
  const double m = std::abs(ref);
  return m == 0.0 ? d : d / m;
}

Vector6c solve_checked(const Matrix6c& M, const Vector6c& s, const HarmonicCoefficients& hc, int order,
                       double& residual) {
  Eigen::PartialPivLU<Matrix6c> lu(M);
  const double rc = lu.rcond();
  if (!(rc > kRcondTol)) {
    const int base = order == 1 ? 0 : 3;
    int which = base;
    bool plus = true;
    double smallest = std::numeric_limits<double>::infinity();
    for (int k = base; k < base + 3; ++k) {
      if (std::abs(hc.hp[k]) < smallest) smallest = std::abs(hc.hp[k]), which = k, plus = true;
      if (std::abs(hc.hm[k]) < smallest) smallest = std::abs(hc.hm[k]), which = k, plus = false;
    }
    throw NumericalError(NumericalError::Kind::singular,
                         "sideband order " + std::to_string(order) + ": singular system (rcond " +
                             std::to_string(rc) + "), h" + std::to_string(which + 1) + (plus ? "+" : "-") +
                             " = " + std::to_string(smallest) + " vanishes");
  }
  Vector6c u = lu.solve(s);
  if (!u.allFinite()) {
    throw NumericalError(NumericalError::Kind::nonfinite,
                         "sideband order " + std::to_string(order) + ": non-finite amplitudes");
  }
  residual = backward_error(M, u, s);
  if (residual > kResidualTol) {
    throw NumericalError(NumericalError::Kind::inconsistent,
                         "sideband order " + std::to_string(order) + ": residual " + std::to_string(residual));
  }
  return u;
}

}  // namespace

HarmonicCoefficients h_coeffs(const SystemParams& sp, const SteadyState& ss, double xi) {
  HarmonicCoefficients hc;
  hc.G = sp.g * ss.c_s;
  hc.delta = ss.delta_eff;
  hc.xi = xi;
  hc.lambda = sp.lambda;
  const double w[3] = {ss.delta_eff, sp.omega_m[0], sp.omega_m[1]};
  const double r[3] = {sp.kappa, sp.gamma[0], sp.gamma[1]};
  for (int k = 0; k < 3; ++k) {
    hc.hp[k] = h_value(+1, w[k], r[k], xi);
    hc.hm[k] = h_value(-1, w[k], r[k], xi);
    hc.hp[k + 3] = h_value(+1, w[k], r[k], 2.0 * xi);
    hc.hm[k + 3] = h_value(-1, w[k], r[k], 2.0 * xi);
  }
  const double l2 = sp.lambda * sp.lambda;
  hc.U1p = hc.hp[1] * hc.hp[2] + l2;
  hc.U1m = hc.hm[1] * hc.hm[2] + l2;
  hc.U2p = hc.hp[4] * hc.hp[5] + l2;
  hc.U2m = hc.hm[4] * hc.hm[5] + l2;
  hc.Pi = hc.hm[2] * hc.U1p - hc.hp[2] * hc.U1m;
  hc.Gamma = hc.U2p * hc.hm[5] - hc.U2m * hc.hp[5];
  return hc;
}

Matrix6c sideband_matrix(const SystemParams& sp, const SteadyState& ss, double freq) {
  const cplx G = sp.g * ss.c_s;
  const cplx Gc = std::conj(G);
  const double l = sp.lambda;
  Matrix6c M = Matrix6c::Zero();
  M(0, 0) = h_value(+1, ss.delta_eff, sp.kappa, freq);
  M(0, 2) = M(0, 3) = -I * G;
  M(1, 1) = h_value(-1, ss.delta_eff, sp.kappa, freq);
  M(1, 2) = M(1, 3) = I * Gc;
  M(2, 2) = h_value(+1, sp.omega_m[0], sp.gamma[0], freq);
  M(2, 0) = -I * Gc;
  M(2, 1) = -I * G;
  M(2, 4) = I * l;
  M(3, 3) = h_value(-1, sp.omega_m[0], sp.gamma[0], freq);
  M(3, 0) = I * Gc;
  M(3, 1) = I * G;
  M(3, 5) = -I * l;
  M(4, 4) = h_value(+1, sp.omega_m[1], sp.gamma[1], freq);
  M(4, 2) = I * l;
  M(5, 5) = h_value(-1, sp.omega_m[1], sp.gamma[1], freq);
  M(5, 3) = -I * l;
  return M;
}

Vector6c first_order_source(const DriveConfig& dc) {
  Vector6c s = Vector6c::Zero();
  s(0) = dc.eps_p * std::exp(-I * dc.phi_pl());
  s(2) = dc.eps[0] * std::exp(-I * wrap_phase(dc.phi[0]));
  s(4) = dc.eps[1] * std::exp(-I * wrap_phase(dc.phi[1]));
  return s;
}

Vector6c FirstOrderBlock::vector() const {
  Vector6c v;
  v << A1m, A1p, B1m, B1p, D1m, D1p;
  return v;
}

Vector6c SecondOrderBlock::vector() const {
  Vector6c v;
  v << A2m, A2p, B2m, B2p, D2m, D2p;
  return v;
}

FirstOrderBlock solve_first_order(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc) {
  const HarmonicCoefficients hc = h_coeffs(sp, ss, dc.xi);
  FirstOrderBlock out;
  const Vector6c u = solve_checked(sideband_matrix(sp, ss, dc.xi), first_order_source(dc), hc, 1, out.residual);
  out.A1m = u(0), out.A1p = u(1), out.B1m = u(2), out.B1p = u(3), out.D1m = u(4), out.D1p = u(5);

  const cplx G = hc.G;
  const double G2 = std::norm(G);
  const cplx h1p = hc.hp[0], h1m = hc.hm[0], h3p = hc.hp[2];
  const cplx den = h1p * h1m * hc.U1p * hc.U1m + 2.0 * I * hc.delta * G2 * hc.Pi;
  const cplx num = (h1m * hc.U1p * hc.U1m + G2 * hc.Pi) * dc.eps_p +
                   I * G * h1m * h3p * hc.U1m * dc.eps[0] * std::exp(-I * dc.mixing_phase(0)) +
                   G * h1m * hc.U1m * sp.lambda * dc.eps[1] * std::exp(-I * dc.mixing_phase(1));
  out.A1m_closed = num / den * std::exp(-I * dc.phi_pl());
  out.closed_discrepancy = rel_diff(out.A1m_closed, out.A1m);
  return out;
}

Vector6c second_order_source(const SystemParams& sp, const FirstOrderBlock& f) {
  const double g = sp.g;
  const cplx bsum = f.B1m + f.B1p;
  Vector6c s = Vector6c::Zero();
  s(0) = I * g * f.A1m * bsum;
  s(1) = -I * g * f.A1p * bsum;
  s(2) = I * g * f.A1m * f.A1p;
  s(3) = -I * g * f.A1m * f.A1p;
  return s;
}

SecondOrderBlock solve_second_order(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc,
                                    const FirstOrderBlock& first) {
  const HarmonicCoefficients hc = h_coeffs(sp, ss, dc.xi);
  SecondOrderBlock out;
  const Vector6c u =
      solve_checked(sideband_matrix(sp, ss, 2.0 * dc.xi), second_order_source(sp, first), hc, 2, out.residual);
  out.A2m = u(0), out.A2p = u(1), out.B2m = u(2), out.B2p = u(3), out.D2m = u(4), out.D2p = u(5);

  const cplx G = hc.G;
  if (G == cplx(0.0)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.A2m_closed = cplx(nan, nan);
    out.closed_discrepancy = nan;
    return out;
  }
  const double g = sp.g;
  const cplx h1m = hc.hm[0], h4p = hc.hp[3], h4m = hc.hm[3];
  const cplx ratio = h1m / std::conj(G);
  const cplx den = h4p * h4m * hc.U2p * hc.U2m + 2.0 * I * hc.delta * std::norm(G) * hc.Gamma;
  const cplx c_mix = -I * dc.xi * g * G * hc.Gamma - g * h4m * hc.U2p * hc.U2m * ratio;
  const cplx c_sq = g * G * G * hc.Gamma * ratio;
  out.A2m_closed = (c_mix * first.A1m * first.A1p + c_sq * first.A1p * first.A1p) / den;
  out.closed_discrepancy = rel_diff(out.A2m_closed, out.A2m);
  return out;
}

cplx transmission_amplitude(const SystemParams& sp, const DriveConfig& dc, const FirstOrderBlock& first) {
  if (dc.eps_p == 0.0) throw ConfigError("transmission: eps_p is zero, ratio undefined");
  return 1.0 - sp.eta_c * sp.kappa * first.A1m / (dc.eps_p * std::exp(-I * dc.phi_pl()));
}

double transmission(const SystemParams& sp, const DriveConfig& dc, const FirstOrderBlock& first) {
  return std::norm(transmission_amplitude(sp, dc, first));
}

double efficiency_2nd(const SystemParams& sp, const DriveConfig& dc, const SecondOrderBlock& second) {
  if (dc.eps_p == 0.0) throw ConfigError("efficiency_2nd: eps_p is zero, ratio undefined");
  return std::abs(sp.eta_c * sp.kappa * second.A2m / (dc.eps_p * std::exp(-I * dc.phi_pl())));
}

SidebandSolution solve_sidebands(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc) {
  SidebandSolution sol;
  sol.first = solve_first_order(sp, ss, dc);
  sol.second = solve_second_order(sp, ss, dc, sol.first);
  if (dc.eps_p != 0.0) {
    sol.transmission_t = transmission_amplitude(sp, dc, sol.first);
    sol.efficiency_eta = efficiency_2nd(sp, dc, sol.second);
  } else {
    sol.transmission_t = 1.0;
  }
  return sol;
}

TurningPoint turning_point(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc) {
  if (sp.lambda != 0.0) throw ConfigError("turning_point: requires lambda = 0 (single resonator)");
  const HarmonicCoefficients hc = h_coeffs(sp, ss, dc.xi);
  const cplx G = hc.G;
  if (std::abs(G) == 0.0) {
    throw NumericalError(NumericalError::Kind::singular, "turning_point: G = 0, no parametric pathway");
  }
  const double G2 = std::norm(G);
  const double ek = sp.eta_c * sp.kappa;
  const cplx h1p = hc.hp[0], h1m = hc.hm[0], h2p = hc.hp[1], h2m = hc.hm[1];
  // lambda = 0: U1+- = h2+- h3+-, Pi = h3+ h3- (h2+ - h2-); the common h3 factors cancel.
  const cplx den = h1p * h1m * h2p * h2m + 2.0 * I * hc.delta * G2 * (h2p - h2m);
  TurningPoint tp;
  tp.t_offset = 1.0 - ek * (h1m * h2p * h2m + G2 * (h2p - h2m)) / den;
  tp.t_slope = -ek * I * G * h1m * h2m / den * std::exp(-I * dc.mixing_phase(0));
  const double b2 = std::norm(tp.t_slope);
  if (b2 == 0.0) throw NumericalError(NumericalError::Kind::singular, "turning_point: zero slope");
  tp.ratio = -(tp.t_offset * std::conj(tp.t_slope)).real() / b2;
  tp.t2_min = std::norm(tp.t_offset + tp.t_slope * tp.ratio);

  const double w1 = sp.omega_m[0];
  const cplx prod = h1p * h1m * h2p * h2m;
  const cplx alpha = 2.0 * prod + G2 * sp.kappa * sp.gamma[0] - 4.0 * hc.delta * w1 * G2;
  tp.printed = (w1 * sp.kappa + hc.delta * sp.gamma[0] - w1 * ek * alpha) / (2.0 * G * prod * ek);
  return tp;
}

GroupDelay group_delay(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc,
                       std::optional<double> xi0) {
  GroupDelay gd;
  gd.xi = xi0.value_or(ss.delta_eff);
  DriveConfig local = dc;
  auto t_at = [&](double xi) {
    local.xi = xi;
    return transmission_amplitude(sp, local, solve_first_order(sp, ss, local));
  };
  const cplx t0 = t_at(gd.xi);
  if (std::abs(t0) < 1e-12) {
    throw NumericalError(NumericalError::Kind::singular, "group_delay: |t| < 1e-12, phase undefined");
  }
  const double h = 1e-4 * sp.kappa;
  auto central = [&](double step) { return std::arg(t_at(gd.xi + step) / t_at(gd.xi - step)) / (2.0 * step); };
  const double d1 = central(h);
  const double d2 = central(h / 2.0);
  gd.tau = (4.0 * d2 - d1) / 3.0;
  gd.error = std::abs(gd.tau - d2);

  // dM/dxi = -i I  =>  u' = i M^{-1} u.
  local.xi = gd.xi;
  const FirstOrderBlock f = solve_first_order(sp, ss, local);
  const Matrix6c M = sideband_matrix(sp, ss, gd.xi);
  const Vector6c du = I * M.partialPivLu().solve(f.vector());
  const cplx dt = -sp.eta_c * sp.kappa * du(0) / (dc.eps_p * std::exp(-I * dc.phi_pl()));
  gd.tau_analytic = (dt / t0).imag();
  return gd;
}

}  // namespace omit
