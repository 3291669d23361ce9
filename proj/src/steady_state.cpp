#include "omit/steady_state.hpp"

#include "omit/cubic.hpp"
#include "omit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omit {

std::string_view to_string(BranchLabel b) {
  switch (b) {
    case BranchLabel::unique: return "unique";
    case BranchLabel::lower: return "lower";
    case BranchLabel::middle: return "middle";
    case BranchLabel::upper: return "upper";
  }
  return "unknown";
}

double CubicCoefficients::scale_at(double x) const {
  const double ax = std::abs(x);
  return std::max({std::abs(a3) * ax * ax * ax, std::abs(a2) * ax * ax, std::abs(a1) * ax, std::abs(a0)});
}

double shift_weight(const SystemParams& sp) {
  const double w1 = sp.omega_m[0], w2 = sp.omega_m[1];
  const double g1 = sp.gamma[0], g2 = sp.gamma[1];
  const double l2 = sp.lambda * sp.lambda;
  const double d1sq = w1 * w1 + g1 * g1 / 4.0;
  const double d2sq = w2 * w2 + g2 * g2 / 4.0;
  // 2 Re[i d2 / (d1 d2 + lambda^2)] with d_i = i w_i + g_i / 2.
  const double num = 2.0 * w1 * d2sq - 2.0 * l2 * w2;
  const double den = d1sq * d2sq - 2.0 * l2 * (w1 * w2 - g1 * g2 / 4.0) + l2 * l2;
  return num / den;
}

CubicCoefficients cubic_coeffs(const SystemParams& sp, const DriveConfig& dc) {
  CubicCoefficients cc;
  cc.W = shift_weight(sp);
  const double g2 = sp.g * sp.g;
  cc.a3 = cc.W * cc.W * g2 * g2;
  cc.a2 = -2.0 * dc.delta_c * cc.W * g2;
  cc.a1 = sp.kappa * sp.kappa / 4.0 + dc.delta_c * dc.delta_c;
  cc.a0 = -dc.eps_l * dc.eps_l;
  return cc;
}

PhotonBranches photon_number_branches(const CubicCoefficients& cc) {
  if (cc.a3 < 0.0) throw ConfigError("photon_number_branches: a3 must be non-negative");
  RealRoots<double> rr;
  if (cc.a0 == 0.0) {
    // Undriven cavity: x = 0 is exact, the rest come from the quadratic factor.
    rr = real_cubic_roots(0.0, cc.a3, cc.a2, cc.a1);
    rr.roots.push_back(0.0);
    std::sort(rr.roots.begin(), rr.roots.end());
  } else {
    rr = real_cubic_roots(cc.a3, cc.a2, cc.a1, cc.a0);
  }
  PhotonBranches out;
  out.fold = rr.fold;
  for (double x : rr.roots) {
    const double scale = cc.scale_at(x);
    if (x < 0.0) {
      if (std::abs(x) * std::abs(cc.a1) > 1e-12 * std::max(scale, std::abs(cc.a0))) continue;
      x = 0.0;
    }
    const double res = std::abs(cc(x));
    if (res > 1e-9 * std::max(cc.scale_at(x), 1e-300)) {
      throw NumericalError(NumericalError::Kind::inconsistent,
                           "photon_number_branches: root " + std::to_string(x) + " fails residual check");
    }
    out.x.push_back(x);
  }
  if (out.x.empty()) {
    throw NumericalError(NumericalError::Kind::inconsistent, "photon_number_branches: no non-negative root");
  }
  return out;
}

SteadyState steady_state_at(const SystemParams& sp, const DriveConfig& dc, double x) {
  SteadyState ss;
  const double W = shift_weight(sp);
  const double delta_w = dc.delta_c - W * sp.g * sp.g * x;
  ss.c_s = dc.eps_l / cplx(sp.kappa / 2.0, delta_w);
  const double n = std::norm(ss.c_s);
  const cplx d1(sp.gamma[0] / 2.0, sp.omega_m[0]);
  const cplx d2(sp.gamma[1] / 2.0, sp.omega_m[1]);
  const double l2 = sp.lambda * sp.lambda;
  // d1 b1 = i g n - i lambda b2,  d2 b2 = -i lambda b1
  ss.b1_s = I * sp.g * n * d2 / (d1 * d2 + l2);
  ss.b2_s = -I * sp.lambda * ss.b1_s / d2;
  ss.delta_eff = dc.delta_c - sp.g * 2.0 * ss.b1_s.real();
  ss.photon_number = n;
  return ss;
}

SteadyState solve_steady(const SystemParams& sp, const DriveConfig& dc, BranchPolicy policy) {
  const PhotonBranches br = photon_number_branches(cubic_coeffs(sp, dc));
  const auto& xs = br.x;
  std::size_t pick = 0;
  switch (policy) {
    case BranchPolicy::adiabatic_lower: pick = 0; break;
    case BranchPolicy::middle:
      if (xs.size() != 3) {
        throw NumericalError(NumericalError::Kind::branch_unavailable,
                             "solve_steady: middle branch requested but " + std::to_string(xs.size()) +
                                 " root(s) exist");
      }
      pick = 1;
      break;
    case BranchPolicy::upper: pick = xs.size() - 1; break;
  }
  SteadyState ss = steady_state_at(sp, dc, xs[pick]);
  ss.fold = br.fold;
  if (xs.size() == 1) {
    ss.branch = BranchLabel::unique;
  } else if (pick == 0) {
    ss.branch = BranchLabel::lower;
  } else if (pick + 1 == xs.size()) {
    ss.branch = BranchLabel::upper;
  } else {
    ss.branch = BranchLabel::middle;
  }
  return ss;
}

double steady_residual(const SystemParams& sp, const DriveConfig& dc, const SteadyState& ss) {
  const cplx c = ss.c_s, b1 = ss.b1_s, b2 = ss.b2_s;
  const double x1 = 2.0 * b1.real();
  const cplx t_c[] = {-cplx(sp.kappa / 2.0, dc.delta_c) * c, I * sp.g * x1 * c, cplx(dc.eps_l)};
  const cplx t_b1[] = {-cplx(sp.gamma[0] / 2.0, sp.omega_m[0]) * b1, I * sp.g * std::norm(c),
                       -I * sp.lambda * b2};
  const cplx t_b2[] = {-cplx(sp.gamma[1] / 2.0, sp.omega_m[1]) * b2, -I * sp.lambda * b1};
  auto rel = [](auto const& terms) {
    cplx sum = 0.0;
    double mag = 0.0;
    for (const cplx& t : terms) {
      sum += t;
      mag += std::abs(t);
    }
    return mag == 0.0 ? 0.0 : std::abs(sum) / mag;
  };
  return std::max({rel(t_c), rel(t_b1), rel(t_b2)});
}

DriveConfig resolve_drive(const SystemParams& sp, const DriveSettings& ds) {
  DriveConfig dc;
  dc.pump_power = ds.pump_power;
  dc.phi_l = ds.phi_l;
  dc.phi_p = ds.phi_p;
  dc.phi = ds.phi;
  dc.xi = sp.omega_m[0] * (1.0 + ds.delta_p_ratio);

  if (ds.detuning_mode == DetuningMode::fixed_delta_c) {
    dc.delta_c = ds.delta_c;
    dc.omega_l = sp.omega_c - dc.delta_c;
    dc.eps_l = pump_amplitude(sp, ds.pump_power, dc.omega_l, ds.convention);
  } else {
    // Lock Delta_eff = omega_m1. eps_l depends weakly on omega_l = omega_c - Delta_c;
    // a fixed number of passes keeps the result deterministic.
    const double target = sp.omega_m[0];
    const double wg2 = shift_weight(sp) * sp.g * sp.g;
    dc.delta_c = target;
    for (int pass = 0; pass < 3; ++pass) {
      dc.omega_l = sp.omega_c - dc.delta_c;
      dc.eps_l = pump_amplitude(sp, ds.pump_power, dc.omega_l, ds.convention);
      const double x = dc.eps_l * dc.eps_l / (target * target + sp.kappa * sp.kappa / 4.0);
      dc.delta_c = target + wg2 * x;
    }
    dc.omega_l = sp.omega_c - dc.delta_c;
  }
  dc.eps_p = ds.eps_p_ratio * dc.eps_l;
  dc.eps = {ds.eps_ratio[0] * dc.eps_p, ds.eps_ratio[1] * dc.eps_p};
  return dc;
}

std::vector<BistabilityRow> bistability_sweep(const SystemParams& sp, const DriveSettings& ds,
                                              double p_min, double p_max, int n) {
  if (n < 2) throw ConfigError("bistability_sweep: need at least 2 points");
  DriveSettings local = ds;
  if (local.detuning_mode == DetuningMode::red_sideband) {
    local.detuning_mode = DetuningMode::fixed_delta_c;
    local.delta_c = sp.omega_m[0];
  }
  std::vector<BistabilityRow> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    local.pump_power = p_min + (p_max - p_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    const DriveConfig dc = resolve_drive(sp, local);
    const PhotonBranches br = photon_number_branches(cubic_coeffs(sp, dc));
    rows.push_back({local.pump_power, br.x, br.fold});
  }
  return rows;
}

}  // namespace omit
