// Acceptance run: one PASS/FAIL line per criterion, plus indented detail lines.
// Exit status is the number of failed criteria (0 when all pass).
//
//   acceptance [--golden-dir DIR] [--write-golden]

#include "omit/config.hpp"
#include "omit/errors.hpp"
#include "omit/scan.hpp"
#include "omit/sideband.hpp"
#include "omit/stability.hpp"
#include "omit/steady_state.hpp"
#include "omit/time_domain.hpp"

#include "../oracle/oracles.hpp"

#include <boost/math/tools/minima.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace omit;

namespace {

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string golden_dir = OMIT_GOLDEN_DIR;
bool write_golden = false;

// --- 1 -------------------------------------------------------------------------------------------

Outcome closed_form_equivalence() {
  std::mt19937_64 rng(20240611);
  const int draws = 10000;
  double worst = 0.0;
  int skipped = 0;
  for (int k = 0; k < draws;) {
    const auto p = oracle::random_point(rng);
    try {
      const FirstOrderBlock f = solve_first_order(p.sp, p.ss, p.dc);
      worst = std::max(worst, f.closed_discrepancy);
      ++k;
    } catch (const NumericalError&) {
      ++skipped;
    }
  }
  Outcome o;
  o.pass = worst < 1e-10;
  o.details.push_back(fmt("%d random draws (%d singular skipped), max relative |closed - direct| = %.3e (tol 1e-10)",
                          draws, skipped, worst));
  return o;
}

// --- 2 -------------------------------------------------------------------------------------------

Outcome time_domain_oracle() {
  const auto ref = oracle::reference({{"eps_p_ratio", "0.01"}});
  const SidebandSolution sol = solve_sidebands(ref.sp, ref.ss, ref.dc);

  const double dt = commensurate_time_step(ref.sp, ref.dc);
  const double period = constants::two_pi / ref.dc.xi;
  const int periods = 20;
  auto run = [&](double transient_min) {
    const double steps_per_period = std::round(period / dt);
    const double t0 = std::ceil(transient_min / period) * steps_per_period * dt;
    const double t_end = t0 + (periods + 1) * steps_per_period * dt;
    IntegrateOptions opt;
    opt.record_from = t0;
    const Trajectory tr = integrate_eom(ref.sp, ref.dc, t_end, dt, opt);
    return extract_harmonics(tr, ref.dc.xi, {tr.times.front(), periods});
  };
  const auto t_start = std::chrono::steady_clock::now();
  const double transient = transient_time(ref.sp);
  const HarmonicDecomposition hd = run(transient);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  const HarmonicDecomposition hd2 = run(2.0 * transient);

  const cplx a1_td = hd.amplitude(0, 1), a2_td = hd.amplitude(0, 2);
  const double e1 = std::abs(a1_td - sol.first.A1m) / std::abs(sol.first.A1m);
  const double e2 = std::abs(a2_td - sol.second.A2m) / std::abs(sol.second.A2m);
  const double drift = std::max(std::abs(hd2.amplitude(0, 1) - a1_td) / std::abs(a1_td),
                                std::abs(hd2.amplitude(0, 2) - a2_td) / std::abs(a2_td));
  Outcome o;
  o.pass = e1 < 0.01 && e2 < 0.05;
  o.details.push_back(fmt("A1- rel err %.3e (tol 1e-2), A2- rel err %.3e (tol 5e-2), eps_p = 0.01 eps_l", e1, e2));
  o.details.push_back(fmt("dt = %.4e s, transient %.3e s, %d periods, leakage %.2e, run %.2f s", dt, transient,
                          periods, hd.leakage_estimate, seconds));
  o.details.push_back(fmt("doubling the transient changes the amplitudes by %.2e (target < 1e-3)", drift));
  return o;
}

// --- 3 -------------------------------------------------------------------------------------------

double t2_at_ratio(const oracle::Reference& ref, double r) {
  DriveConfig dc = ref.dc;
  dc.eps[0] = r * dc.eps_p;
  return transmission(ref.sp, dc, solve_first_order(ref.sp, ref.ss, dc));
}

Outcome turning_point_check() {
  const auto ref = oracle::reference({{"lambda_hz", "0"}});
  const TurningPoint tp = turning_point(ref.sp, ref.ss, ref.dc);
  const double t2 = t2_at_ratio(ref, tp.ratio);
  const auto [r_num, f_num] = boost::math::tools::brent_find_minima(
      [&](double r) { return t2_at_ratio(ref, r); }, 0.0, 2.0, std::numeric_limits<double>::digits);
  const double rel = std::abs(tp.ratio - r_num) / std::abs(r_num);

  const bool a = std::abs(tp.ratio - 0.45) <= 0.05;
  const bool b = t2 < 1e-4;
  const bool c = rel < 1e-6;
  Outcome o;
  o.pass = a && b && c;
  o.details.push_back(fmt("[%s] (eps1/eps_p)_TP = %.6f, target 0.45 +- 0.05", a ? "pass" : "FAIL", tp.ratio));
  o.details.push_back(fmt("[%s] |t|^2 at TP, Phi1 = 0, Delta_p = 0: %.4e (tol 1e-4)", b ? "pass" : "FAIL", t2));
  o.details.push_back(fmt("[%s] Brent minimum of |t|^2 at %.9f (|t|^2 = %.4e), rel diff %.2e (tol 1e-6)",
                          c ? "pass" : "FAIL", r_num, f_num, rel));
  o.details.push_back(fmt("published closed expression evaluates to %.4g %+.4gi (not a real ratio)",
                          tp.printed.real(), tp.printed.imag()));
  const double G_phase = std::arg(ref.sp.g * ref.ss.c_s);
  o.details.push_back(fmt("arg G = %.2f deg; |t|^2 cannot vanish unless t_offset and t_slope are collinear", G_phase * 180.0 / std::acos(-1.0)));
  const auto ref_eta1 = oracle::reference({{"lambda_hz", "0"}, {"eta_c", "1"}});
  const TurningPoint tp1 = turning_point(ref_eta1.sp, ref_eta1.ss, ref_eta1.dc);
  o.details.push_back(fmt("eta_c = 1: TP = %.4f, |t|^2 min = %.3e", tp1.ratio, tp1.t2_min));
  const auto ref_ek = oracle::reference({{"lambda_hz", "0"}, {"pump-convention", "eta-kappa"}});
  const TurningPoint tpk = turning_point(ref_ek.sp, ref_ek.ss, ref_ek.dc);
  o.details.push_back(fmt("eta-kappa pump convention: TP = %.4f, |t|^2 min = %.3e", tpk.ratio, tpk.t2_min));
  return o;
}

// --- 4 -------------------------------------------------------------------------------------------

Outcome efficiency_check() {
  const auto mr2 = oracle::reference({{"eps2_ratio", "0.7"}});
  const auto mr1 = oracle::reference({{"eps1_ratio", "0.7"}});
  const double eta2 = solve_sidebands(mr2.sp, mr2.ss, mr2.dc).efficiency_eta;
  const double eta1 = solve_sidebands(mr1.sp, mr1.ss, mr1.dc).efficiency_eta;
  const bool a = std::abs(100.0 * eta2 - 25.0) <= 5.0;
  const bool b = 100.0 * eta1 < 1.0;
  Outcome o;
  o.pass = a && b;
  o.details.push_back(fmt("[%s] drive MR2, eps2/eps_p = 0.7: eta = %.3f%% (target 25 +- 5)", a ? "pass" : "FAIL",
                          100.0 * eta2));
  o.details.push_back(fmt("[%s] drive MR1, eps1/eps_p = 0.7: eta = %.3f%% (target < 1)", b ? "pass" : "FAIL",
                          100.0 * eta1));
  o.details.push_back("convention: eps_l = sqrt(2 kappa P / (hbar omega_l)), eps_p = 0.05 eps_l, eta_c = 0.5, "
                      "lambda = 2pi x 0.1 MHz");
  const auto ek = oracle::reference({{"eps2_ratio", "0.7"}, {"pump-convention", "eta-kappa"}});
  o.details.push_back(fmt("eta-kappa convention: eta(MR2) = %.3f%%",
                          100.0 * solve_sidebands(ek.sp, ek.ss, ek.dc).efficiency_eta));
  const auto ang = oracle::reference({{"eps2_ratio", "0.7"}, {"lambda-is-angular", "true"}});
  o.details.push_back(fmt("lambda read as 0.1e6 rad/s: eta(MR2) = %.3f%%",
                          100.0 * solve_sidebands(ang.sp, ang.ss, ang.dc).efficiency_eta));
  return o;
}

// --- 5 -------------------------------------------------------------------------------------------

double tau_at(std::initializer_list<std::pair<const char*, const char*>> overrides, double p_mw) {
  std::vector<std::pair<const char*, const char*>> all(overrides);
  const std::string p = fmt("%.17g", p_mw);
  all.emplace_back("pump_power_mw", p.c_str());
  oracle::Reference ref;
  ref.cfg = Config::paper_defaults();
  for (const auto& [k, v] : all) ref.cfg.set(k, v);
  ref.sp = derive_params(ref.cfg.raw_inputs()).params;
  ref.ds = ref.cfg.drive_settings();
  ref.dc = resolve_drive(ref.sp, ref.ds);
  ref.ss = solve_steady(ref.sp, ref.dc, ref.ds.branch);
  return group_delay(ref.sp, ref.ss, ref.dc).tau;
}

Outcome group_delay_check() {
  Outcome o;
  // MR2 drive at the amplitude and amplifying phase used for the phase-sensitive spectra.
  const std::initializer_list<std::pair<const char*, const char*>> mr2 = {{"eps2_ratio", "0.45"},
                                                                          {"mixing_phase2_rad", "3.141592653589793"}};
  double tmin = 1e300, tmax = -1e300, p_neg = 0, p_pos = 0;
  for (int k = 0; k < 69; ++k) {
    const double p = 0.1 + 0.1 * k;
    const double tau = tau_at(mr2, p);
    if (tau < tmin) tmin = tau, p_neg = p;
    if (tau > tmax) tmax = tau, p_pos = p;
  }
  const bool a = tmin < 0.0 && tmax > 0.0;
  const double two = tau_at({}, 3.5), single = tau_at({{"lambda_hz", "0"}}, 3.5);
  const double ratio = std::abs(two) / std::abs(single);
  const bool b = ratio >= 2.5 && ratio <= 10.0;
  o.pass = a && b;
  o.details.push_back(fmt("[%s] MR2 drive (eps2/eps_p = 0.45, Phi2 = pi), P_L in [0.1, 6.9] mW: tau_g from %.3f us "
                          "(%.1f mW) to %.3f us (%.1f mW)",
                          a ? "pass" : "FAIL", tmin * 1e6, p_neg, tmax * 1e6, p_pos));
  o.details.push_back(fmt("[%s] P_L = 3.5 mW, no drive: two-mirror %.4f us, single-mirror %.4f us, ratio %.3f "
                          "(target [2.5, 10])",
                          b ? "pass" : "FAIL", two * 1e6, single * 1e6, ratio));
  const double driven = tau_at(mr2, 3.5);
  o.details.push_back(fmt("MR2-driven two-mirror at 3.5 mW: %.4f us, ratio to single-mirror %.3f", driven * 1e6,
                          std::abs(driven) / std::abs(single)));
  return o;
}

// --- 6 -------------------------------------------------------------------------------------------

Outcome bistability_check() {
  auto ref = oracle::reference();
  DriveSettings ds = ref.ds;
  ds.detuning_mode = DetuningMode::fixed_delta_c;
  ds.delta_c = ref.sp.omega_m[0];
  const auto rows = bistability_sweep(ref.sp, ds, 0.05e-3, 30e-3, 600);

  bool single_below = true, s_curve_above = false, middle_unstable = true;
  double first_triple = -1.0;
  int triples = 0, stable_count_max_below = 0;
  for (const auto& row : rows) {
    DriveSettings local = ds;
    local.pump_power = row.pump_power;
    const DriveConfig dc = resolve_drive(ref.sp, local);
    int n_stable = 0;
    for (double x : row.x) n_stable += eigen_max_real(fluctuation_matrix(ref.sp, steady_state_at(ref.sp, dc, x))) < 0.0;
    if (row.pump_power < 7e-3) {
      if (row.x.size() != 1) single_below = false;
      stable_count_max_below = std::max(stable_count_max_below, n_stable);
    }
    if (row.x.size() == 3) {
      if (first_triple < 0) first_triple = row.pump_power;
      if (row.pump_power >= 7e-3) s_curve_above = true;
      ++triples;
      const StabilityReport mid = analyze_stability(ref.sp, steady_state_at(ref.sp, dc, row.x[1]));
      if (mid.stable || mid.rh_stable) middle_unstable = false;
    }
  }
  // Root count with the pump locked to the red sideband at every power.
  int locked_multi = 0;
  for (int k = 1; k <= 70; ++k) {
    DriveSettings local = ref.ds;
    local.pump_power = 0.1e-3 * k;
    const DriveConfig dc = resolve_drive(ref.sp, local);
    locked_multi += photon_number_branches(cubic_coeffs(ref.sp, dc)).x.size() > 1;
  }

  Outcome o;
  o.pass = single_below && s_curve_above && middle_unstable;
  o.details.push_back(fmt("[%s] exactly one non-negative root for all P_L < 7 mW (Delta_c = omega_m): first "
                          "three-root point at %.2f mW",
                          single_below ? "pass" : "FAIL", first_triple * 1e3));
  o.details.push_back(fmt("[%s] three-root S-curve present above 7 mW (%d of %zu grid points have three roots)",
                          s_curve_above ? "pass" : "FAIL", triples, rows.size()));
  o.details.push_back(fmt("[%s] middle branch unstable by Hurwitz minors and by eigenvalues at every three-root point",
                          middle_unstable ? "pass" : "FAIL"));
  o.details.push_back(fmt("stable steady states below 7 mW: at most %d per power", stable_count_max_below));
  o.details.push_back(fmt("red-sideband locked pump, P_L in [0.1, 7] mW: %d of 70 points have more than one root",
                          locked_multi));
  return o;
}

// --- 7 -------------------------------------------------------------------------------------------

Outcome method_agreement() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0, agree = 0, stable = 0, marginal = 0, tries = 0;
  while (accepted < 1000) {
    ++tries;
    auto p = oracle::random_point(rng);
    DriveConfig dc;
    dc.delta_c = p.sp.omega_m[0] * (4.0 * u(rng) - 2.0);
    const double target_G = p.sp.omega_m[0] * 0.5 * std::pow(10.0, -2.0 * u(rng));
    dc.eps_l = target_G / p.sp.g * std::hypot(p.sp.kappa / 2.0, dc.delta_c);
    try {
      const PhotonBranches br = photon_number_branches(cubic_coeffs(p.sp, dc));
      const double x = br.x[static_cast<std::size_t>(u(rng) * br.x.size()) % br.x.size()];
      const SteadyState ss = steady_state_at(p.sp, dc, x);
      const StabilityReport r = analyze_stability(p.sp, ss);
      if (r.marginal) {
        ++marginal;
        continue;
      }
      ++accepted;
      agree += r.method_agreement;
      stable += r.stable;
    } catch (const NumericalError&) {
    }
  }
  Outcome o;
  o.pass = agree == accepted;
  o.details.push_back(fmt("%d/%d draws agree (%d stable, %d unstable; %d marginal excluded, %d tries)", agree,
                          accepted, stable, accepted - stable, marginal, tries));
  return o;
}

// --- 8 -------------------------------------------------------------------------------------------

Outcome symmetry_suite() {
  Outcome o;
  // Phases with few mantissa bits, so that phi + 2pi - 2pi == phi exactly in binary.
  bool periodic = true;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k <= 12; ++k) {
      const double phi = 0.5 * k;
      auto ref = oracle::reference({{"eps1_ratio", "0.3"}, {"eps2_ratio", "0.6"}, {"delta_p_ratio", "0.05"}});
      DriveConfig a = ref.dc, b = ref.dc;
      a.phi[i] = phi;
      b.phi[i] = phi + constants::two_pi;
      const double ta = transmission(ref.sp, a, solve_first_order(ref.sp, ref.ss, a));
      const double tb = transmission(ref.sp, b, solve_first_order(ref.sp, ref.ss, b));
      if (ta != tb) periodic = false;
    }
  }
  o.details.push_back(fmt("[%s] |t|^2(Phi_i + 2pi) == |t|^2(Phi_i) bitwise, i = 1, 2, 13 phases each",
                          periodic ? "pass" : "FAIL"));

  auto ref = oracle::reference();
  double asym = 0.0, at = 0.0;
  for (int k = 1; k <= 400; ++k) {
    const double d = 0.001 * k;
    DriveConfig p = ref.dc, m = ref.dc;
    p.xi = ref.sp.omega_m[0] * (1.0 + d);
    m.xi = ref.sp.omega_m[0] * (1.0 - d);
    const double tp = transmission(ref.sp, p, solve_first_order(ref.sp, ref.ss, p));
    const double tm = transmission(ref.sp, m, solve_first_order(ref.sp, ref.ss, m));
    if (std::abs(tp - tm) > asym) asym = std::abs(tp - tm), at = d;
  }
  const bool even = asym < 1e-8;
  o.details.push_back(fmt("[%s] max ||t|^2(Dp) - |t|^2(-Dp)| = %.3e at Dp/wm = %.3f (tol 1e-8); Delta - wm = %.2e rad/s",
                          even ? "pass" : "FAIL", asym, at, ref.ss.delta_eff - ref.sp.omega_m[0]));

  // The residual asymmetry should shrink with the pump, i.e. with |G|/omega_m.
  for (const char* p_mw : {"0.3", "0.03"}) {
    auto low = oracle::reference({{"pump_power_mw", p_mw}});
    double a2 = 0.0;
    for (int k = 1; k <= 400; ++k) {
      const double d = 0.001 * k;
      DriveConfig p = low.dc, m = low.dc;
      p.xi = low.sp.omega_m[0] * (1.0 + d);
      m.xi = low.sp.omega_m[0] * (1.0 - d);
      a2 = std::max(a2, std::abs(transmission(low.sp, p, solve_first_order(low.sp, low.ss, p)) -
                                 transmission(low.sp, m, solve_first_order(low.sp, low.ss, m))));
    }
    o.details.push_back(fmt("P_L = %s mW (|G|/wm = %.3f): max asymmetry %.3e", p_mw,
                            std::abs(low.sp.g * low.ss.c_s) / low.sp.omega_m[0], a2));
  }
  o.details.insert(o.details.end() - 2,
                   fmt("reference |G|/wm = %.3f, kappa/wm = %.3f", std::abs(ref.sp.g * ref.ss.c_s) / ref.sp.omega_m[0],
                       ref.sp.kappa / ref.sp.omega_m[0]));

  double hom_t = 0.0, hom_a = 0.0;
  std::mt19937_64 rng(99);
  for (int k = 0; k < 200; ++k) {
    const auto pt = oracle::random_point(rng);
    const double s = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
    DriveConfig b = pt.dc;
    b.eps_p *= s;
    b.eps = {b.eps[0] * s, b.eps[1] * s};
    try {
      const FirstOrderBlock fa = solve_first_order(pt.sp, pt.ss, pt.dc);
      const FirstOrderBlock fb = solve_first_order(pt.sp, pt.ss, b);
      const double ta = transmission(pt.sp, pt.dc, fa), tb = transmission(pt.sp, b, fb);
      hom_t = std::max(hom_t, std::abs(ta - tb) / std::max(ta, 1e-300));
      hom_a = std::max(hom_a, (fb.vector() - s * fa.vector()).norm() / (s * fa.vector().norm()));
    } catch (const NumericalError&) {
    }
  }
  const bool hom = hom_t < 1e-12 && hom_a < 1e-12;
  o.details.push_back(fmt("[%s] drive scaling: |t|^2 rel change %.2e, amplitude rel dev %.2e (tol 1e-12)",
                          hom ? "pass" : "FAIL", hom_t, hom_a));
  o.pass = periodic && even && hom;
  return o;
}

// --- 9 -------------------------------------------------------------------------------------------

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt("%02x", md[i]);
  return hex;
}

struct GoldenScan {
  std::string name;
  ScanKind kind;
  std::vector<std::pair<std::string, std::string>> sets;
};

const std::vector<GoldenScan>& golden_scans() {
  static const std::vector<GoldenScan> scans = {
      {"spectrum_reference", ScanKind::spectrum, {}},
      {"phase_map_single_resonator", ScanKind::phase_map, {{"lambda_hz", "0"}, {"eps1_ratio", "0.45"}}},
      {"sideband2_mr2_drive", ScanKind::sideband2, {{"eps2_ratio", "0.7"}}},
      {"bistability_reference", ScanKind::bistability, {}},
  };
  return scans;
}

std::string run_golden(const GoldenScan& g, int workers) {
  ScanSpec spec;
  spec.kind = g.kind;
  spec.config = Config::paper_defaults();
  for (const auto& [k, v] : g.sets) spec.config.set(k, v);
  spec.workers = workers;
  return to_csv(run_scan(spec));
}

Outcome determinism() {
  Outcome o;
  std::map<std::string, std::string> stored;
  const std::string path = golden_dir + "/checksums.sha256";
  if (std::ifstream is(path); is) {
    std::string hash, name;
    while (is >> hash >> name) stored[name] = hash;
  }
  std::ostringstream fresh;
  bool all = true;
  for (const GoldenScan& g : golden_scans()) {
    const std::string a = run_golden(g, 1), b = run_golden(g, 4);
    const std::string ha = sha256_hex(a), hb = sha256_hex(b);
    fresh << ha << "  " << g.name << ".csv\n";
    const auto it = stored.find(g.name + ".csv");
    const bool match = ha == hb && it != stored.end() && it->second == ha;
    all = all && match;
    o.details.push_back(fmt("[%s] %s: %s (1 vs 4 workers %s, stored %s)", match ? "pass" : "FAIL", g.name.c_str(),
                            ha.substr(0, 16).c_str(), ha == hb ? "identical" : "DIFFER",
                            it == stored.end() ? "missing" : (it->second == ha ? "match" : "MISMATCH")));
  }
  if (write_golden) {
    std::ofstream os(path);
    os << fresh.str();
    o.details.push_back("wrote " + path);
  }
  o.pass = all;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--write-golden") == 0) write_golden = true;
    else if (std::strcmp(argv[i], "--golden-dir") == 0 && i + 1 < argc) golden_dir = argv[++i];
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form vs direct solve", closed_form_equivalence},
      {"time-domain oracle agreement", time_domain_oracle},
      {"turning point", turning_point_check},
      {"second-order efficiency", efficiency_check},
      {"group delay", group_delay_check},
      {"stability boundary", bistability_check},
      {"Routh-Hurwitz vs eigenvalues", method_agreement},
      {"symmetry and periodicity", symmetry_suite},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << "CRITERION " << k + 1 << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[k].first << "\n";
    for (const auto& d : o.details) std::cout << "    " << d << "\n";
    std::cout.flush();
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed;
}
