#include "omit/errors.hpp"
#include "omit/sideband.hpp"

#include "oracle/oracles.hpp"

#include <doctest.h>

using namespace omit;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("h coefficients: frequency shift between orders and sign mirror") {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 100; ++k) {
    const auto p = oracle::random_point(rng);
    const HarmonicCoefficients a = h_coeffs(p.sp, p.ss, p.dc.xi);
    const HarmonicCoefficients m = h_coeffs(p.sp, p.ss, -p.dc.xi);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(a.hp[j + 3] - (a.hp[j] - I * p.dc.xi)) <= 1e-15 * std::abs(a.hp[j + 3]) * 4);
      CHECK(std::abs(a.hm[j] - std::conj(m.hp[j])) <= 1e-15 * std::abs(a.hm[j]) * 4);
    }
    CHECK(a.hp[0].real() == doctest::Approx(p.sp.kappa / 2.0));
    CHECK(a.hp[1].real() == doctest::Approx(p.sp.gamma[0] / 2.0));
    CHECK(a.hp[2].real() == doctest::Approx(p.sp.gamma[1] / 2.0));
  }
}

TEST_CASE("sideband matrix moves by -i per unit frequency") {
  std::mt19937_64 rng(31);
  const auto p = oracle::random_point(rng);
  const Matrix6c a = sideband_matrix(p.sp, p.ss, p.dc.xi);
  const Matrix6c b = sideband_matrix(p.sp, p.ss, p.dc.xi + 1000.0);
  CHECK(((b - a) + 1000.0 * I * Matrix6c::Identity()).norm() < 1e-9 * a.norm());
}

TEST_CASE("without coupling the probe sees a bare Lorentzian cavity") {
  auto ref = oracle::reference({{"delta_p_ratio", "0.07"}, {"phi_p_rad", "0.7"}});
  SteadyState empty = ref.ss;
  empty.c_s = 0.0;
  const FirstOrderBlock f = solve_first_order(ref.sp, empty, ref.dc);
  const cplx h1p = cplx(ref.sp.kappa / 2.0, empty.delta_eff - ref.dc.xi);
  const cplx expect = ref.dc.eps_p * std::exp(-I * ref.dc.phi_pl()) / h1p;
  CHECK(rel(f.A1m, expect) < 1e-14);
  CHECK(std::abs(f.A1p) == 0.0);
  CHECK(transmission(ref.sp, ref.dc, f) ==
        doctest::Approx(std::norm(1.0 - ref.sp.eta_c * ref.sp.kappa / h1p)).epsilon(1e-13));
  const SecondOrderBlock s = solve_second_order(ref.sp, empty, ref.dc, f);
  CHECK(std::isnan(s.A2m_closed.real()));
}

TEST_CASE("single resonator matches hand elimination") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 500; ++k) {
    auto p = oracle::random_point(rng, false);
    p.dc.eps = {0.0, 0.0};
    const FirstOrderBlock f = solve_first_order(p.sp, p.ss, p.dc);
    const cplx G = p.sp.g * p.ss.c_s;
    const cplx source = p.dc.eps_p * std::exp(-I * p.dc.phi_pl());
    const cplx expect =
        oracle::single_mr_a1m(p.ss.delta_eff, p.sp.kappa, p.sp.omega_m[0], p.sp.gamma[0], G, p.dc.xi, source);
    CHECK(rel(f.A1m, expect) < 1e-10);
  }
}

TEST_CASE("closed forms agree with the dense solves") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 500; ++k) {
    const auto p = oracle::random_point(rng);
    const FirstOrderBlock f = solve_first_order(p.sp, p.ss, p.dc);
    const SecondOrderBlock s = solve_second_order(p.sp, p.ss, p.dc, f);
    CHECK(f.closed_discrepancy < 1e-10);
    CHECK(s.closed_discrepancy < 1e-9);
    CHECK(f.residual < 1e-14);
  }
}

TEST_CASE("zero sources give zero sidebands and unit transmission") {
  auto ref = oracle::reference({{"eps_p_ratio", "0"}});
  const SidebandSolution sol = solve_sidebands(ref.sp, ref.ss, ref.dc);
  CHECK(sol.first.vector().norm() == 0.0);
  CHECK(sol.second.vector().norm() == 0.0);
  CHECK(sol.transmission_t == cplx(1.0));
  CHECK(sol.efficiency_eta == 0.0);
  CHECK_THROWS_AS(transmission(ref.sp, ref.dc, sol.first), ConfigError);
}

TEST_CASE("first order is linear and second order quadratic in the drives") {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 100; ++k) {
    const auto p = oracle::random_point(rng);
    DriveConfig scaled = p.dc;
    const double s = 3.7;
    scaled.eps_p *= s;
    scaled.eps = {p.dc.eps[0] * s, p.dc.eps[1] * s};
    const FirstOrderBlock a = solve_first_order(p.sp, p.ss, p.dc), b = solve_first_order(p.sp, p.ss, scaled);
    CHECK((b.vector() - s * a.vector()).norm() <= 1e-13 * s * a.vector().norm());
    const SecondOrderBlock a2 = solve_second_order(p.sp, p.ss, p.dc, a);
    const SecondOrderBlock b2 = solve_second_order(p.sp, p.ss, scaled, b);
    CHECK((b2.vector() - s * s * a2.vector()).norm() <= 1e-12 * s * s * a2.vector().norm());
  }
}

TEST_CASE("singular system names the vanishing coefficient") {
  auto ref = oracle::reference();
  SystemParams sp = ref.sp;
  sp.kappa = 0.0;
  SteadyState empty = ref.ss;
  empty.c_s = 0.0;
  DriveConfig dc = ref.dc;
  dc.xi = empty.delta_eff;
  try {
    solve_first_order(sp, empty, dc);
    FAIL("expected a singular system");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalError::Kind::singular);
    CHECK(std::string(e.what()).find("h1+") != std::string::npos);
  }
}

TEST_CASE("turning point: slope-offset form reproduces the direct transmission") {
  const auto ref = oracle::reference({{"lambda_hz", "0"}});
  const TurningPoint tp = turning_point(ref.sp, ref.ss, ref.dc);
  for (double r : {0.0, 0.3, tp.ratio, 1.7}) {
    DriveConfig dc = ref.dc;
    dc.eps[0] = r * dc.eps_p;
    const cplx t = transmission_amplitude(ref.sp, dc, solve_first_order(ref.sp, ref.ss, dc));
    CHECK(std::abs(t - (tp.t_offset + r * tp.t_slope)) < 1e-12);
  }
  CHECK(tp.t2_min == doctest::Approx(std::norm(tp.t_offset + tp.ratio * tp.t_slope)));
  const auto coupled = oracle::reference();
  CHECK_THROWS_AS(turning_point(coupled.sp, coupled.ss, coupled.dc), ConfigError);
}

TEST_CASE("group delay: finite difference agrees with the analytic derivative") {
  for (const char* p : {"0.5", "3", "6"}) {
    const auto ref = oracle::reference({{"pump_power_mw", p}});
    const GroupDelay gd = group_delay(ref.sp, ref.ss, ref.dc);
    CHECK(std::abs(gd.tau - gd.tau_analytic) <= 1e-6 * std::abs(gd.tau_analytic));
    CHECK(gd.error < 1e-3 * std::abs(gd.tau));
    CHECK(gd.xi == doctest::Approx(ref.ss.delta_eff));
  }
}

TEST_CASE("transmission is 2pi periodic in the mixing phases") {
  auto ref = oracle::reference({{"eps1_ratio", "0.3"}, {"eps2_ratio", "0.2"}});
  for (double phi : {0.0, 0.5, 2.0, 4.5}) {
    DriveConfig a = ref.dc, b = ref.dc;
    a.phi = {phi, 1.0};
    b.phi = {phi + constants::two_pi, 1.0 - constants::two_pi};
    CHECK(transmission(ref.sp, a, solve_first_order(ref.sp, ref.ss, a)) ==
          transmission(ref.sp, b, solve_first_order(ref.sp, ref.ss, b)));
  }
}
