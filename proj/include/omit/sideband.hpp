#pragma once

#include "omit/params.hpp"
#include "omit/steady_state.hpp"
#include "omit/types.hpp"

#include <array>
#include <optional>

namespace omit {

/// h-coefficients of the sideband equations. Index 0..5 holds h1..h6; h1..h3
/// carry -i xi, h4..h6 carry -2 i xi.
struct HarmonicCoefficients {
  std::array<cplx, 6> hp{};  // h_k^+
  std::array<cplx, 6> hm{};  // h_k^-
  cplx U1p{}, U1m{}, U2p{}, U2m{};
  cplx Pi{}, Gamma{};
  cplx G{};
  double delta = 0.0;
  double xi = 0.0;
  double lambda = 0.0;
};

HarmonicCoefficients h_coeffs(const SystemParams& sp, const SteadyState& ss, double xi);

/// Coefficient matrix of the sideband system at beat frequency `freq`
/// (xi for first order, 2 xi for second order). Unknown ordering:
/// (A^-, A^{+*}, B^-, B^{+*}, D^-, D^{+*}). d/dfreq of the matrix is -i I.
Matrix6c sideband_matrix(const SystemParams& sp, const SteadyState& ss, double freq);

/// Right-hand side of the first-order system.
Vector6c first_order_source(const DriveConfig& dc);

struct FirstOrderBlock {
  cplx A1m{}, A1p{}, B1m{}, B1p{}, D1m{}, D1p{};  // A1p holds A_1^{+*}, etc.
  cplx A1m_closed{};            // closed-form value
  double closed_discrepancy = 0.0;  // |closed - direct| / |direct|
  double residual = 0.0;        // normwise backward error of the direct solve

  Vector6c vector() const;
};

struct SecondOrderBlock {
  cplx A2m{}, A2p{}, B2m{}, B2p{}, D2m{}, D2p{};
  cplx A2m_closed{};  // NaN when G == 0
  double closed_discrepancy = 0.0;
  double residual = 0.0;

  Vector6c vector() const;
};

struct SidebandSolution {
  FirstOrderBlock first;
  SecondOrderBlock second;
  cplx transmission_t{};
  double efficiency_eta = 0.0;
};

/// Direct dense solve of the first-order system; the closed form for A_1^- is
/// evaluated alongside. Throws NumericalError(singular) naming the smallest
/// h-coefficient when the matrix is numerically singular.
FirstOrderBlock solve_first_order(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc);

/// Second-order sources built from the first-order amplitudes.
Vector6c second_order_source(const SystemParams& sp, const FirstOrderBlock& first);

SecondOrderBlock solve_second_order(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc,
                                    const FirstOrderBlock& first);

/// Both orders plus transmission and efficiency. With eps_p == 0 the
/// transmission and efficiency are left at 1 and 0.
SidebandSolution solve_sidebands(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc);

/// t = 1 - eta_c kappa A_1^- / (eps_p e^{-i phi_pl}). Throws ConfigError for eps_p == 0.
cplx transmission_amplitude(const SystemParams& sp, const DriveConfig& dc, const FirstOrderBlock& first);

/// |t|^2.
double transmission(const SystemParams& sp, const DriveConfig& dc, const FirstOrderBlock& first);

/// |eta_c kappa A_2^- / (eps_p e^{-i phi_pl})|. Throws ConfigError for eps_p == 0.
double efficiency_2nd(const SystemParams& sp, const DriveConfig& dc, const SecondOrderBlock& second);

struct TurningPoint {
  double ratio = 0.0;    // eps_1/eps_p minimising |t|^2 at the drive's xi and Phi_1
  double t2_min = 0.0;   // |t|^2 at that ratio
  cplx printed{};        // the published closed expression, evaluated as written
  cplx t_offset{}, t_slope{};  // t = t_offset + t_slope * ratio
};

/// Single-resonator turning point (requires lambda == 0). t is affine in
/// r = eps_1/eps_p; the minimiser over real r is -Re(a conj(b)) / |b|^2.
/// Throws ConfigError for lambda != 0 and NumericalError(singular) for G == 0.
TurningPoint turning_point(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc);

struct GroupDelay {
  double tau = 0.0;       // s, Richardson-extrapolated central difference
  double error = 0.0;     // |extrapolated - finer difference|
  double tau_analytic = 0.0;  // Im(t'/t) with t' from the differentiated linear system
  double xi = 0.0;        // evaluation point, rad/s
};

/// tau_g = d arg t / d omega_p at xi0 (default: xi = Delta_eff, the probe on
/// the effective cavity resonance). Step h = 1e-4 kappa, two Richardson levels.
/// Throws NumericalError(singular) when |t| < 1e-12.
GroupDelay group_delay(const SystemParams& sp, const SteadyState& ss, const DriveConfig& dc,
                       std::optional<double> xi0 = std::nullopt);

}  // namespace omit
