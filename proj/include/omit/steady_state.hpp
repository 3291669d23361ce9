#pragma once

#include "omit/params.hpp"
#include "omit/types.hpp"

#include <string_view>
#include <vector>

namespace omit {

enum class BranchLabel { unique, lower, middle, upper };
std::string_view to_string(BranchLabel b);

struct SteadyState {
  cplx c_s{};
  cplx b1_s{};
  cplx b2_s{};
  double delta_eff = 0.0;       // Delta_c - g (b1s* + b1s)
  double photon_number = 0.0;   // |c_s|^2
  BranchLabel branch = BranchLabel::unique;
  bool fold = false;
};

/// Coefficients of a3 x^3 + a2 x^2 + a1 x + a0 = 0 for x = |c_s|^2.
struct CubicCoefficients {
  double a3 = 0.0, a2 = 0.0, a1 = 0.0, a0 = 0.0;
  double W = 0.0;  // static shift weight: Delta = Delta_c - W g^2 x

  double operator()(double x) const { return ((a3 * x + a2) * x + a1) * x + a0; }
  /// max_i |a_i| x^i, the natural scale for residuals at x.
  double scale_at(double x) const;
};

/// Static mechanical response weight W such that g (b1s + b1s*) = W g^2 |c_s|^2.
double shift_weight(const SystemParams& sp);

CubicCoefficients cubic_coeffs(const SystemParams& sp, const DriveConfig& dc);

struct PhotonBranches {
  std::vector<double> x;  // real non-negative roots, ascending
  bool fold = false;
};

/// Non-negative real roots of the photon-number cubic, each verified against
/// the polynomial residual bound.
PhotonBranches photon_number_branches(const CubicCoefficients& cc);

/// Mean fields for a given photon number x on the cubic.
SteadyState steady_state_at(const SystemParams& sp, const DriveConfig& dc, double x);

/// Selects a branch of the cubic and reconstructs the mean fields. `middle`
/// throws NumericalError(branch_unavailable) unless three roots exist.
SteadyState solve_steady(const SystemParams& sp, const DriveConfig& dc,
                         BranchPolicy policy = BranchPolicy::adiabatic_lower);

/// Max over the three stationary mean-field equations of |sum of terms| /
/// sum of |terms| (0 when every term vanishes).
double steady_residual(const SystemParams& sp, const DriveConfig& dc, const SteadyState& ss);

/// Resolves ratios, phases and detuning into absolute drive values. In
/// red-sideband mode Delta_c = omega_m1 + W g^2 x so that Delta_eff = omega_m1.
DriveConfig resolve_drive(const SystemParams& sp, const DriveSettings& ds);

struct BistabilityRow {
  double pump_power = 0.0;  // W
  std::vector<double> x;    // ascending
  bool fold = false;
};

/// Photon-number branches over a linear pump-power grid at fixed Delta_c.
std::vector<BistabilityRow> bistability_sweep(const SystemParams& sp, const DriveSettings& ds,
                                              double p_min, double p_max, int n);

}  // namespace omit
