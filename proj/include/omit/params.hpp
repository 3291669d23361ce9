#pragma once

#include "omit/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace omit {

/// Electrostatic point-charge coupling between the two resonators.
struct CoulombParams {
  double k_e = constants::coulomb_k;  // N m^2 / C^2
  double r0 = 0.0;                    // equilibrium separation, m
  std::array<double, 2> capacitance{};  // F
  std::array<double, 2> voltage{};      // V

  double charge(int i) const { return capacitance[i] * voltage[i]; }
};

/// Raw device description as entered by a user, SI units, frequencies angular.
///
/// Either `quality_factor` or `gamma` must be present. `lambda` and `coulomb` are
/// both optional; a direct `lambda` wins over the Coulomb route. `g_override`
/// bypasses the Fabry-Perot coupling model.
struct RawInputs {
  double wavelength = 0.0;     // m
  double cavity_length = 0.0;  // m
  std::array<double, 2> omega_m{};  // rad/s
  std::array<double, 2> mass{};     // kg
  std::optional<double> quality_factor;
  std::optional<std::array<double, 2>> gamma;  // rad/s
  double kappa = 0.0;  // rad/s
  double eta_c = 0.5;
  std::optional<double> lambda;  // rad/s
  std::optional<CoulombParams> coulomb;
  std::optional<double> g_override;  // rad/s
};

/// Fully resolved device parameters. Immutable once built by derive_params().
struct SystemParams {
  double omega_c = 0.0;        // cavity angular frequency, rad/s
  double cavity_length = 0.0;  // m
  std::array<double, 2> omega_m{};
  std::array<double, 2> mass{};
  std::array<double, 2> gamma{};
  double kappa = 0.0;
  double eta_c = 0.5;
  double g = 0.0;       // single-photon optomechanical coupling, rad/s
  double lambda = 0.0;  // phonon-phonon coupling, rad/s
  std::optional<double> quality_factor;
};

struct DerivedParams {
  SystemParams params;
  std::vector<std::string> warnings;
};

/// Zero-point position spread sqrt(hbar / (2 m omega)).
double zero_point_motion(double mass, double omega);

/// Builds SystemParams: gamma_i = omega_m_i / Q, g = (omega_c / L) x_zpf(MR1),
/// lambda from the direct value or the Coulomb route. Throws ConfigError naming
/// the offending field for non-positive or non-finite inputs.
DerivedParams derive_params(const RawInputs& raw);

/// Coulomb coupling strength
///   lambda = k_e q1 q2 / r0^3 * sqrt(hbar / (m1 m2 w1 w2)).
/// Throws NumericalError(singular) for r0 == 0.
double coulomb_lambda(const CoulombParams& cp, const SystemParams& sp);

enum class PumpConvention {
  two_kappa,  // eps_l = sqrt(2 kappa P / (hbar omega_l))
  eta_kappa,  // eps_l = sqrt(2 eta_c kappa P / (hbar omega_l))
};

enum class DetuningMode {
  red_sideband,   // Delta_c chosen so the effective detuning equals omega_m1
  fixed_delta_c,  // Delta_c taken from DriveSettings::delta_c
};

enum class BranchPolicy { adiabatic_lower, middle, upper };

/// User-facing drive description. Amplitudes are ratios; DriveConfig holds
/// the resolved absolute values.
struct DriveSettings {
  double pump_power = 3e-3;  // W
  PumpConvention convention = PumpConvention::two_kappa;
  DetuningMode detuning_mode = DetuningMode::red_sideband;
  double delta_c = 0.0;      // rad/s, used with fixed_delta_c
  double eps_p_ratio = 0.05;  // eps_p / eps_l
  std::array<double, 2> eps_ratio{};  // eps_i / eps_p
  double phi_l = 0.0, phi_p = 0.0;
  std::array<double, 2> phi{};  // raw mechanical drive phases
  double delta_p_ratio = 0.0;   // (xi - omega_m1) / omega_m1
  BranchPolicy branch = BranchPolicy::adiabatic_lower;
};

/// Resolved drive. The pump amplitude eps_l is real and positive; phi_l only
/// enters through phi_pl and the mixing phases Phi_i.
struct DriveConfig {
  double pump_power = 0.0;
  double omega_l = 0.0;
  double delta_c = 0.0;
  double eps_l = 0.0;
  double eps_p = 0.0;
  double phi_l = 0.0, phi_p = 0.0;
  std::array<double, 2> eps{};
  std::array<double, 2> phi{};
  double xi = 0.0;  // probe-pump beat frequency omega_p - omega_l

  double phi_pl() const { return wrap_phase(phi_p - phi_l); }
  /// Phi_i = phi_i + phi_l - phi_p, in [0, 2pi).
  double mixing_phase(int i) const { return wrap_phase(phi[i] + phi_l - phi_p); }
  /// True when the probe and mechanical drives are within 10% of the pump.
  bool perturbative() const;
};

/// Pump amplitude for the chosen convention.
double pump_amplitude(const SystemParams& sp, double pump_power, double omega_l,
                      PumpConvention convention);

}  // namespace omit
