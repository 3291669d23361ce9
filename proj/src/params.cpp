#include "omit/params.hpp"

#include "omit/errors.hpp"

#include <cmath>
#include <string>

namespace omit {
namespace {

void require_positive(double v, const char* field) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw ConfigError(std::string(field) + ": must be positive and finite (got " +
                      std::to_string(v) + ")");
  }
}

}  // namespace

double zero_point_motion(double mass, double omega) {
  return std::sqrt(constants::hbar / (2.0 * mass * omega));
}

DerivedParams derive_params(const RawInputs& raw) {
  DerivedParams out;
  SystemParams& sp = out.params;

  require_positive(raw.wavelength, "wavelength");
  require_positive(raw.cavity_length, "cavity_length");
  require_positive(raw.omega_m[0], "omega_m1");
  require_positive(raw.omega_m[1], "omega_m2");
  require_positive(raw.mass[0], "mass1");
  require_positive(raw.mass[1], "mass2");
  require_positive(raw.kappa, "kappa");
  if (!std::isfinite(raw.eta_c) || raw.eta_c <= 0.0 || raw.eta_c > 1.0) {
    throw ConfigError("eta_c: must lie in (0, 1]");
  }

  sp.omega_c = constants::two_pi * constants::speed_of_light / raw.wavelength;
  sp.cavity_length = raw.cavity_length;
  sp.omega_m = raw.omega_m;
  sp.mass = raw.mass;
  sp.kappa = raw.kappa;
  sp.eta_c = raw.eta_c;

  if (raw.gamma) {
    require_positive((*raw.gamma)[0], "gamma1");
    require_positive((*raw.gamma)[1], "gamma2");
    sp.gamma = *raw.gamma;
    if (raw.quality_factor) {
      require_positive(*raw.quality_factor, "quality_factor");
      sp.quality_factor = raw.quality_factor;
      out.warnings.emplace_back("gamma given explicitly; quality_factor ignored for damping");
    }
  } else if (raw.quality_factor) {
    require_positive(*raw.quality_factor, "quality_factor");
    sp.quality_factor = raw.quality_factor;
    sp.gamma = {raw.omega_m[0] / *raw.quality_factor, raw.omega_m[1] / *raw.quality_factor};
  } else {
    throw ConfigError("gamma: provide either gamma1/gamma2 or quality_factor");
  }

  if (raw.g_override) {
    require_positive(*raw.g_override, "g");
    sp.g = *raw.g_override;
  } else {
    // Dispersive Fabry-Perot coupling; only MR1 enters the radiation-pressure term.
    sp.g = sp.omega_c / sp.cavity_length * zero_point_motion(sp.mass[0], sp.omega_m[0]);
  }

  if (raw.lambda) {
    if (!std::isfinite(*raw.lambda) || *raw.lambda < 0.0) {
      throw ConfigError("lambda: must be non-negative and finite");
    }
    sp.lambda = *raw.lambda;
    if (raw.coulomb) {
      out.warnings.emplace_back("lambda given directly and via Coulomb parameters; direct value used");
    }
  } else if (raw.coulomb) {
    sp.lambda = coulomb_lambda(*raw.coulomb, sp);
  } else {
    sp.lambda = 0.0;
  }
  return out;
}

double coulomb_lambda(const CoulombParams& cp, const SystemParams& sp) {
  if (cp.r0 == 0.0) {
    throw NumericalError(NumericalError::Kind::singular, "coulomb_lambda: r0 = 0 (singular geometry)");
  }
  if (!std::isfinite(cp.r0) || cp.r0 < 0.0) throw ConfigError("coulomb_r0: must be positive");
  const double r3 = cp.r0 * cp.r0 * cp.r0;
  const double zpf = std::sqrt(constants::hbar / (sp.mass[0] * sp.mass[1] * sp.omega_m[0] * sp.omega_m[1]));
  return cp.k_e * cp.charge(0) * cp.charge(1) / r3 * zpf;
}

double pump_amplitude(const SystemParams& sp, double pump_power, double omega_l,
                      PumpConvention convention) {
  if (!std::isfinite(pump_power) || pump_power < 0.0) throw ConfigError("pump_power: must be >= 0");
  require_positive(omega_l, "omega_l");
  const double rate = convention == PumpConvention::two_kappa ? 2.0 * sp.kappa : 2.0 * sp.eta_c * sp.kappa;
  return std::sqrt(rate * pump_power / (constants::hbar * omega_l));
}

bool DriveConfig::perturbative() const {
  const double limit = 0.1 * eps_l;
  return eps_p <= limit && eps[0] <= limit && eps[1] <= limit;
}

}  // namespace omit
