#pragma once

#include "omit/params.hpp"
#include "omit/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace omit {

/// Uniformly sampled mean-field trajectory. Only the recorded tail of the
/// integration is stored; times[k] = t_start + k * dt.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<cplx> c, b1, b2;
  std::optional<double> step_error;  // step-halving estimate, max abs over recorded samples
  std::size_t steps = 0;

  std::size_t size() const { return times.size(); }
};

struct IntegrateOptions {
  std::optional<State3> initial;  // default: steady state on `branch`
  BranchPolicy branch = BranchPolicy::adiabatic_lower;
  double record_from = 0.0;  // s; samples before this time are discarded
  bool step_halving = false;
};

/// Right-hand side of the nonlinear mean-field equations in the pump frame,
/// driven by the probe and the two mechanical tones at the raw phases.
State3 eom_rhs(const SystemParams& sp, const DriveConfig& dc, double t, const State3& y);

/// Fixed-step RK4 from t = 0 to t_end. Throws ConfigError when dt violates
/// dt < 0.05 min(2pi/omega_m_i, 2pi/|Delta_c|, 2pi/xi), NumericalError(nonfinite)
/// with the time stamp on divergence.
Trajectory integrate_eom(const SystemParams& sp, const DriveConfig& dc, double t_end, double dt,
                         const IntegrateOptions& opt = {});

/// 2pi / (200 * fastest frequency in the problem).
double default_time_step(const SystemParams& sp, const DriveConfig& dc);

/// Largest step <= default_time_step that divides the beat period 2pi/xi exactly.
double commensurate_time_step(const SystemParams& sp, const DriveConfig& dc);

/// 10 / min(gamma_1, gamma_2, kappa).
double transient_time(const SystemParams& sp);

struct HarmonicWindow {
  double start = 0.0;  // s
  int periods = 20;    // whole beat periods
};

/// Projections (1/T) int f(t) e^{+i n xi t} dt for n = -2..2, so that n = +1
/// picks the e^{-i xi t} component (A_1^- for the cavity).
struct HarmonicDecomposition {
  std::array<std::array<cplx, 5>, 3> amp{};  // [field c/b1/b2][n + 2]
  double leakage_estimate = 0.0;  // half-window disagreement relative to the dominant amplitude
  double xi = 0.0;

  cplx amplitude(int field, int n) const { return amp[static_cast<std::size_t>(field)][static_cast<std::size_t>(n + 2)]; }
};

/// Trapezoidal projection over an integer number of beat periods. The grid must
/// place a sample on both window edges. Throws ConfigError for windows shorter
/// than one period, outside the trajectory, or incommensurate with dt.
HarmonicDecomposition extract_harmonics(const Trajectory& traj, double xi, const HarmonicWindow& window);

/// Debug dump: `t,re_c,im_c,re_b1,im_b1,re_b2,im_b2`. Throws IoError.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace omit
