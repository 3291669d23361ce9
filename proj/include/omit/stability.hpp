#pragma once

#include "omit/params.hpp"
#include "omit/steady_state.hpp"
#include "omit/types.hpp"

#include <json.hpp>

#include <array>
#include <vector>

namespace omit {

/// Linearised drift matrix over (dc, dc*, db1, db1*, db2, db2*).
struct FluctuationMatrix {
  Matrix6c entries = Matrix6c::Zero();
  cplx G{};  // g c_s
};

/// Drift matrix derived from the linearised equations of motion.
FluctuationMatrix fluctuation_matrix(const SystemParams& sp, const SteadyState& ss);

/// The drift matrix in its published layout, transcribed as-is. Only used for
/// the element-wise comparison in StabilityReport, never for verdicts.
Matrix6c printed_fluctuation_matrix(const SystemParams& sp, const SteadyState& ss);

/// Swap of each field with its conjugate partner: P C P == conj(C) holds for
/// a physical drift matrix.
Matrix6c conjugate_swap(const Matrix6c& m);

struct CharPoly {
  std::array<double, 6> coeffs{};  // C1..C6 of U^6 + C1 U^5 + ... + C6, physical units
  std::array<double, 6> scaled{};  // coefficients of the polynomial in U / scale
  double scale = 1.0;
  double max_imag_rel = 0.0;  // largest truncated imaginary part, relative
};

/// Faddeev-LeVerrier recursion on the matrix scaled by its infinity norm, in
/// extended precision. Throws NumericalError(inconsistent) if an imaginary part
/// exceeds 1e-9 of the coefficient's natural scale.
CharPoly char_poly_coeffs(const FluctuationMatrix& fm);

/// Leading principal minors of the Hurwitz matrix of U^6 + C1 U^5 + ... + C6.
/// All positive iff every root has negative real part.
template <class Scalar>
std::array<Scalar, 6> hurwitz_determinants(const std::array<Scalar, 6>& c);

/// The six published stability inequalities, transcribed term by term.
/// Conditions 4-6 are not the Hurwitz minors and are not homogeneous in the
/// coefficient weights, so they are evaluated on physical coefficients.
template <class Scalar>
std::array<Scalar, 6> printed_stability_conditions(const std::array<Scalar, 6>& c);

/// Eigenvalues sorted by (real, imag). Throws NumericalError(no_convergence).
std::vector<cplx> eigenvalues(const FluctuationMatrix& fm);

double eigen_max_real(const FluctuationMatrix& fm);

struct MatrixDiscrepancy {
  int row = 0, col = 0;
  cplx derived{}, printed{};
};

struct StabilityReport {
  CharPoly poly;
  std::array<double, 6> rh{};  // Hurwitz minors of the scaled polynomial
  std::array<bool, 6> rh_pass{};
  bool rh_stable = false;
  std::array<double, 6> rh_printed{};  // printed inequalities on physical coefficients
  bool printed_stable = false;
  std::vector<cplx> spectrum;
  double max_re_eig = 0.0;
  bool stable = false;
  bool marginal = false;  // |max Re| within the 1e-6 kappa band
  bool method_agreement = false;
  std::vector<MatrixDiscrepancy> printed_matrix_diff;
};

StabilityReport analyze_stability(const SystemParams& sp, const SteadyState& ss);

/// `{stable, max_re_eig, rh: [6], agreement, ...}`
nlohmann::json to_json(const StabilityReport& r);

}  // namespace omit
