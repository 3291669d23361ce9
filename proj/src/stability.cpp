#include "omit/stability.hpp"

#include "omit/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace omit {

FluctuationMatrix fluctuation_matrix(const SystemParams& sp, const SteadyState& ss) {
  FluctuationMatrix fm;
  const cplx G = sp.g * ss.c_s;
  const cplx Gc = std::conj(G);
  const double D = ss.delta_eff;
  const double l = sp.lambda;
  Matrix6c& C = fm.entries;
  C.setZero();
  // d(dc)/dt   = -(i D + k/2) dc + i G (db1 + db1*)
  C(0, 0) = cplx(-sp.kappa / 2.0, -D);
  C(0, 2) = I * G;
  C(0, 3) = I * G;
  // d(dc*)/dt  = -(-i D + k/2) dc* - i G* (db1 + db1*)
  C(1, 1) = cplx(-sp.kappa / 2.0, D);
  C(1, 2) = -I * Gc;
  C(1, 3) = -I * Gc;
  // d(db1)/dt  = -(i w1 + g1/2) db1 + i G* dc + i G dc* - i l db2
  C(2, 0) = I * Gc;
  C(2, 1) = I * G;
  C(2, 2) = cplx(-sp.gamma[0] / 2.0, -sp.omega_m[0]);
  C(2, 4) = -I * l;
  // d(db1*)/dt = -(-i w1 + g1/2) db1* - i G dc - i G* dc* + i l db2*
  C(3, 0) = -I * Gc;
  C(3, 1) = -I * G;
  C(3, 3) = cplx(-sp.gamma[0] / 2.0, sp.omega_m[0]);
  C(3, 5) = I * l;
  // d(db2)/dt  = -(i w2 + g2/2) db2 - i l db1
  C(4, 2) = -I * l;
  C(4, 4) = cplx(-sp.gamma[1] / 2.0, -sp.omega_m[1]);
  // d(db2*)/dt = -(-i w2 + g2/2) db2* + i l db1*
  C(5, 3) = I * l;
  C(5, 5) = cplx(-sp.gamma[1] / 2.0, sp.omega_m[1]);
  fm.G = G;
  return fm;
}

Matrix6c printed_fluctuation_matrix(const SystemParams& sp, const SteadyState& ss) {
  const cplx G = sp.g * ss.c_s;
  const cplx Gc = std::conj(G);
  const double D = ss.delta_eff, l = sp.lambda;
  const cplx m1(-sp.gamma[0] / 2.0, -sp.omega_m[0]), m1c(-sp.gamma[0] / 2.0, sp.omega_m[0]);
  const cplx m2(-sp.gamma[1] / 2.0, -sp.omega_m[1]), m2c(-sp.gamma[1] / 2.0, sp.omega_m[1]);
  Matrix6c C;
  C << cplx(-sp.kappa / 2.0, -D), 0.0, I * G, I * G, 0.0, 0.0,
       0.0, cplx(-sp.kappa / 2.0, D), I * Gc, I * Gc, 0.0, 0.0,
       m1, 0.0, I * Gc, I * G, -I * l, 0.0,
       0.0, m1c, I * G, I * Gc, 0.0, I * l,
       m2, 0.0, -I * l, 0.0, 0.0, 0.0,
       0.0, m2c, 0.0, I * l, 0.0, 0.0;
  return C;
}

Matrix6c conjugate_swap(const Matrix6c& m) {
  Eigen::PermutationMatrix<6> P;
  P.indices() << 1, 0, 3, 2, 5, 4;
  return P * m * P.transpose();
}

CharPoly char_poly_coeffs(const FluctuationMatrix& fm) {
  using ld = long double;
  using cld = std::complex<ld>;
  using MatL = Eigen::Matrix<cld, 6, 6>;

  CharPoly out;
  const double norm = fm.entries.cwiseAbs().rowwise().sum().maxCoeff();
  out.scale = norm > 0.0 ? norm : 1.0;

  MatL A;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) A(i, j) = cld(fm.entries(i, j)) / static_cast<ld>(out.scale);

  // det(U I - A) = U^6 + c1 U^5 + ... + c6;  M_k = A M_{k-1} + c_{k-1} I,  c_k = -tr(A M_k) / k.
  static constexpr double binom[] = {6, 15, 20, 15, 6, 1};
  MatL M = MatL::Zero();
  cld prev = 1.0L;
  ld scale_pow = 1.0L;
  for (int k = 1; k <= 6; ++k) {
    M = (A * M).eval();
    M.diagonal().array() += prev;
    const cld ck = -(A * M).trace() / static_cast<ld>(k);
    const double rel = static_cast<double>(std::abs(ck.imag())) / binom[k - 1];
    out.max_imag_rel = std::max(out.max_imag_rel, rel);
    if (rel > 1e-9) {
      throw NumericalError(NumericalError::Kind::inconsistent,
                           "char_poly_coeffs: imaginary residue " + std::to_string(rel) + " in C" +
                               std::to_string(k));
    }
    scale_pow *= static_cast<ld>(out.scale);
    out.scaled[k - 1] = static_cast<double>(ck.real());
    out.coeffs[k - 1] = static_cast<double>(ck.real() * scale_pow);
    prev = cld(ck.real(), 0.0L);
  }
  return out;
}

template <class Scalar>
std::array<Scalar, 6> hurwitz_determinants(const std::array<Scalar, 6>& c) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  auto coef = [&](int k) -> Scalar {
    if (k == 0) return Scalar(1);
    if (k < 0 || k > 6) return Scalar(0);
    return c[static_cast<std::size_t>(k - 1)];
  };
  Mat H(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) H(i, j) = coef(2 * (j + 1) - (i + 1));
  std::array<Scalar, 6> d{};
  for (int k = 1; k <= 6; ++k) d[static_cast<std::size_t>(k - 1)] = H.topLeftCorner(k, k).fullPivLu().determinant();
  return d;
}

template <class Scalar>
std::array<Scalar, 6> printed_stability_conditions(const std::array<Scalar, 6>& c) {
  const Scalar C1 = c[0], C2 = c[1], C3 = c[2], C4 = c[3], C5 = c[4], C6 = c[5];
  std::array<Scalar, 6> r{};
  // line 1: C1 > 0
  r[0] = C1;
  // line 2: C1 C2 - C3 > 0
  r[1] = C1 * C2 - C3;
  // line 3: C1 C2 C3 + C1 C5 - C1^2 C4 - C3^2 > 0
  r[2] = C1 * C2 * C3 + C1 * C5 - C1 * C1 * C4 - C3 * C3;
  // line 4: C1C2C3C4 + C2C6(C1^2 + C3) + C1C5(C4 + C5) - C1^2C4^2 - C1C3C6 - C3^2C4 - C4^2 > 0
  r[3] = C1 * C2 * C3 * C4 + C2 * C6 * (C1 * C1 + C3) + C1 * C5 * (C4 + C5) - C1 * C1 * C4 * C4 -
         C1 * C3 * C6 - C3 * C3 * C4 - C4 * C4;
  // line 5: C1C2C3C4C5 + (C1^2C2 - C2C3 + C1C3)C5C6 + (C3C2 + C1C4 - C1C2^2 - C5)C5^2
  //         - (C1C2C6 + C4C5)C3^2 > 0
  r[4] = C1 * C2 * C3 * C4 * C5 + (C1 * C1 * C2 - C2 * C3 + C1 * C3) * C5 * C6 +
         (C3 * C2 + C1 * C4 - C1 * C2 * C2 - C5) * C5 * C5 - (C1 * C2 * C6 + C4 * C5) * C3 * C3;
  // line 6: C1C2C3C4C5C6 + (C1C4^2 - C1^2C4^2 - C3^2C4)C5C6 + C2C3C5^2C6 - C1C2C3^2C6^2
  //         - C1C3C5C6^2 - C5^3C6 > 0
  r[5] = C1 * C2 * C3 * C4 * C5 * C6 + (C1 * C4 * C4 - C1 * C1 * C4 * C4 - C3 * C3 * C4) * C5 * C6 +
         C2 * C3 * C5 * C5 * C6 - C1 * C2 * C3 * C3 * C6 * C6 - C1 * C3 * C5 * C6 * C6 - C5 * C5 * C5 * C6;
  return r;
}

template std::array<double, 6> hurwitz_determinants(const std::array<double, 6>&);
template std::array<long double, 6> hurwitz_determinants(const std::array<long double, 6>&);
template std::array<double, 6> printed_stability_conditions(const std::array<double, 6>&);
template std::array<long double, 6> printed_stability_conditions(const std::array<long double, 6>&);

std::vector<cplx> eigenvalues(const FluctuationMatrix& fm) {
  Eigen::ComplexEigenSolver<Matrix6c> solver(fm.entries, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError(NumericalError::Kind::no_convergence, "eigenvalues: QR iteration did not converge");
  }
  std::vector<cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + 6);
  for (const cplx& z : ev) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericalError(NumericalError::Kind::nonfinite, "eigenvalues: non-finite eigenvalue");
    }
  }
  std::sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

double eigen_max_real(const FluctuationMatrix& fm) {
  const auto ev = eigenvalues(fm);
  double m = ev.front().real();
  for (const cplx& z : ev) m = std::max(m, z.real());
  return m;
}

StabilityReport analyze_stability(const SystemParams& sp, const SteadyState& ss) {
  StabilityReport r;
  const FluctuationMatrix fm = fluctuation_matrix(sp, ss);
  r.poly = char_poly_coeffs(fm);

  std::array<long double, 6> scaled{}, physical{};
  for (std::size_t k = 0; k < 6; ++k) {
    scaled[k] = r.poly.scaled[k];
    physical[k] = r.poly.coeffs[k];
  }
  const auto h = hurwitz_determinants(scaled);
  const auto p = printed_stability_conditions(physical);
  r.rh_stable = true;
  r.printed_stable = true;
  for (std::size_t k = 0; k < 6; ++k) {
    r.rh[k] = static_cast<double>(h[k]);
    r.rh_pass[k] = h[k] > 0.0L;
    r.rh_stable = r.rh_stable && r.rh_pass[k];
    r.rh_printed[k] = static_cast<double>(p[k]);
    r.printed_stable = r.printed_stable && p[k] > 0.0L;
  }

  r.spectrum = eigenvalues(fm);
  r.max_re_eig = r.spectrum.front().real();
  for (const cplx& z : r.spectrum) r.max_re_eig = std::max(r.max_re_eig, z.real());
  r.stable = r.max_re_eig < 0.0;
  r.marginal = std::abs(r.max_re_eig) <= 1e-6 * sp.kappa;
  r.method_agreement = r.rh_stable == r.stable;

  const Matrix6c printed = printed_fluctuation_matrix(sp, ss);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const cplx a = fm.entries(i, j), b = printed(i, j);
      if (std::abs(a - b) > 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300})) {
        r.printed_matrix_diff.push_back({i, j, a, b});
      }
    }
  }
  return r;
}

nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json j;
  j["stable"] = r.stable;
  j["max_re_eig"] = r.max_re_eig;
  j["rh"] = r.rh;
  j["agreement"] = r.method_agreement;
  j["marginal"] = r.marginal;
  j["rh_stable"] = r.rh_stable;
  j["rh_scale"] = r.poly.scale;
  j["char_coeffs"] = r.poly.coeffs;
  j["rh_printed"] = r.rh_printed;
  j["printed_verdict"] = r.printed_stable;
  auto& ev = j["eigenvalues"] = nlohmann::json::array();
  for (const cplx& z : r.spectrum) ev.push_back({z.real(), z.imag()});
  auto& diff = j["printed_matrix_diff"] = nlohmann::json::array();
  for (const auto& d : r.printed_matrix_diff) {
    diff.push_back({{"row", d.row},
                    {"col", d.col},
                    {"derived", {d.derived.real(), d.derived.imag()}},
                    {"printed", {d.printed.real(), d.printed.imag()}}});
  }
  return j;
}

}  // namespace omit
