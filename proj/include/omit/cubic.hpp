#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace omit {

template <class T>
struct RealRoots {
  std::vector<T> roots;  // ascending
  bool fold = false;     // two or more roots merged as a near-double root
};

namespace detail {

template <class T>
T polish_cubic_root(T a3, T a2, T a1, T a0, T x) {
  const T f = ((a3 * x + a2) * x + a1) * x + a0;
  const T df = (T(3) * a3 * x + T(2) * a2) * x + a1;
  if (df == T(0) || !std::isfinite(f / df)) return x;
  const T y = x - f / df;
  const T fy = ((a3 * y + a2) * y + a1) * y + a0;
  return std::abs(fy) <= std::abs(f) ? y : x;
}

template <class T>
void merge_close(RealRoots<T>& out, T merge_rel) {
  std::sort(out.roots.begin(), out.roots.end());
  std::vector<T> merged;
  for (T r : out.roots) {
    if (!merged.empty()) {
      const T scale = std::max(std::abs(r), std::abs(merged.back()));
      if (std::abs(r - merged.back()) <= merge_rel * scale) {
        merged.back() = (merged.back() + r) / T(2);
        out.fold = true;
        continue;
      }
    }
    merged.push_back(r);
  }
  out.roots = std::move(merged);
}

}  // namespace detail

/// Real roots of a3 x^3 + a2 x^2 + a1 x + a0 = 0.
///
/// Closed form: trigonometric branch for three real roots, Cardano otherwise,
/// each root polished by one Newton step. Degenerate leading coefficients fall
/// back to the quadratic/linear formula. Roots closer than `merge_rel`
/// (relative) are merged and flagged as a fold.
template <class T>
RealRoots<T> real_cubic_roots(T a3, T a2, T a1, T a0, T merge_rel = T(1e-6)) {
  RealRoots<T> out;
  if (a3 == T(0)) {
    if (a2 == T(0)) {
      if (a1 != T(0)) out.roots.push_back(-a0 / a1);
      return out;
    }
    const T disc = a1 * a1 - T(4) * a2 * a0;
    if (disc < T(0)) return out;
    // Cancellation-free quadratic roots.
    const T q = T(-0.5) * (a1 + std::copysign(std::sqrt(disc), a1));
    if (q != T(0)) {
      out.roots.push_back(q / a2);
      out.roots.push_back(a0 / q);
    } else {
      out.roots.push_back(T(0));
      out.roots.push_back(T(0));
    }
    detail::merge_close(out, merge_rel);
    return out;
  }

  // Monic x^3 + a x^2 + b x + c.
  const T a = a2 / a3, b = a1 / a3, c = a0 / a3;
  const T q = (a * a - T(3) * b) / T(9);
  const T r = (a * (T(2) * a * a - T(9) * b) + T(27) * c) / T(54);
  const T q3 = q * q * q;
  const T shift = a / T(3);

  if (r * r < q3) {
    const T t = std::acos(std::clamp(r / std::sqrt(q3), T(-1), T(1)));
    const T m = T(-2) * std::sqrt(q);
    const T pi = std::numbers::pi_v<T>;
    out.roots = {m * std::cos(t / T(3)) - shift, m * std::cos((t + T(2) * pi) / T(3)) - shift,
                 m * std::cos((t - T(2) * pi) / T(3)) - shift};
  } else {
    const T u = -std::cbrt(r + std::copysign(std::sqrt(r * r - q3), r));
    const T v = (u == T(0)) ? T(0) : q / u;
    out.roots.push_back(u + v - shift);
    // Complex pair -(u+v)/2 +- i sqrt(3)/2 (u-v) becomes a double real root at the discriminant boundary.
    const T imag = std::sqrt(T(3)) / T(2) * std::abs(u - v);
    const T scale = std::max({std::abs(u), std::abs(v), std::abs(shift), T(1e-300)});
    if (imag <= merge_rel * scale) {
      out.roots.push_back(T(-0.5) * (u + v) - shift);
      out.fold = true;
    }
  }
  for (T& x : out.roots) x = detail::polish_cubic_root(a3, a2, a1, a0, x);
  detail::merge_close(out, merge_rel);
  return out;
}

}  // namespace omit
