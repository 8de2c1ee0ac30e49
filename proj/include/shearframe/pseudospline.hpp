#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "trigpoly.hpp"

namespace shearframe {

/// Exact binomial coefficient; throws when the value leaves int64.
inline std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    r = detail::checked_mul(r, n - k + i) / i;
  }
  return r;
}

/// Order (N, l) of a type-II pseudo spline. l = 0 gives the B-spline of
/// order 2N; l = N - 1 the interpolatory refinable function.
class MaskOrder {
 public:
  static constexpr int max_n = 32;

  MaskOrder(int n, int l) : n_(n), l_(l) {
    if (n < 1) throw std::invalid_argument("pseudo-spline order N must be >= 1");
    if (n > max_n) throw std::invalid_argument("pseudo-spline order N must be <= 32");
    if (l < 0 || l >= n) throw std::invalid_argument("pseudo-spline order needs 0 <= l < N");
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int l() const { return l_; }

  friend bool operator==(const MaskOrder&, const MaskOrder&) = default;

 private:
  int n_;
  int l_;
};

inline std::string to_string(const MaskOrder& o) {
  return "(" + std::to_string(o.n()) + "," + std::to_string(o.l()) + ")";
}

/// P_{N,l}(x) = Σ_{j=0}^{l} C(N-1+j, j) x^j for x in [0, 1].
inline double p_poly(const MaskOrder& order, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("p_poly argument outside [0,1]");
  double acc = 0.0;
  for (int j = order.l(); j >= 0; --j) {
    acc = acc * x + static_cast<double>(binomial(order.n() - 1 + j, j));
  }
  return acc;
}

namespace detail {

struct HalfAngle {
  double s2;  // sin^2(ξ/2)
  double c2;  // cos^2(ξ/2)
};

// sin^2 and cos^2 of ξ/2 computed from the reduced angle; they sum to 1 up to
// rounding and each is clamped into [0, 1].
inline HalfAngle half_angle(double xi) {
  const double t = std::remainder(xi, two_pi) / 2.0;
  const double s = std::sin(t);
  const double c = std::cos(t);
  return {std::clamp(s * s, 0.0, 1.0), std::clamp(c * c, 0.0, 1.0)};
}

}  // namespace detail

/// Type-II mask cos^{2N}(ξ/2)·P_{N,l}(sin^2(ξ/2)); real, in [0, 1].
inline double mask_eval(const MaskOrder& order, double xi) {
  const auto h = detail::half_angle(xi);
  // Mathematically at most 1; clamp the last-ulp excess near ξ = 0.
  return std::min(1.0, std::pow(h.c2, order.n()) * p_poly(order, h.s2));
}

/// |𝓛(ξ)| = P_{N,l}(sin^2(ξ/2)), the factor left after removing cos^{2N}.
inline double distribution_factor(const MaskOrder& order, double xi) {
  return p_poly(order, detail::half_angle(xi).s2);
}

/// |LHS - RHS| of
///   Σ_{j≤l} C(N-1+j, j) s^j  =  Σ_{j≤l} C(N+l, j) s^j c^{l-j},
/// with s = sin^2(ξ/2), c = cos^2(ξ/2). Evaluated in extended precision.
inline double identity_residual(const MaskOrder& order, double xi) {
  const long double t = std::remainder(static_cast<long double>(xi), 2.0L * std::numbers::pi_v<long double>) / 2.0L;
  const long double s = std::sin(t) * std::sin(t);
  const long double c = std::cos(t) * std::cos(t);
  const int n = order.n();
  const int l = order.l();
  long double lhs = 0.0L;
  long double rhs = 0.0L;
  for (int j = 0; j <= l; ++j) {
    lhs += static_cast<long double>(binomial(n - 1 + j, j)) * std::pow(s, j);
    rhs += static_cast<long double>(binomial(n + l, j)) * std::pow(s, j) * std::pow(c, l - j);
  }
  return static_cast<double>(std::fabs(lhs - rhs));
}

/// Coefficient-level type-II mask, expanded through
/// cos^2(ξ/2) = (2 + e^{iξ} + e^{-iξ})/4 and sin^2(ξ/2) = (2 - e^{iξ} - e^{-iξ})/4.
/// Symmetric, supported on [-(N+l), N+l].
inline TrigPoly type2_mask(const MaskOrder& order) {
  const DyadicPoly cos2{-1, {1, 2, 1}, 2};
  const DyadicPoly sin2{-1, {-1, 2, -1}, 2};
  const DyadicPoly base = power(cos2, order.n());
  DyadicPoly acc;
  DyadicPoly sin_pow{0, {1}, 0};
  for (int j = 0; j <= order.l(); ++j) {
    acc = add(acc, scale(multiply(base, sin_pow), binomial(order.n() - 1 + j, j)));
    sin_pow = multiply(sin_pow, sin2);
  }
  return TrigPoly::from_dyadic(acc);
}

/// |â_I(ξ)| for the type-I mask, which only exists here through
/// |â_I(ξ)|^2 = â_II(ξ).
inline double type1_mask_modulus(const MaskOrder& order, double xi) {
  return std::sqrt(mask_eval(order, xi));
}

/// Explicit constants attached to a type-II order.
struct BoundConstants {
  double C1 = 0.0;     ///< 1 - â(ξ) ≤ C1 |ξ|^{2l+2}
  double C2 = 0.0;     ///< |𝓛(ξ)| ≤ 1 + C2 ξ^2
  double Cb = 0.0;     ///< |b̂(ξ)| ≤ min{1, Cb |ξ|^{2N}}
  double q1 = 0.0;     ///< sup_{|ξ|≤π} |𝓛| = P(1)
  double q2 = 0.0;     ///< |𝓛(2π/3)| = P(3/4)
  double kappa = 0.0;  ///< log2 q2
  double beta = 0.0;   ///< 2N - κ
  int J = 10;
  double C3 = 0.0;              ///< 4^N exp(C2/3) q1 q2^{J-1}
  double upper_exponent = 0.0;  ///< -2N + log2(q1^{1/(J-1)} q2)
  double K = pi;                ///< window [-K, K] used for C4
  int k0 = 1;
  double C4 = 0.0;  ///< |φ̂| ≥ C4 on [-K, K]
};

inline double decay_rate(const MaskOrder& order) {
  return 2.0 * order.n() - std::log2(p_poly(order, 0.75));
}

/// C4 for the window [-K, K]:
///   Π_{k=1}^{k0} â(2^{-k}K) · exp(-C1 2^{-k0+1} K^{2l+2}),
/// with k0 the smallest positive integer such that 2^{-k0} C1 K^{2l+2} < 1/2.
inline std::pair<int, double> window_constant(const MaskOrder& order, double c1, double window) {
  const double p = 2.0 * order.l() + 2.0;
  const double kp = std::pow(window, p);
  int k0 = 1;
  while (std::ldexp(c1 * kp, -k0) >= 0.5) ++k0;
  double prod = 1.0;
  for (int k = 1; k <= k0; ++k) prod *= mask_eval(order, std::ldexp(window, -k));
  return {k0, prod * std::exp(-c1 * std::ldexp(kp, 1 - k0))};
}

inline BoundConstants constants(const MaskOrder& order, int J = 10, double window = pi) {
  if (J < 2) throw std::invalid_argument("constants: J must be >= 2");
  if (!(window > 0.0)) throw std::invalid_argument("constants: window K must be positive");
  if (window > pi) throw std::invalid_argument("constants: window K must not exceed pi");
  const int n = order.n();
  const int l = order.l();
  BoundConstants b;
  double s1 = 0.0;
  for (int j = l + 1; j <= n + l; ++j) s1 += static_cast<double>(binomial(n + l, j));
  b.C1 = std::ldexp(s1, -(2 * l + 2));
  double s2 = 0.0;
  for (int j = 1; j <= l; ++j) s2 += static_cast<double>(binomial(n - 1 + j, j));
  b.C2 = s2 / 4.0;
  double sb = 0.0;
  for (int j = 0; j <= l; ++j) sb += static_cast<double>(binomial(n + l, j));
  b.Cb = std::ldexp(sb, -2 * n);
  b.q1 = p_poly(order, 1.0);
  b.q2 = p_poly(order, 0.75);
  b.kappa = std::log2(b.q2);
  b.beta = 2.0 * n - b.kappa;
  b.J = J;
  b.C3 = std::pow(4.0, n) * std::exp(b.C2 / 3.0) * b.q1 * std::pow(b.q2, J - 1);
  b.upper_exponent = -2.0 * n + std::log2(std::pow(b.q1, 1.0 / (J - 1)) * b.q2);
  b.K = window;
  std::tie(b.k0, b.C4) = window_constant(order, b.C1, window);
  return b;
}

/// Worst case of a sampled inequality: max(lhs - rhs, 0) and where it occurs.
struct BoundCheck {
  double max_violation = 0.0;
  double worst_xi = 0.0;
  std::size_t points = 0;

  void record(double xi, double excess) {
    ++points;
    if (excess > max_violation) {
      max_violation = excess;
      worst_xi = xi;
    }
  }
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

inline constexpr std::size_t default_grid = 2048;

/// 1 - â(ξ) ≤ C1 |ξ|^{2l+2} on [-π, π].
inline BoundCheck check_lemma1(const MaskOrder& order, std::size_t grid = default_grid) {
  const auto b = constants(order);
  BoundCheck r;
  for (double xi : uniform_grid(-pi, pi, grid)) {
    r.record(xi, (1.0 - mask_eval(order, xi)) - b.C1 * std::pow(std::abs(xi), 2 * order.l() + 2));
  }
  return r;
}

/// |𝓛(ξ)| ≤ 1 + C2 ξ^2 on [-π, π].
inline BoundCheck check_lemma2(const MaskOrder& order, std::size_t grid = default_grid) {
  const auto b = constants(order);
  BoundCheck r;
  for (double xi : uniform_grid(-pi, pi, grid)) {
    r.record(xi, distribution_factor(order, xi) - (1.0 + b.C2 * xi * xi));
  }
  return r;
}

/// |b̂(a)|·χ_{a≤|ξ|≤b}(ξ) ≤ |b̂(ξ)| ≤ min{1, Cb|ξ|^{2N}} on [-π, π] for
/// each sampled pair 0 ≤ a < b ≤ π, with b̂ the coefficient-level highpass of
/// the expanded type-II mask.
inline BoundCheck check_lemma3(const MaskOrder& order, std::size_t grid = default_grid,
                               std::size_t pairs = 16) {
  const auto b = constants(order);
  const TrigPoly hp = highpass_from_lowpass(type2_mask(order));
  const auto xs = uniform_grid(-pi, pi, grid);
  std::vector<double> mod(xs.size());
  BoundCheck r;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mod[i] = std::abs(hp(xs[i]));
    const double upper = std::min(1.0, b.Cb * std::pow(std::abs(xs[i]), 2 * order.n()));
    r.record(xs[i], mod[i] - upper);
  }
  const auto ends = uniform_grid(0.0, pi, pairs + 1);
  for (std::size_t ia = 0; ia < ends.size(); ++ia) {
    for (std::size_t ib = ia + 1; ib < ends.size(); ++ib) {
      const double lower = std::abs(hp(ends[ia]));
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double ax = std::abs(xs[i]);
        if (ax >= ends[ia] && ax <= ends[ib]) r.record(xs[i], lower - mod[i]);
      }
    }
  }
  return r;
}

/// |𝓛(ξ)| ≤ |𝓛(2π/3)| for |ξ| ≤ 2π/3 and |𝓛(ξ)𝓛(2ξ)| ≤ |𝓛(2π/3)|^2 for
/// 2π/3 ≤ |ξ| ≤ π.
inline BoundCheck check_distribution_bounds(const MaskOrder& order,
                                            std::size_t grid = default_grid) {
  const double q2 = distribution_factor(order, 2.0 * pi / 3.0);
  BoundCheck r;
  for (double xi : uniform_grid(-pi, pi, grid)) {
    const double ax = std::abs(xi);
    if (ax <= 2.0 * pi / 3.0) r.record(xi, distribution_factor(order, xi) - q2);
    if (ax >= 2.0 * pi / 3.0) {
      r.record(xi, distribution_factor(order, xi) * distribution_factor(order, 2.0 * xi) - q2 * q2);
    }
  }
  return r;
}

struct Table1Row {
  int n;
  int l;
  double beta;
};

/// β_{N,l} for 2 ≤ N ≤ 9, 0 ≤ l < N, ordered by N then l.
inline std::vector<Table1Row> table1_rows(int n_min = 2, int n_max = 9) {
  std::vector<Table1Row> rows;
  for (int n = n_min; n <= n_max; ++n) {
    for (int l = 0; l < n; ++l) rows.push_back({n, l, decay_rate(MaskOrder(n, l))});
  }
  return rows;
}

}  // namespace shearframe
