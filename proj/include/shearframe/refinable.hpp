#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pseudospline.hpp"
#include "trigpoly.hpp"

namespace shearframe {

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

/// B̂_m(ξ) = e^{-imξ/2} (sin(ξ/2)/(ξ/2))^m, the transform of the B-spline of
/// order m supported on [0, m] (integer-shift mask 2^{-m}(1 + e^{-iξ})^m).
inline std::complex<double> bspline_fourier(int m, double xi) {
  if (m < 1) throw std::invalid_argument("B-spline order must be >= 1");
  const double phase = -0.5 * m * std::remainder(xi, 4.0 * pi);
  // e^{-imξ/2} has period 4π/m in ξ; reducing ξ mod 4π keeps it exact.
  return std::polar(std::pow(sinc(0.5 * xi), m), phase);
}

/// d/dξ B̂_m(ξ), closed form.
inline std::complex<double> bspline_fourier_derivative(int m, double xi) {
  const double h = 0.5 * xi;
  const double s = sinc(h);
  // d/dξ sinc(ξ/2) = (cos(ξ/2) - sinc(ξ/2)) / ξ, with the series near 0.
  const double ds = (std::abs(xi) < 1e-4) ? -xi / 12.0 : (std::cos(h) - s) / xi;
  const std::complex<double> e = std::polar(1.0, -0.5 * m * std::remainder(xi, 4.0 * pi));
  const double sm1 = std::pow(s, m - 1);
  return e * (std::complex<double>(0.0, -0.5 * m) * sm1 * s + static_cast<double>(m) * sm1 * ds);
}

/// Fourier transform of a refinable function, φ̂(ξ) = Π_{j≥1} â(2^{-j}ξ),
/// by a truncated product whose omitted tail is certified.
///
/// The tail certificate uses |1 - â(ξ)| ≤ C |ξ|^p near the origin:
///   - type-II order (N, l): C = C1, p = 2l + 2;
///   - general TrigPoly mask with â(0) = 1: C = Σ|k||c_k|, p = 1.
/// Depth D is the smallest with Σ_{j>D} C|2^{-j}ξ|^p ≤ tail_tolerance and every
/// omitted factor within 1/2 of 1, so the omitted product is within
/// exp(±2·tail_tolerance) of 1.
class RefinableEvaluator {
 public:
  using Mask = std::variant<TrigPoly, MaskOrder>;

  explicit RefinableEvaluator(Mask mask, double tail_tolerance = 1e-12, int depth_cap = 64)
      : mask_(std::move(mask)), tail_tolerance_(tail_tolerance), depth_cap_(depth_cap) {
    if (!(tail_tolerance > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
    if (depth_cap < 1) throw std::invalid_argument("depth cap must be positive");
    if (const auto* order = std::get_if<MaskOrder>(&mask_)) {
      tail_c_ = constants(*order).C1;
      tail_p_ = 2.0 * order->l() + 2.0;
    } else {
      const auto& p = std::get<TrigPoly>(mask_);
      if (std::abs(p(0.0) - 1.0) > 1e-12) throw std::invalid_argument("mask must satisfy a(0) = 1");
      tail_c_ = p.first_moment_bound();
      tail_p_ = 1.0;
    }
  }

  [[nodiscard]] const Mask& mask() const { return mask_; }
  [[nodiscard]] double tail_tolerance() const { return tail_tolerance_; }
  [[nodiscard]] int depth_cap() const { return depth_cap_; }

  [[nodiscard]] std::complex<double> mask_value(double xi) const {
    if (const auto* order = std::get_if<MaskOrder>(&mask_)) return {mask_eval(*order, xi), 0.0};
    return std::get<TrigPoly>(mask_)(xi);
  }

  /// Bound on Σ_{j>D} C|2^{-j}ξ|^p.
  [[nodiscard]] double tail_bound(double xi, int depth) const {
    const double r = std::pow(2.0, -tail_p_);
    const double first = tail_c_ * std::pow(std::ldexp(std::abs(xi), -(depth + 1)), tail_p_);
    return first / (1.0 - r);
  }

  /// Smallest admissible depth for ξ; throws when it exceeds the cap.
  [[nodiscard]] int depth_for(double xi) const {
    if (xi == 0.0) return 0;
    for (int d = 0; d <= depth_cap_; ++d) {
      const double first = tail_c_ * std::pow(std::ldexp(std::abs(xi), -(d + 1)), tail_p_);
      if (first <= 0.5 && tail_bound(xi, d) <= tail_tolerance_) return d;
    }
    throw std::runtime_error("refinable product: no admissible truncation depth under the cap");
  }

  /// Π_{j=1}^{D} â(2^{-j}ξ) for an explicit depth D.
  [[nodiscard]] std::complex<double> at_depth(double xi, int depth) const {
    std::complex<double> acc{1.0, 0.0};
    for (int j = 1; j <= depth; ++j) acc *= mask_value(std::ldexp(xi, -j));
    return acc;
  }

  [[nodiscard]] std::complex<double> operator()(double xi) const {
    return at_depth(xi, depth_for(xi));
  }

 private:
  Mask mask_;
  double tail_tolerance_;
  int depth_cap_;
  double tail_c_ = 0.0;
  double tail_p_ = 1.0;
};

inline std::complex<double> phi_hat(const RefinableEvaluator& ev, double xi) { return ev(xi); }

/// Sampled check of  C4 ≤ |φ̂| on [-K, K]  and
/// |φ̂(ξ)| ≤ min{1, C3 |ξ|^{-2N + log2(q1^{1/(J-1)} q2)}} on [-2^{10}π, 2^{10}π].
struct SandwichReport {
  BoundConstants constants;
  BoundCheck lower;
  BoundCheck upper;
  double max_abs = 0.0;  ///< sup |φ̂| over all sampled points
};

/// Frequencies ±2^n·2π/3 inside [0, limit]: the dyadic orbit on which the
/// distribution factor attains |𝓛(2π/3)| at every step, so |φ̂| sits on its
/// decay envelope there.
inline std::vector<double> envelope_points(double limit) {
  std::vector<double> pts;
  for (double x = 2.0 * pi / 3.0; x <= limit; x *= 2.0) {
    pts.push_back(x);
    pts.push_back(-x);
  }
  return pts;
}

inline SandwichReport verify_sandwich(const MaskOrder& order, double window, std::size_t grid,
                                      int J = 10) {
  if (window > pi) throw std::invalid_argument("verify_sandwich: window must not exceed pi");
  SandwichReport rep;
  rep.constants = constants(order, J, window);
  const RefinableEvaluator ev(order);
  for (double xi : uniform_grid(-window, window, grid)) {
    const double v = std::abs(ev(xi));
    rep.max_abs = std::max(rep.max_abs, v);
    rep.lower.record(xi, rep.constants.C4 - v);
  }
  const double span = std::ldexp(pi, 10);
  auto upper_at = [&](double xi) {
    const double v = std::abs(ev(xi));
    rep.max_abs = std::max(rep.max_abs, v);
    const double ax = std::abs(xi);
    const double bound =
        ax == 0.0 ? 1.0 : std::min(1.0, rep.constants.C3 * std::pow(ax, rep.constants.upper_exponent));
    rep.upper.record(xi, v - bound);
  };
  for (double xi : uniform_grid(-span, span, grid)) upper_at(xi);
  for (double xi : envelope_points(span)) upper_at(xi);
  return rep;
}

/// Least-squares slope of log|φ̂| against log|ξ| over the envelope orbit
/// inside [lo, hi].
inline double envelope_decay_slope(const MaskOrder& order, double lo = 16.0, double hi = 1024.0) {
  const RefinableEvaluator ev(order);
  std::vector<double> xs;
  std::vector<double> ys;
  for (double x : envelope_points(hi)) {
    if (x < lo) continue;
    xs.push_back(std::log(x));
    ys.push_back(std::log(std::abs(ev(x))));
  }
  if (xs.size() < 2) throw std::invalid_argument("envelope_decay_slope: range too narrow");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace shearframe
