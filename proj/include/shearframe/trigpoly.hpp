#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace shearframe {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Laurent polynomial with integer numerators over a common power-of-two
/// denominator. Masks built from binomials live here until they are turned
/// into a TrigPoly, so construction never rounds.
struct DyadicPoly {
  int k_min = 0;
  std::vector<std::int64_t> num;
  int log2_den = 0;
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("dyadic coefficient overflow");
  }
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("dyadic coefficient overflow");
  }
  return r;
}

// Doubles hold integers exactly up to 2^53.
inline void require_exact_in_double(std::int64_t v) {
  constexpr std::int64_t limit = std::int64_t{1} << 53;
  if (v > limit || v < -limit) {
    throw std::overflow_error("dyadic coefficient exceeds 2^53");
  }
}

}  // namespace detail

inline DyadicPoly multiply(const DyadicPoly& a, const DyadicPoly& b) {
  DyadicPoly r;
  if (a.num.empty() || b.num.empty()) return r;
  r.k_min = a.k_min + b.k_min;
  r.log2_den = a.log2_den + b.log2_den;
  r.num.assign(a.num.size() + b.num.size() - 1, 0);
  for (std::size_t i = 0; i < a.num.size(); ++i) {
    for (std::size_t j = 0; j < b.num.size(); ++j) {
      r.num[i + j] =
          detail::checked_add(r.num[i + j], detail::checked_mul(a.num[i], b.num[j]));
    }
  }
  return r;
}

inline DyadicPoly power(const DyadicPoly& a, int n) {
  if (n < 0) throw std::invalid_argument("negative polynomial power");
  DyadicPoly r{0, {1}, 0};
  for (int i = 0; i < n; ++i) r = multiply(r, a);
  return r;
}

/// Sum over a common denominator (the larger of the two).
inline DyadicPoly add(const DyadicPoly& a, const DyadicPoly& b) {
  if (a.num.empty()) return b;
  if (b.num.empty()) return a;
  const int den = std::max(a.log2_den, b.log2_den);
  const int lo = std::min(a.k_min, b.k_min);
  const int hi = std::max(a.k_min + static_cast<int>(a.num.size()),
                          b.k_min + static_cast<int>(b.num.size()));
  DyadicPoly r{lo, std::vector<std::int64_t>(static_cast<std::size_t>(hi - lo), 0), den};
  auto accumulate = [&](const DyadicPoly& p) {
    const std::int64_t scale = std::int64_t{1} << (den - p.log2_den);
    for (std::size_t i = 0; i < p.num.size(); ++i) {
      auto& slot = r.num[static_cast<std::size_t>(p.k_min - lo) + i];
      slot = detail::checked_add(slot, detail::checked_mul(p.num[i], scale));
    }
  };
  accumulate(a);
  accumulate(b);
  return r;
}

inline DyadicPoly scale(const DyadicPoly& a, std::int64_t factor) {
  DyadicPoly r = a;
  for (auto& v : r.num) v = detail::checked_mul(v, factor);
  return r;
}

/// 2π-periodic trigonometric polynomial  p(ξ) = Σ_k c_k e^{-ikξ}.
///
/// Coefficients are stored densely on [k_min, k_max]; the end coefficients are
/// always nonzero (an all-zero polynomial is empty).
class TrigPoly {
 public:
  TrigPoly() = default;

  TrigPoly(int k_min, std::vector<std::complex<double>> coeffs)
      : k_min_(k_min), coeffs_(std::move(coeffs)) {
    trim();
  }

  static TrigPoly from_dyadic(const DyadicPoly& d) {
    std::vector<std::complex<double>> c;
    c.reserve(d.num.size());
    const double den = std::ldexp(1.0, d.log2_den);
    for (auto v : d.num) {
      detail::require_exact_in_double(v);
      c.emplace_back(static_cast<double>(v) / den, 0.0);
    }
    return TrigPoly(d.k_min, std::move(c));
  }

  [[nodiscard]] bool empty() const { return coeffs_.empty(); }
  [[nodiscard]] int k_min() const { return k_min_; }
  [[nodiscard]] int k_max() const { return k_min_ + static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] std::span<const std::complex<double>> coeffs() const { return coeffs_; }

  [[nodiscard]] std::complex<double> coeff(int k) const {
    if (empty() || k < k_min() || k > k_max()) return {0.0, 0.0};
    return coeffs_[static_cast<std::size_t>(k - k_min_)];
  }

  /// Σ_k c_k e^{-ikξ}, Horner in z = e^{-iξ} after reducing ξ to [-π, π].
  [[nodiscard]] std::complex<double> operator()(double xi) const {
    if (empty()) return {0.0, 0.0};
    const double t = std::remainder(xi, two_pi);
    const std::complex<double> z = std::polar(1.0, -t);
    std::complex<double> acc{0.0, 0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc * std::polar(1.0, -static_cast<double>(k_min_) * t);
  }

  /// Σ_k |k|·|c_k|, the Lipschitz constant of p at the origin direction:
  /// |p(ξ) - p(0)| ≤ (Σ|k||c_k|)·|ξ|.
  [[nodiscard]] double first_moment_bound() const {
    double s = 0.0;
    for (int k = k_min(); k <= k_max(); ++k) s += std::abs(k) * std::abs(coeff(k));
    return s;
  }

 private:
  void trim() {
    std::size_t lo = 0;
    while (lo < coeffs_.size() && coeffs_[lo] == std::complex<double>{}) ++lo;
    if (lo == coeffs_.size()) {
      coeffs_.clear();
      k_min_ = 0;
      return;
    }
    std::size_t hi = coeffs_.size();
    while (coeffs_[hi - 1] == std::complex<double>{}) --hi;
    coeffs_ = std::vector<std::complex<double>>(coeffs_.begin() + static_cast<std::ptrdiff_t>(lo),
                                                coeffs_.begin() + static_cast<std::ptrdiff_t>(hi));
    k_min_ += static_cast<int>(lo);
  }

  int k_min_ = 0;
  std::vector<std::complex<double>> coeffs_;
};

inline std::complex<double> eval(const TrigPoly& p, double xi) { return p(xi); }

/// 2^{-N}(1 + e^{-iξ})^N, coefficients 2^{-N}·C(N,k) at k = 0..N.
inline DyadicPoly bspline_mask_dyadic(int n) {
  if (n < 1) throw std::invalid_argument("B-spline mask order must be >= 1");
  return power(DyadicPoly{0, {1, 1}, 1}, n);
}

inline TrigPoly bspline_mask(int n) { return TrigPoly::from_dyadic(bspline_mask_dyadic(n)); }

/// b̂(ξ) = e^{-iξ}·conj(â(ξ+π)), i.e. b_k = conj(a_{1-k})·(-1)^{1-k}.
inline TrigPoly highpass_from_lowpass(const TrigPoly& a) {
  if (a.empty()) throw std::invalid_argument("highpass of an empty mask");
  const int lo = 1 - a.k_max();
  const int hi = 1 - a.k_min();
  std::vector<std::complex<double>> c;
  c.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int m = lo; m <= hi; ++m) {
    const int k = 1 - m;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c.push_back(std::conj(a.coeff(k)) * sign);
  }
  return TrigPoly(lo, std::move(c));
}

/// CSV rows `k,re,im`, one per stored coefficient.
inline void write_csv(std::ostream& os, const TrigPoly& p) {
  os << "k,re,im\n";
  const auto old = os.precision(17);
  for (int k = p.k_min(); k <= p.k_max() && !p.empty(); ++k) {
    os << k << ',' << p.coeff(k).real() << ',' << p.coeff(k).imag() << '\n';
  }
  os.precision(old);
}

}  // namespace shearframe
