#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "parallel.hpp"
#include "pseudospline.hpp"
#include "refinable.hpp"
#include "trigpoly.hpp"

namespace shearframe {

/// Point of the frequency plane.
struct Freq {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Freq operator+(Freq a, Freq b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Freq operator-(Freq a, Freq b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Freq operator-(Freq a) { return {-a.x1, -a.x2}; }
  friend bool operator==(const Freq&, const Freq&) = default;
};

inline Freq swapped(Freq f) { return {f.x2, f.x1}; }

/// ψ̂(2ξ) = 2^{-N1} e^{-iξ1}(1 - e^{-iξ1})^{N1} B̂_{N2}(ξ1) B̂_{N2}(ξ2).
struct BSplineGenerator {
  int n1;
  int n2;
};

/// ψ̂(2ξ) = b̂(ξ1) φ̂(ξ1) φ̂(ξ2), b̂ the highpass of the type-II mask of order
/// `wavelet`, φ̂ the type-II pseudo spline of order `scaling`.
struct PseudoGenerator {
  MaskOrder wavelet;
  MaskOrder scaling;
};

using Generator = std::variant<BSplineGenerator, PseudoGenerator>;

struct ShearSystemConfig {
  Generator generator = BSplineGenerator{4, 3};
  double alpha = pi / 4.0;
  int j_max = 20;
  double c1 = 1.0;
  double c2 = 1.0;

  /// Structural checks only; which frame theorems apply is reported by
  /// hypotheses() so that Example 1 (N2 = 3) stays constructible.
  void validate() const {
    if (!(alpha > 0.0 && alpha < pi / 2.0)) throw std::invalid_argument("alpha must lie in (0, pi/2)");
    if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");
    if (!(c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("sampling constants must be positive");
    if (c2 > c1) throw std::invalid_argument("sampling constants need c2 <= c1");
    if (const auto* b = std::get_if<BSplineGenerator>(&generator)) {
      if (b->n1 < 1 || b->n2 < 1) throw std::invalid_argument("B-spline orders must be >= 1");
    }
  }
};

/// Example 1: N1 = 4, scaling B3.
inline ShearSystemConfig example1_config() { return {BSplineGenerator{4, 3}}; }
/// Example 2: N1 = 6, scaling B4.
inline ShearSystemConfig example2_config() { return {BSplineGenerator{6, 4}}; }

/// Which published hypotheses a configuration meets.
struct Hypotheses {
  bool bspline_cone_frame = false;   ///< B-spline generator with N1 > N2 > 3
  bool pseudo_cone_frame = false;    ///< type-II generator, N1 > N2 > 2 (l2 = 0) or N1 >= N2 > 2 (l2 > 0)
  bool sparsity_exponents = false;   ///< decay exponents a > 5 and g >= 4
};

/// Decay exponents (a, g) of |ψ̂(ξ)| ≤ C min{1,|ξ1|^a} min{1,|ξ1|^{-g}} min{1,|ξ2|^{-g}}.
inline std::pair<double, double> decay_exponents(const ShearSystemConfig& cfg) {
  if (const auto* b = std::get_if<BSplineGenerator>(&cfg.generator)) {
    return {static_cast<double>(b->n1), static_cast<double>(b->n2)};
  }
  const auto& p = std::get<PseudoGenerator>(cfg.generator);
  return {2.0 * p.wavelet.n(), decay_rate(p.scaling)};
}

inline Hypotheses hypotheses(const ShearSystemConfig& cfg) {
  Hypotheses h;
  if (const auto* b = std::get_if<BSplineGenerator>(&cfg.generator)) {
    h.bspline_cone_frame = b->n1 > b->n2 && b->n2 > 3;
  } else {
    const auto& p = std::get<PseudoGenerator>(cfg.generator);
    const int n1 = p.wavelet.n();
    const int n2 = p.scaling.n();
    h.pseudo_cone_frame = p.scaling.l() == 0 ? (n1 > n2 && n2 > 2) : (n1 >= n2 && n2 > 2);
  }
  const auto [a, g] = decay_exponents(cfg);
  h.sparsity_exponents = a > 5.0 && g >= 4.0;
  return h;
}

/// ⌈2^{j/2}⌉, computed in integers as the least K with K^2 >= 2^j.
inline int shear_count(int j) {
  if (j < 0 || j > 60) throw std::invalid_argument("shear_count: scale out of range");
  const std::uint64_t target = std::uint64_t{1} << j;
  auto k = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(target)));
  while (k * k < target) ++k;
  while (k > 0 && (k - 1) * (k - 1) >= target) --k;
  return static_cast<int>(k);
}

/// S_k^T A_{2^{-j}} ξ = (2^{-j} ξ1, k 2^{-j} ξ1 + 2^{-j/2} ξ2).
inline Freq warp(int j, int k, Freq xi) {
  const double e1 = std::ldexp(xi.x1, -j);
  return {e1, k * e1 + std::exp2(-0.5 * j) * xi.x2};
}

/// Inverse of warp: A_{2^j} S_{-k}^T η.
inline Freq warp_inverse(int j, int k, Freq eta) {
  return {std::ldexp(eta.x1, j), std::exp2(0.5 * j) * (eta.x2 - k * eta.x1)};
}

/// S_k Ã_{2^{-j}} ξ = (2^{-j/2} ξ1 + k 2^{-j} ξ2, 2^{-j} ξ2), used by the
/// vertical cone family.
inline Freq warp_tilde(int j, int k, Freq xi) {
  const double e2 = std::ldexp(xi.x2, -j);
  return {std::exp2(-0.5 * j) * xi.x1 + k * e2, e2};
}

enum class ConeLabel { C1, C2, C3, C4, R };

/// Four symmetric cones |ξ2| ≤ |ξ1| (C1: ξ1 ≥ α, C3: ξ1 ≤ -α) and
/// |ξ1| ≤ |ξ2| (C2: ξ2 ≥ α, C4: ξ2 ≤ -α), plus the square R(α).
struct ConeRegion {
  ConeLabel label;
  double alpha;

  [[nodiscard]] bool contains(Freq f) const {
    switch (label) {
      case ConeLabel::C1: return f.x1 >= alpha && std::abs(f.x2) <= std::abs(f.x1);
      case ConeLabel::C2: return f.x2 >= alpha && std::abs(f.x1) <= std::abs(f.x2);
      case ConeLabel::C3: return f.x1 <= -alpha && std::abs(f.x2) <= std::abs(f.x1);
      case ConeLabel::C4: return f.x2 <= -alpha && std::abs(f.x1) <= std::abs(f.x2);
      case ConeLabel::R: return std::max(std::abs(f.x1), std::abs(f.x2)) < alpha;
    }
    return false;
  }
};

inline std::vector<ConeLabel> regions_containing(Freq f, double alpha) {
  std::vector<ConeLabel> out;
  for (auto l : {ConeLabel::C1, ConeLabel::C2, ConeLabel::C3, ConeLabel::C4, ConeLabel::R}) {
    if (ConeRegion{l, alpha}.contains(f)) out.push_back(l);
  }
  return out;
}

/// Shearlet generator of a configuration: ψ̂(ξ) = b̂(ξ1/2) φ̂(ξ1/2) φ̂(ξ2/2),
/// the vertical-cone generator ψ̃(x1, x2) = ψ(x2, x1), and the separable
/// scaling function φ(x1) φ(x2).
class Shearlet {
 public:
  explicit Shearlet(ShearSystemConfig cfg)
      : cfg_(std::move(cfg)),
        highpass_(make_highpass(cfg_)),
        scaling_(make_scaling(cfg_)) {
    cfg_.validate();
    if (const auto* b = std::get_if<BSplineGenerator>(&cfg_.generator)) bspline_ = *b;
  }

  [[nodiscard]] const ShearSystemConfig& config() const { return cfg_; }
  [[nodiscard]] bool is_bspline() const { return bspline_.has_value(); }
  [[nodiscard]] const TrigPoly& highpass() const { return highpass_; }

  /// b̂(t).
  [[nodiscard]] std::complex<double> b_hat(double t) const {
    if (bspline_) {
      const std::complex<double> e = std::polar(1.0, -std::remainder(t, two_pi));
      return std::ldexp(1.0, -bspline_->n1) * e * std::pow(1.0 - e, bspline_->n1);
    }
    return highpass_(t);
  }

  /// 1D scaling transform φ̂(t).
  [[nodiscard]] std::complex<double> phi_hat_1d(double t) const {
    if (bspline_) return bspline_fourier(bspline_->n2, t);
    return scaling_(t);
  }

  [[nodiscard]] double b_abs(double t) const {
    if (bspline_) return std::pow(std::abs(std::sin(0.5 * t)), bspline_->n1);
    return std::abs(highpass_(t));
  }

  [[nodiscard]] double phi_abs_1d(double t) const {
    if (bspline_) return ipow(std::abs(sinc(0.5 * t)), bspline_->n2);
    return std::abs(scaling_(t));
  }

  /// U(t) = |b̂(t/2) φ̂(t/2)|, the ξ1 factor of |ψ̂|.
  [[nodiscard]] double wavelet_abs(double t) const { return b_abs(0.5 * t) * phi_abs_1d(0.5 * t); }
  /// V(t) = |φ̂(t/2)|, the ξ2 factor of |ψ̂|.
  [[nodiscard]] double lowpass_abs(double t) const { return phi_abs_1d(0.5 * t); }

  /// ψ̂(ξ). B-spline generators use the closed form; pseudo-spline generators
  /// the coefficient-level highpass times refinable products.
  [[nodiscard]] std::complex<double> psi_hat(Freq xi) const {
    return b_hat(0.5 * xi.x1) * phi_hat_1d(0.5 * xi.x1) * phi_hat_1d(0.5 * xi.x2);
  }

  /// ψ̂(ξ) through the coefficient-level highpass of the lowpass mask and the
  /// truncated refinable product, independent of any closed form.
  [[nodiscard]] std::complex<double> psi_hat_generic(Freq xi) const {
    return highpass_(0.5 * xi.x1) * scaling_(0.5 * xi.x1) * scaling_(0.5 * xi.x2);
  }

  [[nodiscard]] double psi_abs(Freq xi) const { return wavelet_abs(xi.x1) * lowpass_abs(xi.x2); }

  [[nodiscard]] std::complex<double> psi_tilde_hat(Freq xi) const { return psi_hat(swapped(xi)); }

  /// φ̂(ξ1) φ̂(ξ2) of the 2D scaling function.
  [[nodiscard]] std::complex<double> phi_hat_2d(Freq xi) const {
    return phi_hat_1d(xi.x1) * phi_hat_1d(xi.x2);
  }

  /// Lower bound of |φ̂| on [-K, K]: exact sinc minimum for B-splines, the
  /// product constant C4 for pseudo splines.
  [[nodiscard]] double window_constant(double window) const {
    if (bspline_) return ipow(std::abs(sinc(0.5 * window)), bspline_->n2);
    return constants(std::get<PseudoGenerator>(cfg_.generator).scaling, 10, window).C4;
  }

  /// Upper bound for U(t) valid for all t, used for truncation tails:
  /// |sin(t/4)|^{N1} ≤ |t/4|^{N1} for B-splines, min{1, Cb|t/2|^{2N1}} otherwise.
  [[nodiscard]] double wavelet_small_bound(double t) const {
    if (bspline_) return std::min(1.0, std::pow(std::abs(0.25 * t), bspline_->n1));
    const auto& p = std::get<PseudoGenerator>(cfg_.generator);
    return std::min(1.0, constants(p.wavelet).Cb * std::pow(std::abs(0.5 * t), 2 * p.wavelet.n()));
  }

 private:
  static double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
  }

  static TrigPoly make_highpass(const ShearSystemConfig& cfg) {
    if (const auto* b = std::get_if<BSplineGenerator>(&cfg.generator)) {
      return highpass_from_lowpass(bspline_mask(b->n1));
    }
    return highpass_from_lowpass(type2_mask(std::get<PseudoGenerator>(cfg.generator).wavelet));
  }

  static RefinableEvaluator make_scaling(const ShearSystemConfig& cfg) {
    if (const auto* b = std::get_if<BSplineGenerator>(&cfg.generator)) {
      return RefinableEvaluator(bspline_mask(b->n2));
    }
    return RefinableEvaluator(std::get<PseudoGenerator>(cfg.generator).scaling);
  }

  ShearSystemConfig cfg_;
  TrigPoly highpass_;
  RefinableEvaluator scaling_;
  std::optional<BSplineGenerator> bspline_;
};

/// Θ(ξ, ω) = |φ̂(ξ)||φ̂(ξ+ω)| + Θ1(ξ, ω) + Θ2(ξ, ω), with the scale sums
/// truncated at j_max.
inline double theta(const Shearlet& sh, Freq xi, Freq omega, int j_max) {
  double acc = std::abs(sh.phi_hat_2d(xi)) * std::abs(sh.phi_hat_2d(xi + omega));
  for (int j = 0; j <= j_max; ++j) {
    const int kk = shear_count(j);
    for (int k = -kk; k <= kk; ++k) {
      const Freq w = warp(j, k, xi);
      acc += sh.psi_abs(w) * sh.psi_abs(w + omega);
      const Freq wt = warp_tilde(j, k, xi);
      acc += sh.psi_abs(swapped(wt)) * sh.psi_abs(swapped(wt + omega));
    }
  }
  return acc;
}

inline double theta(const Shearlet& sh, Freq xi, Freq omega) {
  return theta(sh, xi, omega, sh.config().j_max);
}

/// Σ_{j≤j_max} Σ_{|k|≤⌈2^{j/2}⌉} |ψ̂(S_k^T A_{2^{-j}} ξ)|^2, the horizontal
/// cone part of Θ(ξ, 0), summed through the separable form
/// U(2^{-j}ξ1)^2 · Σ_k V(k 2^{-j} ξ1 + 2^{-j/2} ξ2)^2.
inline double cone_sum(const Shearlet& sh, Freq xi, int j_max) {
  double acc = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    const double e1 = std::ldexp(xi.x1, -j);
    const double u = sh.wavelet_abs(e1);
    if (u == 0.0) continue;
    const double e2 = std::exp2(-0.5 * j) * xi.x2;
    const int kk = shear_count(j);
    double inner = 0.0;
    for (int k = -kk; k <= kk; ++k) {
      const double v = sh.lowpass_abs(k * e1 + e2);
      inner += v * v;
    }
    acc += u * u * inner;
  }
  return acc;
}

/// Finds (j, k) with warp(j, k, ξ) in Ω = ([-2α,-α] ∪ [α,2α]) × [-α, α].
inline std::optional<std::pair<int, int>> omega_cover(Freq xi, double alpha, int j_max) {
  const double tol = 1e-12 * alpha;
  const double ax = std::abs(xi.x1);
  if (ax < alpha * (1.0 - 1e-12)) return std::nullopt;
  const int j0 = static_cast<int>(std::floor(std::log2(ax / alpha)));
  for (int j = std::max(0, j0 - 1); j <= std::min(j_max, j0 + 1); ++j) {
    const double e1 = std::ldexp(xi.x1, -j);
    if (std::abs(e1) < alpha - tol || std::abs(e1) > 2.0 * alpha + tol) continue;
    const double e2 = std::exp2(-0.5 * j) * xi.x2;
    const int kk = shear_count(j);
    const auto k = static_cast<int>(std::lround(-e2 / e1));
    for (int kc = k - 1; kc <= k + 1; ++kc) {
      if (std::abs(kc) > kk) continue;
      const Freq w = warp(j, kc, xi);
      if (std::abs(w.x2) <= alpha + tol) return std::make_pair(j, kc);
    }
  }
  return std::nullopt;
}

struct ConeScanSample {
  Freq xi;
  double value;
};

struct ConeScanReport {
  std::size_t grid = 0;
  int j_max = 0;
  double alpha = 0.0;
  double L_inf = 0.0;
  double L_sup = 0.0;
  Freq argmin{};
  /// (|b̂(α)| C4' C4)^2 with C4', C4 the window constants on [-2α,2α], [-α,α].
  double theory_lower = 0.0;
  /// (|b̂(α/2)| C4[α] C4[α/2])^2: the same argument carried out for
  /// ψ̂(ξ) = b̂(ξ1/2) φ̂(ξ1/2) φ̂(ξ2/2) on Ω.
  double theory_lower_half_argument = 0.0;
  /// min of the cone sum restricted to |ξ1| ≥ 2α, where ψ̂ ≥ |b̂(α)|C4'C4 on 2Ω.
  double L_inf_dilated = 0.0;
  bool coverage_ok = true;
  std::size_t uncovered = 0;
  /// Σ_{j>j_max} bound on the omitted scales inside the scanned annulus.
  double tail_bound = 0.0;
  std::vector<ConeScanSample> samples;
};

/// Grid over C1(α) ∪ C3(α): |ξ1| log-spaced on [α, 2^{j_max+1}α], slope
/// ξ2/ξ1 uniform on [-1, 1]. |ψ̂(-ξ)| = |ψ̂(ξ)| makes C3 the mirror of C1, so
/// only ξ1 > 0 is evaluated.
inline ConeScanReport cone_frame_scan(const Shearlet& sh, std::size_t grid, int j_max,
                                      bool keep_samples = false) {
  if (grid < 64) throw std::invalid_argument("cone_frame_scan: grid must be >= 64 per axis");
  const double alpha = sh.config().alpha;
  ConeScanReport rep;
  rep.grid = grid;
  rep.j_max = j_max;
  rep.alpha = alpha;
  const double octaves = j_max + 1.0;
  std::vector<double> row_min(grid, std::numeric_limits<double>::infinity());
  std::vector<double> row_max(grid, 0.0);
  std::vector<double> row_min_dilated(grid, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> row_arg(grid, 0);
  std::vector<std::size_t> row_uncovered(grid, 0);
  std::vector<double> values(grid * grid);
  parallel_for(grid, [&](std::size_t i) {
    const double x1 = alpha * std::exp2(octaves * static_cast<double>(i) / static_cast<double>(grid - 1));
    for (std::size_t s = 0; s < grid; ++s) {
      const double slope = -1.0 + 2.0 * static_cast<double>(s) / static_cast<double>(grid - 1);
      const Freq xi{x1, slope * x1};
      const double v = cone_sum(sh, xi, j_max);
      values[i * grid + s] = v;
      if (v < row_min[i]) {
        row_min[i] = v;
        row_arg[i] = s;
      }
      row_max[i] = std::max(row_max[i], v);
      if (x1 >= 2.0 * alpha) row_min_dilated[i] = std::min(row_min_dilated[i], v);
      if (!omega_cover(xi, alpha, j_max)) ++row_uncovered[i];
    }
  });
  rep.L_inf = std::numeric_limits<double>::infinity();
  rep.L_inf_dilated = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    if (row_min[i] < rep.L_inf) {
      rep.L_inf = row_min[i];
      const double x1 = alpha * std::exp2(octaves * static_cast<double>(i) / static_cast<double>(grid - 1));
      const double slope = -1.0 + 2.0 * static_cast<double>(row_arg[i]) / static_cast<double>(grid - 1);
      rep.argmin = {x1, slope * x1};
    }
    rep.L_sup = std::max(rep.L_sup, row_max[i]);
    rep.L_inf_dilated = std::min(rep.L_inf_dilated, row_min_dilated[i]);
    rep.uncovered += row_uncovered[i];
  }
  rep.coverage_ok = rep.uncovered == 0;
  const double b_alpha = sh.b_abs(alpha);
  rep.theory_lower = std::pow(b_alpha * sh.window_constant(2.0 * alpha) * sh.window_constant(alpha), 2);
  rep.theory_lower_half_argument =
      std::pow(sh.b_abs(0.5 * alpha) * sh.window_constant(alpha) * sh.window_constant(0.5 * alpha), 2);
  // Omitted scales: U ≤ wavelet_small_bound and V ≤ 1.
  const double top = std::ldexp(alpha, j_max + 1);
  for (int j = j_max + 1; j <= j_max + 60; ++j) {
    const double u = sh.wavelet_small_bound(std::ldexp(top, -j));
    rep.tail_bound += u * u * (2.0 * shear_count(std::min(j, 60)) + 1.0);
  }
  if (keep_samples) {
    rep.samples.reserve(grid * grid);
    for (std::size_t i = 0; i < grid; ++i) {
      const double x1 = alpha * std::exp2(octaves * static_cast<double>(i) / static_cast<double>(grid - 1));
      for (std::size_t s = 0; s < grid; ++s) {
        const double slope = -1.0 + 2.0 * static_cast<double>(s) / static_cast<double>(grid - 1);
        rep.samples.push_back({{x1, slope * x1}, values[i * grid + s]});
      }
    }
  }
  return rep;
}

/// Doubles the grid until the estimated ess-inf moves by less than 1%.
inline ConeScanReport cone_frame_scan_refined(const Shearlet& sh, std::size_t grid, int j_max,
                                              std::size_t max_grid) {
  ConeScanReport rep = cone_frame_scan(sh, grid, j_max);
  while (grid * 2 <= max_grid) {
    grid *= 2;
    ConeScanReport next = cone_frame_scan(sh, grid, j_max);
    const double change = std::abs(next.L_inf - rep.L_inf) / rep.L_inf;
    rep = std::move(next);
    if (change < 0.01) break;
  }
  return rep;
}

struct DecayConditionReport {
  double alpha_exponent = 0.0;  ///< a in min{1, |ξ1|^a}
  double gamma_exponent = 0.0;  ///< g
  double fitted_C = 0.0;        ///< constant of the envelope bound
  bool h_integrable = false;
  double h_l1 = 0.0;               ///< ∫|h| estimate
  double derivative_constant = 0.0;  ///< factor absorbed into h
  double envelope_violation = 0.0;   ///< on the random verification sample
  double derivative_violation = 0.0; ///< finite-difference check of the ξ2-derivative bound
  double max_violation = 0.0;
  std::size_t samples = 0;
  bool exponents_ok = false;

  [[nodiscard]] bool pass() const {
    return exponents_ok && h_integrable && max_violation <= 1e-9;
  }
};

namespace detail {

inline double envelope(double x, double a, double g) {
  const double ax = std::abs(x);
  if (ax == 0.0) return a > 0.0 ? 0.0 : 1.0;
  return std::min(1.0, std::pow(ax, a)) * std::min(1.0, std::pow(ax, -g));
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

}  // namespace detail

/// Validates
///   |ψ̂(ξ)| ≤ C min{1,|ξ1|^a} min{1,|ξ1|^{-g}} min{1,|ξ2|^{-g}}      (1)
///   |∂ψ̂/∂ξ2(ξ)| ≤ |h(ξ1)| (1 + |ξ2|/|ξ1|)^{-g},  h ∈ L1             (2)
/// C is fitted on dense 1D grids of the two separable factors (2% margin) and
/// checked on `samples` random frequencies; (2) is checked against central
/// finite differences at the same points.
///
/// For B-spline generators h is h(ξ1) = 2^{-N1}(1 - e^{-iξ1/2})^{N1-N2} B̂_{N2}(ξ1/2)
/// scaled by D = 2^{N2}·½·sup_t (1+|t|)^{N2}|B̂'_{N2}(t)|, which follows from
/// |1 - e^{-is}|(1 + |t|/|s|) ≤ 2(1 + |t|). For pseudo splines
/// h(ξ1) = D·U(ξ1)·max{1, 2/|ξ1|}^g with D = ½ sup_t (1+|t|)^g |φ̂'(t)|.
inline DecayConditionReport decay_condition_check(const Shearlet& sh, std::size_t samples = 10000,
                                                  std::uint64_t seed = 20240611) {
  DecayConditionReport rep;
  const auto [a, g] = decay_exponents(sh.config());
  rep.alpha_exponent = a;
  rep.gamma_exponent = g;
  rep.exponents_ok = a > 5.0 && g >= 4.0;
  rep.samples = samples;

  // Envelope constant: sup U/env_a_g times sup V/env_0_g on dense grids.
  auto grid = detail::log_grid(std::ldexp(1.0, -8), std::ldexp(1.0, 12), 1 << 15);
  for (double x : envelope_points(std::ldexp(1.0, 13))) {
    if (x > 0.0) grid.push_back(2.0 * x);
  }
  double sup_u = 0.0;
  double sup_v = 0.0;
  for (double t : grid) {
    sup_u = std::max(sup_u, sh.wavelet_abs(t) / detail::envelope(t, a, g));
    sup_v = std::max(sup_v, sh.lowpass_abs(t) / detail::envelope(t, 0.0, g));
  }
  sup_v = std::max(sup_v, sh.lowpass_abs(0.0));
  rep.fitted_C = 1.02 * sup_u * sup_v;

  // Derivative constant.
  const bool bs = sh.is_bspline();
  const int n2 = bs ? std::get<BSplineGenerator>(sh.config().generator).n2 : 0;
  auto phi_prime = [&](double t) -> double {
    if (bs) return std::abs(bspline_fourier_derivative(n2, t));
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    return std::abs(sh.phi_hat_1d(t + h) - sh.phi_hat_1d(t - h)) / (2.0 * h);
  };
  double sup_d = 0.0;
  const double t_max = bs ? 4096.0 : 1024.0;
  const double dt = bs ? 1e-3 : 1e-2;
  for (double t = 0.0; t <= t_max; t += dt) sup_d = std::max(sup_d, std::pow(1.0 + t, g) * phi_prime(t));
  if (bs) {
    // Beyond t_max: (1+t)^m |B̂'_m(t)| ≤ m 2^m (1 + 1/t)^{m+1}.
    sup_d = std::max(sup_d, n2 * std::ldexp(1.0, n2) * std::pow(1.0 + 1.0 / t_max, n2 + 1));
  }
  rep.derivative_constant = 1.02 * 0.5 * sup_d * (bs ? std::ldexp(1.0, n2) : 1.0);

  const int n1 = bs ? std::get<BSplineGenerator>(sh.config().generator).n1 : 0;
  auto h_abs = [&](double x1) -> double {
    if (bs) {
      const double s = 0.5 * x1;
      const double mod = std::ldexp(std::pow(2.0 * std::abs(std::sin(0.5 * s)), n1 - n2), -n1) *
                         std::abs(bspline_fourier(n2, s));
      return rep.derivative_constant * mod;
    }
    return rep.derivative_constant * sh.wavelet_abs(x1) *
           std::pow(std::max(1.0, 2.0 / std::abs(x1)), g);
  };

  // ∫|h| over growing symmetric windows; integrable when g > 1 and the last
  // window adds a negligible fraction.
  auto integral = [&](double lo, double hi) {
    const std::size_t n = static_cast<std::size_t>((hi - lo) / 0.01) + 1;
    const double step = (hi - lo) / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += h_abs(lo + (static_cast<double>(i) + 0.5) * step);
    return 2.0 * s * step;
  };
  const double inner = integral(0.0, 1024.0);
  const double outer = integral(1024.0, 16384.0);
  rep.h_l1 = inner + outer;
  rep.h_integrable = g > 1.0 && std::isfinite(rep.h_l1) && outer <= 1e-3 * rep.h_l1;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-6.0, 8.0);
  std::bernoulli_distribution sign(0.5);
  auto draw = [&] {
    const double v = std::exp2(expo(rng));
    return sign(rng) ? v : -v;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const Freq xi{draw(), draw()};
    const double bound = rep.fitted_C * detail::envelope(xi.x1, a, g) * detail::envelope(xi.x2, 0.0, g);
    rep.envelope_violation = std::max(rep.envelope_violation, std::abs(sh.psi_hat(xi)) - bound);
    const double step = 1e-5 * std::max(1.0, std::abs(xi.x2));
    const auto fd = (sh.psi_hat({xi.x1, xi.x2 + step}) - sh.psi_hat({xi.x1, xi.x2 - step})) / (2.0 * step);
    const double rhs = h_abs(xi.x1) * std::pow(1.0 + std::abs(xi.x2) / std::abs(xi.x1), -g);
    rep.derivative_violation = std::max(rep.derivative_violation, std::abs(fd) - rhs);
  }
  rep.envelope_violation = std::max(0.0, rep.envelope_violation);
  rep.derivative_violation = std::max(0.0, rep.derivative_violation);
  // ξ1 = 0 line: both sides of (1) vanish.
  for (double y : {0.5, 3.0, 40.0}) {
    rep.envelope_violation = std::max(rep.envelope_violation, std::abs(sh.psi_hat({0.0, y})));
  }
  rep.max_violation = std::max(rep.envelope_violation, rep.derivative_violation);
  return rep;
}

}  // namespace shearframe
