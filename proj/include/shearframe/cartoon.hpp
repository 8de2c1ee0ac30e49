#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "parallel.hpp"
#include "transform.hpp"

namespace shearframe {

/// Term c · u^px · v^py of a bivariate polynomial in offsets (u, v) from the
/// cartoon center.
struct PolyTerm {
  int px = 0;
  int py = 0;
  double c = 0.0;
  friend bool operator==(const PolyTerm&, const PolyTerm&) = default;
};

struct Harmonic {
  int n = 0;
  double a = 0.0;
  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// f = W·f0 + W·f1·χ_B with B = {center + r(cos θ, sin θ): r ≤ ρ(θ)},
/// ρ(θ) = rho0 (1 + Σ a_n cos nθ) and W(x) = w(x1) w(x2), w(t) = (4t(1-t))^3,
/// a C² window vanishing on the boundary of [0,1]^2.
struct CartoonSpec {
  double rho0 = 0.3;
  std::vector<Harmonic> harmonics{{2, 0.08}, {3, 0.04}};
  double cx = 0.5;
  double cy = 0.5;
  std::vector<PolyTerm> f0{{0, 0, 0.6}, {1, 0, 0.5}, {0, 1, 0.3}};
  std::vector<PolyTerm> f1{{0, 0, 1.0}, {2, 0, -2.0}, {0, 2, -2.0}};
  double nu = 1.0;

  friend bool operator==(const CartoonSpec&, const CartoonSpec&) = default;
};

/// The documented default: ρ0 = 0.3, harmonics (2, 0.08), (3, 0.04), a linear
/// ramp outside and a quadratic bump inside.
inline CartoonSpec default_cartoon() { return {}; }

/// max_θ |ρ''(θ)| bound rho0 Σ |a_n| n², attained at θ = 0 when all a_n share a sign.
inline double curvature_check(const CartoonSpec& s) {
  double acc = 0.0;
  for (const auto& h : s.harmonics) acc += std::abs(h.a) * h.n * h.n;
  return s.rho0 * acc;
}

/// rho0 (1 + Σ|a_n|), an upper bound for ρ.
inline double radius_bound(const CartoonSpec& s) {
  double acc = 1.0;
  for (const auto& h : s.harmonics) acc += std::abs(h.a);
  return s.rho0 * acc;
}

inline double boundary_radius(const CartoonSpec& s, double theta) {
  double acc = 1.0;
  for (const auto& h : s.harmonics) acc += h.a * std::cos(h.n * theta);
  return s.rho0 * acc;
}

inline void validate(const CartoonSpec& s) {
  if (!(s.rho0 > 0.0 && s.rho0 < 1.0)) throw std::invalid_argument("rho0 must lie in (0,1)");
  if (!(s.nu > 0.0)) throw std::invalid_argument("nu must be positive");
  double amp = 0.0;
  for (const auto& h : s.harmonics) {
    if (h.n < 1) throw std::invalid_argument("harmonic frequencies must be >= 1");
    if (!std::isfinite(h.a)) throw std::invalid_argument("harmonic amplitude must be finite");
    amp += std::abs(h.a);
  }
  if (amp >= 1.0) throw std::invalid_argument("harmonic amplitudes must sum below 1 so that rho > 0");
  if (curvature_check(s) > s.nu) {
    throw std::invalid_argument("boundary curvature bound " + std::to_string(curvature_check(s)) +
                                " exceeds nu = " + std::to_string(s.nu));
  }
  const double rmax = radius_bound(s);
  if (rmax >= 1.0) throw std::invalid_argument("rho must stay below 1");
  if (s.cx - rmax <= 0.0 || s.cx + rmax >= 1.0 || s.cy - rmax <= 0.0 || s.cy + rmax >= 1.0) {
    throw std::invalid_argument("star domain is not contained in the open unit square");
  }
  for (const auto* poly : {&s.f0, &s.f1}) {
    for (const auto& t : *poly) {
      if (t.px < 0 || t.py < 0 || t.px + t.py > 4) throw std::invalid_argument("polynomial degree must be <= 4");
      if (!std::isfinite(t.c)) throw std::invalid_argument("polynomial coefficient must be finite");
    }
  }
}

inline double cartoon_window(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double b = 4.0 * t * (1.0 - t);
  return b * b * b;
}

inline double eval_poly(const std::vector<PolyTerm>& p, double u, double v) {
  double s = 0.0;
  for (const auto& t : p) s += t.c * std::pow(u, t.px) * std::pow(v, t.py);
  return s;
}

inline bool inside(const CartoonSpec& s, double x, double y) {
  const double u = x - s.cx;
  const double v = y - s.cy;
  const double r = std::hypot(u, v);
  if (r == 0.0) return true;
  return r <= boundary_radius(s, std::atan2(v, u));
}

/// Value of the continuous cartoon at (x, y).
inline double cartoon_value(const CartoonSpec& s, double x, double y) {
  const double w = cartoon_window(x) * cartoon_window(y);
  const double u = x - s.cx;
  const double v = y - s.cy;
  double val = eval_poly(s.f0, u, v);
  if (inside(s, x, y)) val += eval_poly(s.f1, u, v);
  return w * val;
}

/// Samples the cartoon at cell centers. `supersample` > 1 averages a
/// supersample × supersample subgrid per pixel (display only; the default
/// keeps the hard indicator of the model).
inline Image generate(const CartoonSpec& s, std::size_t M, int supersample = 1) {
  validate(s);
  if (M == 0) throw std::invalid_argument("image size must be positive");
  if (supersample < 1) throw std::invalid_argument("supersample must be >= 1");
  Image img(M);
  const double h = 1.0 / static_cast<double>(M);
  parallel_for(M, [&](std::size_t i) {
    for (std::size_t j = 0; j < M; ++j) {
      double acc = 0.0;
      for (int a = 0; a < supersample; ++a) {
        for (int b = 0; b < supersample; ++b) {
          const double x = (static_cast<double>(i) + (a + 0.5) / supersample) * h;
          const double y = (static_cast<double>(j) + (b + 0.5) / supersample) * h;
          acc += cartoon_value(s, x, y);
        }
      }
      img(i, j) = acc / (supersample * supersample);
    }
  });
  return img;
}

}  // namespace shearframe
