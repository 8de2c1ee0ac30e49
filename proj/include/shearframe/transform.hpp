#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"
#include "parallel.hpp"
#include "shearlet.hpp"

namespace shearframe {

/// M×M real image on [0,1]^2, row-major; index (i, j) is the sample at
/// ((i + ½)/M, (j + ½)/M), with i running along the first coordinate.
struct Image {
  std::size_t M = 0;
  std::vector<double> pixels;

  Image() = default;
  explicit Image(std::size_t m, double fill = 0.0) : M(m), pixels(m * m, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return pixels[i * M + j]; }
  double operator()(std::size_t i, std::size_t j) const { return pixels[i * M + j]; }

  /// ‖f‖² with pixel area 1/M².
  [[nodiscard]] double norm2() const {
    double s = 0.0;
    for (double v : pixels) s += v * v;
    return s / static_cast<double>(M * M);
  }

  void validate() const {
    if (M == 0 || !std::has_single_bit(M)) throw std::invalid_argument("image size must be a power of two");
    if (pixels.size() != M * M) throw std::invalid_argument("image pixel count does not match M*M");
    for (double v : pixels) {
      if (!std::isfinite(v)) throw std::invalid_argument("image contains non-finite values");
    }
  }
};

inline double distance2(const Image& a, const Image& b) {
  if (a.M != b.M) throw std::invalid_argument("distance2: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    s += d * d;
  }
  return s / static_cast<double>(a.M * a.M);
}

enum class ChannelKind { scaling, horizontal, vertical, wavelet_x, wavelet_y, wavelet_xy };

inline std::string to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::scaling: return "R";
    case ChannelKind::horizontal: return "C13";
    case ChannelKind::vertical: return "C24";
    case ChannelKind::wavelet_x: return "WX";
    case ChannelKind::wavelet_y: return "WY";
    case ChannelKind::wavelet_xy: return "WXY";
  }
  return "?";
}

inline ChannelKind channel_kind_from_string(const std::string& s) {
  for (auto k : {ChannelKind::scaling, ChannelKind::horizontal, ChannelKind::vertical, ChannelKind::wavelet_x,
                 ChannelKind::wavelet_y, ChannelKind::wavelet_xy}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown channel tag: " + s);
}

struct Channel {
  ChannelKind kind = ChannelKind::scaling;
  int j = 0;
  int k = 0;
  cvec response;      ///< sampled frequency response, DFT order
  double norm = 0.0;  ///< ℓ2 norm of the undecimated atom
};

struct FilterBank {
  std::size_t M = 0;
  int j_max = 0;
  double scale = 1.0;  ///< frequency scale: continuous η = scale · ξ
  std::vector<Channel> channels;
  std::vector<double> gamma;
  double gamma_min = 0.0;
  double gamma_max = 0.0;

  [[nodiscard]] std::size_t size() const { return channels.size(); }
};

/// Number of channels of the cone-adapted bank: 2 Σ_j (2⌈2^{j/2}⌉ + 1) + 1.
inline std::size_t shearlet_channel_count(int j_max) {
  std::size_t n = 1;
  for (int j = 0; j <= j_max; ++j) n += 2 * (2 * static_cast<std::size_t>(shear_count(j)) + 1);
  return n;
}

/// DFT frequency of index i: 2π·{0..M/2-1, -M/2..-1}/M.
inline double dft_frequency(std::size_t i, std::size_t M) {
  const auto half = static_cast<std::ptrdiff_t>(M / 2);
  auto v = static_cast<std::ptrdiff_t>(i);
  if (v >= half) v -= static_cast<std::ptrdiff_t>(M);
  return two_pi * static_cast<double>(v) / static_cast<double>(M);
}

namespace detail {

inline void check_bank_size(std::size_t M, int j_max) {
  if (M < 64 || !std::has_single_bit(M)) throw std::invalid_argument("filter bank size must be a power of two >= 64");
  const int log2m = std::countr_zero(M);
  if (j_max < 0 || j_max > log2m - 2) {
    throw std::invalid_argument("j_max must lie in [0, log2(M) - 2]");
  }
}

template <class F>
cvec sample_response(std::size_t M, double scale, F&& fn) {
  cvec out(M * M);
  parallel_for(M, [&](std::size_t r) {
    const double e1 = scale * dft_frequency(r, M);
    for (std::size_t c = 0; c < M; ++c) out[r * M + c] = fn(Freq{e1, scale * dft_frequency(c, M)});
  });
  return out;
}

inline void finish_bank(FilterBank& fb) {
  const std::size_t n = fb.M * fb.M;
  fb.gamma.assign(n, 0.0);
  for (auto& ch : fb.channels) {
    double e = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double m2 = std::norm(ch.response[p]);
      fb.gamma[p] += m2;
      e += m2;
    }
    ch.norm = std::sqrt(e) / static_cast<double>(fb.M);
  }
  const auto [lo, hi] = std::minmax_element(fb.gamma.begin(), fb.gamma.end());
  fb.gamma_min = *lo;
  fb.gamma_max = *hi;
  if (!(fb.gamma_min >= 1e-6 * fb.gamma_max)) {
    throw std::runtime_error("near-singular frame: min(gamma) = " + std::to_string(fb.gamma_min) +
                             ", max(gamma) = " + std::to_string(fb.gamma_max));
  }
}

}  // namespace detail

/// Undecimated cone-adapted shearlet bank. The finest scale j_max has its
/// passband peak at the Nyquist frequency: filters are ψ̂ sampled at
/// η = 2^{j_max+1} ξ, ξ ∈ [-π, π)^2.
inline FilterBank build_filter_bank(const Shearlet& sh, std::size_t M) {
  const int j_max = sh.config().j_max;
  detail::check_bank_size(M, j_max);
  FilterBank fb;
  fb.M = M;
  fb.j_max = j_max;
  fb.scale = std::ldexp(1.0, j_max + 1);
  fb.channels.push_back({ChannelKind::scaling, 0, 0,
                         detail::sample_response(M, fb.scale, [&](Freq e) { return sh.phi_hat_2d(e); })});
  for (int j = 0; j <= j_max; ++j) {
    const int kk = shear_count(j);
    for (int k = -kk; k <= kk; ++k) {
      fb.channels.push_back({ChannelKind::horizontal, j, k, detail::sample_response(M, fb.scale, [&](Freq e) {
                               return sh.psi_hat(warp(j, k, e));
                             })});
      fb.channels.push_back({ChannelKind::vertical, j, k, detail::sample_response(M, fb.scale, [&](Freq e) {
                               return sh.psi_tilde_hat(warp_tilde(j, k, e));
                             })});
    }
  }
  detail::finish_bank(fb);
  return fb;
}

inline FilterBank build_filter_bank(const ShearSystemConfig& cfg, std::size_t M) {
  return build_filter_bank(Shearlet(cfg), M);
}

/// Undecimated separable wavelet bank built from the same b̂ and φ̂:
/// w(t) = b̂(t/2) φ̂(t/2), channels w(2^{-j}η1)φ̂(2^{-j}η2), φ̂(2^{-j}η1)w(2^{-j}η2)
/// and w(2^{-j}η1)w(2^{-j}η2) per scale, same frequency scale as the shearlet bank.
inline FilterBank build_wavelet_bank(const Shearlet& sh, std::size_t M) {
  const int j_max = sh.config().j_max;
  detail::check_bank_size(M, j_max);
  FilterBank fb;
  fb.M = M;
  fb.j_max = j_max;
  fb.scale = std::ldexp(1.0, j_max + 1);
  auto w = [&](double t) { return sh.b_hat(0.5 * t) * sh.phi_hat_1d(0.5 * t); };
  fb.channels.push_back({ChannelKind::scaling, 0, 0,
                         detail::sample_response(M, fb.scale, [&](Freq e) { return sh.phi_hat_2d(e); })});
  for (int j = 0; j <= j_max; ++j) {
    const double s = std::ldexp(1.0, -j);
    fb.channels.push_back({ChannelKind::wavelet_x, j, 0, detail::sample_response(M, fb.scale, [&](Freq e) {
                             return w(s * e.x1) * sh.phi_hat_1d(s * e.x2);
                           })});
    fb.channels.push_back({ChannelKind::wavelet_y, j, 0, detail::sample_response(M, fb.scale, [&](Freq e) {
                             return sh.phi_hat_1d(s * e.x1) * w(s * e.x2);
                           })});
    fb.channels.push_back({ChannelKind::wavelet_xy, j, 0, detail::sample_response(M, fb.scale, [&](Freq e) {
                             return w(s * e.x1) * w(s * e.x2);
                           })});
  }
  detail::finish_bank(fb);
  return fb;
}

/// Per-channel complex M×M analysis coefficients, channel order of the bank.
struct CoefficientStack {
  std::size_t M = 0;
  std::vector<cvec> channels;

  [[nodiscard]] double energy() const {
    double s = 0.0;
    for (const auto& c : channels) {
      for (const auto& v : c) s += std::norm(v);
    }
    return s;
  }
};

namespace detail {

inline void check_image_for(const FilterBank& fb, const Image& img) {
  img.validate();
  if (img.M != fb.M) throw std::invalid_argument("image size does not match filter bank");
}

/// Re IDFT( Σ_c DFT(coeff_c) · F_c · weight ), channels added in bank order.
/// `fill(c, buf)` writes channel c's spatial coefficients into buf and
/// returns false for an all-zero channel.
inline std::vector<double> synthesis_sum(const FilterBank& fb, const Fft2& fft,
                                         const std::function<bool(std::size_t, cvec&)>& fill,
                                         const std::vector<double>* divide_by) {
  const std::size_t n = fb.M * fb.M;
  cvec acc(n);
  const std::size_t batch = std::max<std::size_t>(1, thread_count());
  std::vector<cvec> spectra(batch, cvec(n));
  std::vector<cvec> scratch(batch, cvec(n));
  std::vector<char> used(batch);
  for (std::size_t base = 0; base < fb.size(); base += batch) {
    const std::size_t count = std::min(batch, fb.size() - base);
    parallel_for(count, [&](std::size_t b) {
      used[b] = fill(base + b, scratch[b]) ? 1 : 0;
      if (!used[b]) return;
      fft.forward(scratch[b], spectra[b]);
      const auto& resp = fb.channels[base + b].response;
      for (std::size_t p = 0; p < n; ++p) spectra[b][p] *= resp[p];
    });
    for (std::size_t b = 0; b < count; ++b) {
      if (!used[b]) continue;
      for (std::size_t p = 0; p < n; ++p) acc[p] += spectra[b][p];
    }
  }
  if (divide_by) {
    for (std::size_t p = 0; p < n; ++p) acc[p] /= (*divide_by)[p];
  }
  cvec out(n);
  fft.inverse(acc, out);
  std::vector<double> re(n);
  for (std::size_t p = 0; p < n; ++p) re[p] = out[p].real();
  return re;
}

}  // namespace detail

/// coeff_c = IDFT(f̂ · conj(F_c)).
inline CoefficientStack analyze(const FilterBank& fb, const Image& img) {
  detail::check_image_for(fb, img);
  const Fft2 fft(fb.M);
  const cvec fhat = fft.forward(img.pixels);
  CoefficientStack st;
  st.M = fb.M;
  st.channels.assign(fb.size(), cvec(fb.M * fb.M));
  parallel_for(fb.size(), [&](std::size_t c) {
    cvec prod(fhat.size());
    const auto& resp = fb.channels[c].response;
    for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = fhat[p] * std::conj(resp[p]);
    fft.inverse(prod, st.channels[c]);
  });
  return st;
}

/// Canonical-dual synthesis f̂ = Σ_c ĉ_c F_c / gamma.
inline Image synthesize(const FilterBank& fb, const CoefficientStack& st) {
  if (st.M != fb.M || st.channels.size() != fb.size()) throw std::invalid_argument("stack does not match filter bank");
  const Fft2 fft(fb.M);
  Image out(fb.M);
  out.pixels = detail::synthesis_sum(
      fb, fft,
      [&](std::size_t c, cvec& buf) {
        if (st.channels[c].size() != fb.M * fb.M) throw std::invalid_argument("channel size mismatch");
        buf = st.channels[c];
        return true;
      },
      &fb.gamma);
  return out;
}

/// (1/M²) Σ_ξ gamma(ξ) |f̂(ξ)|², the coefficient energy predicted by the multiplier.
inline double predicted_energy(const FilterBank& fb, const Image& img) {
  const Fft2 fft(fb.M);
  const cvec fhat = fft.forward(img.pixels);
  double s = 0.0;
  for (std::size_t p = 0; p < fhat.size(); ++p) s += fb.gamma[p] * std::norm(fhat[p]);
  return s / static_cast<double>(fb.M * fb.M);
}

/// Translation strides (d1, d2) per channel. Stride 1 everywhere is the
/// undecimated system.
struct Lattice {
  std::vector<std::pair<std::size_t, std::size_t>> strides;
};

inline Lattice undecimated_lattice(const FilterBank& fb) {
  return {std::vector<std::pair<std::size_t, std::size_t>>(fb.size(), {1, 1})};
}

/// Parabolic translation lattice: scale j is sampled with strides
/// 2^{j_max+1-j-o} along the dilated axis and 2^{j_max+1-⌈j/2⌉-o} along the
/// sheared axis (scaling channel 2^{j_max+1-o}); o ≥ 0 is the oversampling
/// exponent, strides are clamped at 1.
inline Lattice sampled_lattice(const FilterBank& fb, int oversampling) {
  if (oversampling < 0) throw std::invalid_argument("oversampling exponent must be >= 0");
  auto stride = [&](int e) { return std::size_t{1} << std::max(0, e - oversampling); };
  const int top = fb.j_max + 1;
  Lattice lat;
  for (const auto& ch : fb.channels) {
    const int half = (ch.j + 1) / 2;
    switch (ch.kind) {
      case ChannelKind::scaling: lat.strides.emplace_back(stride(top), stride(top)); break;
      case ChannelKind::horizontal: lat.strides.emplace_back(stride(top - ch.j), stride(top - half)); break;
      case ChannelKind::vertical: lat.strides.emplace_back(stride(top - half), stride(top - ch.j)); break;
      default: lat.strides.emplace_back(stride(top - ch.j), stride(top - ch.j)); break;
    }
  }
  return lat;
}

struct PcgOptions {
  double rel_tol = 1e-11;  ///< stop when ‖r‖ ≤ rel_tol ‖b‖
  int max_iter = 300;
};

struct NTermResult {
  Image approx;
  double err2 = 0.0;
  int iterations = 0;
};

/// N-term approximation from the largest normalized coefficients |c|/‖σ‖ on a
/// translation lattice, reconstructed with the canonical dual of the lattice
/// system: f_N = S^{-1} Σ_{kept} c_i σ_i, S the frame operator, solved by
/// preconditioned conjugate gradients with the Fourier multiplier
/// Σ_c |F_c|²/(d1 d2) as preconditioner. On the undecimated lattice S is
/// exactly the gamma multiplier. Ties are broken by channel, then position.
class NTermApproximator {
 public:
  NTermApproximator(const FilterBank& fb, const Image& img, Lattice lat, PcgOptions opts = {})
      : fb_(fb), img_(img), lat_(std::move(lat)), opts_(opts), fft_(fb.M) {
    detail::check_image_for(fb_, img_);
    if (lat_.strides.size() != fb_.size()) throw std::invalid_argument("lattice does not match filter bank");
    const std::size_t M = fb_.M;
    offsets_.push_back(0);
    for (const auto& [d1, d2] : lat_.strides) {
      if (d1 == 0 || d2 == 0 || d1 > M || d2 > M || M % d1 || M % d2) {
        throw std::invalid_argument("lattice strides must divide M");
      }
      offsets_.push_back(offsets_.back() + (M / d1) * (M / d2));
    }
    const std::size_t n = M * M;
    precond_.assign(n, 0.0);
    for (std::size_t c = 0; c < fb_.size(); ++c) {
      const double w = 1.0 / static_cast<double>(lat_.strides[c].first * lat_.strides[c].second);
      for (std::size_t p = 0; p < n; ++p) precond_[p] += w * std::norm(fb_.channels[c].response[p]);
    }
    coeffs_ = sampled_analysis(img_.pixels);
    std::vector<double> mag(coeffs_.size());
    for (std::size_t c = 0; c < fb_.size(); ++c) {
      const double inv = fb_.channels[c].norm > 0.0 ? 1.0 / fb_.channels[c].norm : 0.0;
      for (std::size_t q = offsets_[c]; q < offsets_[c + 1]; ++q) mag[q] = std::abs(coeffs_[q]) * inv;
    }
    order_.resize(coeffs_.size());
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return mag[a] > mag[b]; });
  }

  [[nodiscard]] std::size_t total() const { return coeffs_.size(); }
  [[nodiscard]] const std::vector<std::complex<double>>& coefficients() const { return coeffs_; }
  /// Start of each channel's block in coefficients(), plus the end.
  [[nodiscard]] const std::vector<std::size_t>& offsets() const { return offsets_; }
  /// Coefficient indices, strongest first; approx(N) keeps the first N.
  [[nodiscard]] const std::vector<std::uint32_t>& ranking() const { return order_; }

  [[nodiscard]] NTermResult approx(std::size_t N) const {
    if (N > total()) throw std::invalid_argument("N exceeds the coefficient count");
    NTermResult res;
    res.approx = Image(fb_.M);
    if (N == 0) {
      res.err2 = img_.norm2();
      return res;
    }
    std::vector<std::complex<double>> kept(coeffs_.size());
    for (std::size_t i = 0; i < N; ++i) kept[order_[i]] = coeffs_[order_[i]];
    const std::vector<double> b = sampled_synthesis(kept);
    res.approx.pixels = solve(b, res.iterations);
    res.err2 = distance2(img_, res.approx);
    return res;
  }

 private:
  using rvec = std::vector<double>;

  std::vector<std::complex<double>> sampled_analysis(const rvec& g) const {
    const std::size_t M = fb_.M;
    const cvec ghat = fft_.forward(g);
    std::vector<std::complex<double>> out(offsets_.back());
    parallel_for(fb_.size(), [&](std::size_t c) {
      cvec prod(ghat.size());
      cvec sp(ghat.size());
      const auto& resp = fb_.channels[c].response;
      for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = ghat[p] * std::conj(resp[p]);
      fft_.inverse(prod, sp);
      const auto [d1, d2] = lat_.strides[c];
      std::size_t q = offsets_[c];
      for (std::size_t i = 0; i < M; i += d1) {
        for (std::size_t j = 0; j < M; j += d2) out[q++] = sp[i * M + j];
      }
    });
    return out;
  }

  rvec sampled_synthesis(const std::vector<std::complex<double>>& v) const {
    const std::size_t M = fb_.M;
    return detail::synthesis_sum(
        fb_, fft_,
        [&](std::size_t c, cvec& buf) {
          std::fill(buf.begin(), buf.end(), std::complex<double>{});
          const auto [d1, d2] = lat_.strides[c];
          bool any = false;
          std::size_t q = offsets_[c];
          for (std::size_t i = 0; i < M; i += d1) {
            for (std::size_t j = 0; j < M; j += d2, ++q) {
              buf[i * M + j] = v[q];
              any = any || v[q] != std::complex<double>{};
            }
          }
          return any;
        },
        nullptr);
  }

  rvec frame_operator(const rvec& g) const { return sampled_synthesis(sampled_analysis(g)); }

  rvec precondition(const rvec& r) const {
    cvec rhat = fft_.forward(r);
    for (std::size_t p = 0; p < rhat.size(); ++p) rhat[p] /= precond_[p];
    cvec out(rhat.size());
    fft_.inverse(rhat, out);
    rvec re(out.size());
    for (std::size_t p = 0; p < re.size(); ++p) re[p] = out[p].real();
    return re;
  }

  static double dot(const rvec& a, const rvec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  rvec solve(const rvec& b, int& iterations) const {
    const double bb = dot(b, b);
    rvec x = precondition(b);
    iterations = 0;
    if (bb == 0.0) return x;
    rvec r = b;
    const rvec sx = frame_operator(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sx[i];
    const double tol2 = opts_.rel_tol * opts_.rel_tol * bb;
    if (dot(r, r) <= tol2) return x;
    rvec z = precondition(r);
    rvec p = z;
    double rz = dot(r, z);
    for (iterations = 1; iterations <= opts_.max_iter; ++iterations) {
      const rvec ap = frame_operator(p);
      const double alpha = rz / dot(p, ap);
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      if (dot(r, r) <= tol2) break;
      z = precondition(r);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    iterations = std::min(iterations, opts_.max_iter);
    return x;
  }

  const FilterBank& fb_;
  const Image& img_;
  Lattice lat_;
  PcgOptions opts_;
  Fft2 fft_;
  std::vector<std::size_t> offsets_;
  rvec precond_;
  std::vector<std::complex<double>> coeffs_;
  std::vector<std::uint32_t> order_;
};

/// Undecimated N-term approximation.
inline NTermResult nterm_approx(const FilterBank& fb, const Image& img, std::size_t N) {
  return NTermApproximator(fb, img, undecimated_lattice(fb)).approx(N);
}

inline NTermResult nterm_approx(const FilterBank& fb, const Image& img, std::size_t N, const Lattice& lat) {
  return NTermApproximator(fb, img, lat).approx(N);
}

/// N-term error of the separable wavelet bank of the same generator and
/// scale range, on the lattice policy given by `oversampling` (nullopt:
/// undecimated).
inline double wavelet_baseline(const Shearlet& sh, const Image& img, std::size_t N,
                               std::optional<int> oversampling = std::nullopt) {
  const FilterBank wb = build_wavelet_bank(sh, img.M);
  const Lattice lat = oversampling ? sampled_lattice(wb, *oversampling) : undecimated_lattice(wb);
  return NTermApproximator(wb, img, lat).approx(N).err2;
}

/// Least-squares slope of log(err) against log(N).
inline double loglog_slope(const std::vector<double>& ns, const std::vector<double>& errs) {
  if (ns.size() != errs.size() || ns.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(ns[i]);
    my += std::log(errs[i]);
  }
  mx /= static_cast<double>(ns.size());
  my /= static_cast<double>(ns.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxy += dx * (std::log(errs[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace shearframe
