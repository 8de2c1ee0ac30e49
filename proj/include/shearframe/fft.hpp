#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace shearframe {

using cvec = std::vector<std::complex<double>>;

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Square 2D complex DFT of side M, unnormalized forward, 1/M^2 inverse.
/// Plans are created with FFTW_ESTIMATE so the algorithm choice, and hence
/// the rounding, does not depend on timing. Execution is thread-safe.
class Fft2 {
 public:
  explicit Fft2(std::size_t m) : m_(m) {
    if (m == 0) throw std::invalid_argument("Fft2: size must be positive");
    cvec a(m * m);
    cvec b(m * m);
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int n = static_cast<int>(m);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    inv_ = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    if (!fwd_ || !inv_) throw std::runtime_error("Fft2: planner failed");
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;
  ~Fft2() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

  [[nodiscard]] std::size_t size() const { return m_; }

  void forward(const cvec& in, cvec& out) const {
    check(in, out);
    fftw_execute_dft(fwd_, as_fftw(const_cast<std::complex<double>*>(in.data())), as_fftw(out.data()));
  }

  void inverse(const cvec& in, cvec& out) const {
    check(in, out);
    fftw_execute_dft(inv_, as_fftw(const_cast<std::complex<double>*>(in.data())), as_fftw(out.data()));
    const double s = 1.0 / static_cast<double>(m_ * m_);
    for (auto& v : out) v *= s;
  }

  [[nodiscard]] cvec forward(const std::vector<double>& real) const {
    cvec in(real.begin(), real.end());
    cvec out(in.size());
    forward(in, out);
    return out;
  }

 private:
  static fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

  void check(const cvec& in, const cvec& out) const {
    if (in.size() != m_ * m_ || out.size() != m_ * m_) throw std::invalid_argument("Fft2: size mismatch");
    if (in.data() == out.data()) throw std::invalid_argument("Fft2: in-place execution not planned");
  }

  std::size_t m_;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

}  // namespace shearframe
