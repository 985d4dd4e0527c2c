#pragma once

/// Complex FFT for arbitrary lengths: iterative radix-2 for powers of two,
/// Bluestein's chirp-z algorithm otherwise. Deterministic, no global state.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace empath {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

}  // namespace detail

/// Forward DFT of arbitrary length (in place semantics via return value).
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a) {
  const std::size_t n = a.size();
  if (n < 2) return a;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(a, false);
    return a;
  }

  // Bluestein: X_k = c_k^* . sum_j (x_j c_j^*) c_{k-j}, with the chirp
  // c_m = exp(i*pi*m^2/n), evaluated through a power-of-two convolution.
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small and exact (k^2 < 2^53).
    const double kk = std::fmod(static_cast<double>(k) * static_cast<double>(k),
                                2.0 * static_cast<double>(n));
    const double angle = std::numbers::pi * kk / static_cast<double>(n);
    chirp[k] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<std::complex<double>> fa(m), fb(m);
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * std::conj(chirp[k]);
  fb[0] = chirp[0];
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = chirp[k];
  detail::fft_pow2(fa, false);
  detail::fft_pow2(fb, false);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  detail::fft_pow2(fa, true);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fa[k] * std::conj(chirp[k]);
  return out;
}

/// Forward DFT of a real sequence.
inline std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
  std::vector<std::complex<double>> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
  return fft(std::move(a));
}

}  // namespace empath
