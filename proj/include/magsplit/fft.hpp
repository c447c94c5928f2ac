#pragma once
// Self-contained complex FFT used by the spectral transforms and the
// nonequispaced fast transform's oversampled stage.
//
// Power-of-two sizes run an iterative radix-2 Cooley-Tukey; every other size
// goes through Bluestein's chirp-z reduction to a power-of-two convolution,
// so any length is handled exactly (speed is only tuned for powers of two).
// Transforms are unnormalized: forward computes X_q = sum_p x_p e^{-2pi i pq/n},
// inverse the conjugate kernel; composing them scales by n.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "magsplit/grid.hpp"

namespace magsplit::detail {

using cd = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct FftTables {
  std::size_t n = 0;
  std::vector<std::uint32_t> bitrev;      // permutation for radix-2
  std::vector<cd> twiddle;                // exp(-2pi i k/n), k in [0, n/2)
  // Bluestein data (empty for powers of two):
  std::size_t m = 0;                      // convolution length (power of two)
  std::vector<cd> chirp;                  // exp(-pi i j^2/n), j in [0, n)
  std::vector<cd> kernelHat;              // forward FFT of the wrapped conjugate chirp
};

inline void build_pow2(FftTables& t, std::size_t n) {
  t.bitrev.assign(n, 0);
  std::uint32_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t r = 0;
    for (std::uint32_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::uint32_t{1} << (bits - 1 - b);
    t.bitrev[i] = r;
  }
  t.twiddle.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    t.twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                       static_cast<double>(n));
}

// Radix-2, in place, data length n = tables.n (power of two).
inline void fft_pow2(cd* a, const FftTables& t, bool inverse) {
  const std::size_t n = t.n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = t.bitrev[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t tstep = n / len;
    for (std::size_t blk = 0; blk < n; blk += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cd w = t.twiddle[k * tstep];
        if (inverse) w = std::conj(w);
        const cd u = a[blk + k];
        const cd v = a[blk + k + half] * w;
        a[blk + k] = u + v;
        a[blk + k + half] = u - v;
      }
    }
  }
}

inline const FftTables& tables_for(std::size_t n);

inline void build_bluestein(FftTables& t, std::size_t n) {
  t.m = next_pow2(2 * n - 1);
  t.chirp.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the polar argument small and the phase exact.
    const std::uint64_t q = (static_cast<std::uint64_t>(j) * j) % (2 * n);
    t.chirp[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(q) /
                                     static_cast<double>(n));
  }
  std::vector<cd> b(t.m, cd{0.0, 0.0});
  b[0] = std::conj(t.chirp[0]);
  for (std::size_t j = 1; j < n; ++j) {
    b[j] = std::conj(t.chirp[j]);
    b[t.m - j] = b[j];
  }
  const FftTables& mt = tables_for(t.m);
  fft_pow2(b.data(), mt, false);
  t.kernelHat = std::move(b);
}

inline const FftTables& tables_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftTables>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
  }
  // Build outside the lock: the Bluestein path recursively needs the tables
  // of its power-of-two convolution length.
  auto t = std::make_unique<FftTables>();
  t->n = n;
  if (is_pow2(n)) {
    build_pow2(*t, n);
  } else {
    build_bluestein(*t, n);
  }
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(n, std::move(t));
  return *it->second;
}

// 1D unnormalized transform of length n (any n >= 1), in place.
inline void fft_inplace(cd* a, std::size_t n, bool inverse) {
  if (n <= 1) return;
  const FftTables& t = tables_for(n);
  if (is_pow2(n)) {
    fft_pow2(a, t, inverse);
    return;
  }
  // Bluestein: X_k = chirp_k * ((a .* chirp) (*) conj-chirp kernel)_k.
  // The inverse kernel is the conjugate of the forward one, so run the
  // inverse through conjugation of input and output instead.
  if (inverse) {
    for (std::size_t j = 0; j < n; ++j) a[j] = std::conj(a[j]);
    fft_inplace(a, n, false);
    for (std::size_t j = 0; j < n; ++j) a[j] = std::conj(a[j]);
    return;
  }
  const FftTables& mt = tables_for(t.m);
  std::vector<cd> buf(t.m, cd{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) buf[j] = a[j] * t.chirp[j];
  fft_pow2(buf.data(), mt, false);
  for (std::size_t j = 0; j < t.m; ++j) buf[j] *= t.kernelHat[j];
  fft_pow2(buf.data(), mt, true);
  const double scale = 1.0 / static_cast<double>(t.m);
  for (std::size_t k = 0; k < n; ++k) a[k] = buf[k] * scale * t.chirp[k];
}

inline void fft_inplace(std::vector<cd>& a, bool inverse) {
  fft_inplace(a.data(), a.size(), inverse);
}

// Apply the 1D transform along one axis of a row-major array (axis 0 slowest).
inline void fft_axis_inplace(cd* data, const std::array<int, kMaxDim>& sizes, int dim,
                             int axis, bool inverse) {
  const std::size_t n = static_cast<std::size_t>(sizes[axis]);
  std::size_t inner = 1;  // stride of consecutive elements along `axis`
  for (int i = axis + 1; i < dim; ++i) inner *= static_cast<std::size_t>(sizes[i]);
  std::size_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(sizes[i]);

  std::vector<cd> line(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      cd* base = data + o * n * inner + in;
      if (inner == 1) {
        fft_inplace(base, n, inverse);
      } else {
        for (std::size_t p = 0; p < n; ++p) line[p] = base[p * inner];
        fft_inplace(line.data(), n, inverse);
        for (std::size_t p = 0; p < n; ++p) base[p * inner] = line[p];
      }
    }
  }
}

}  // namespace magsplit::detail
