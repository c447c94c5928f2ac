#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "magsplit/fft.hpp"

using magsplit::detail::cd;
using magsplit::detail::fft_axis_inplace;
using magsplit::detail::fft_inplace;

namespace {

// Brute-force reference transform: X_q = sum_p x_p exp(-+2 pi i p q / n).
std::vector<cd> dft_oracle(const std::vector<cd>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cd> out(n, cd{0.0, 0.0});
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t p = 0; p < n; ++p)
      out[q] += x[p] * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                           static_cast<double>(p * q % n) /
                                           static_cast<double>(n));
  return out;
}

std::vector<cd> random_signal(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cd> x(n);
  for (auto& v : x) v = cd{u(rng), u(rng)};
  return x;
}

double max_abs_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("fft matches brute-force DFT on power-of-two sizes") {
  for (std::size_t n : {2u, 4u, 16u, 64u, 256u}) {
    auto x = random_signal(n, 11 + static_cast<unsigned>(n));
    auto want = dft_oracle(x, false);
    auto got = x;
    fft_inplace(got, false);
    CHECK(max_abs_diff(got, want) < 1e-11);
    auto wantInv = dft_oracle(x, true);
    auto gotInv = x;
    fft_inplace(gotInv, true);
    CHECK(max_abs_diff(gotInv, wantInv) < 1e-11);
  }
}

TEST_CASE("fft matches brute-force DFT on non-power-of-two even sizes") {
  for (std::size_t n : {6u, 10u, 12u, 96u, 192u}) {
    auto x = random_signal(n, 101 + static_cast<unsigned>(n));
    auto want = dft_oracle(x, false);
    auto got = x;
    fft_inplace(got, false);
    CHECK(max_abs_diff(got, want) < 1e-10);
    auto wantInv = dft_oracle(x, true);
    auto gotInv = x;
    fft_inplace(gotInv, true);
    CHECK(max_abs_diff(gotInv, wantInv) < 1e-10);
  }
}

TEST_CASE("forward-then-inverse scales by n") {
  for (std::size_t n : {8u, 96u, 1024u}) {
    auto x = random_signal(n, 7);
    auto y = x;
    fft_inplace(y, false);
    fft_inplace(y, true);
    for (auto& v : y) v /= static_cast<double>(n);
    CHECK(max_abs_diff(y, x) < 1e-11);
  }
}

TEST_CASE("axis transform equals per-line 1D transforms") {
  const std::array<int, magsplit::kMaxDim> sizes{3 * 2, 4, 0};  // 6 x 4, row-major
  auto x = random_signal(24, 5);

  // axis 1 (contiguous lines)
  {
    auto got = x;
    fft_axis_inplace(got.data(), sizes, 2, 1, false);
    for (int r = 0; r < 6; ++r) {
      std::vector<cd> line(x.begin() + r * 4, x.begin() + (r + 1) * 4);
      auto want = dft_oracle(line, false);
      for (int c = 0; c < 4; ++c) CHECK(std::abs(got[r * 4 + c] - want[c]) < 1e-12);
    }
  }
  // axis 0 (strided lines)
  {
    auto got = x;
    fft_axis_inplace(got.data(), sizes, 2, 0, false);
    for (int c = 0; c < 4; ++c) {
      std::vector<cd> line(6);
      for (int r = 0; r < 6; ++r) line[r] = x[r * 4 + c];
      auto want = dft_oracle(line, false);
      for (int r = 0; r < 6; ++r) CHECK(std::abs(got[r * 4 + c] - want[r]) < 1e-12);
    }
  }
}
