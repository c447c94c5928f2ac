#pragma once
// Trigonometric basis, forward/backward spectral transforms, and the exact
// kinetic propagator.
//
// Basis: E_k(x) = prod_i exp(2pi i k_i (x_i - a_i)/L_i) / sqrt(L_i), with
// wavenumbers k_i in [-N_i/2, N_i/2) stored by the grid's signed-index
// convention. A field and its coefficients satisfy
//     v(x^j) = sum_k vhat_k E_k(x^j),
// and the discrete Parseval identity
//     cellVolume * sum_j |v(x^j)|^2 = sum_k |vhat_k|^2.
//
// Normalization: to_spectral folds the single factor cellVolume/sqrt(prod L_i)
// into an unnormalized forward FFT; to_physical is its exact inverse. Because
// nodes are centered at the domain midpoint while the basis phase is anchored
// at the lower corner, each axis contributes a (-1)^{k} * (-1)^{s} pair that
// collapses to one checkerboard sign on the samples - no index rotation needed.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "magsplit/fft.hpp"
#include "magsplit/grid.hpp"

namespace magsplit {

struct WaveField {
  Grid grid;
  std::vector<std::complex<double>> values;  // node values, row-major storage
};

struct SpectralField {
  Grid grid;
  std::vector<std::complex<double>> coeffs;  // basis coefficients, same layout
};

inline WaveField make_wave_field(const Grid& g) {
  return WaveField{g, std::vector<std::complex<double>>(g.size())};
}

template <class Fn>  // Fn: (const Point&) -> std::complex<double> (or double)
inline WaveField sample_field(const Grid& g, Fn&& fn) {
  WaveField f = make_wave_field(g);
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    f.values[flat] = std::complex<double>(fn(grid_point(g, j)));
  });
  return f;
}

namespace detail {

// Multiply sample s (row-major multi-index) by prod_i (-1)^{s_i}.
inline void apply_checkerboard(std::vector<cd>& data,
                               const std::array<int, kMaxDim>& sizes, int dim) {
  const std::size_t total = data.size();
  std::array<int, kMaxDim> s{};
  int parity = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (parity & 1) data[flat] = -data[flat];
    for (int i = dim - 1; i >= 0; --i) {
      ++s[i];
      parity ^= 1;  // rolling a component from N_i-1 to 0 is one net flip (N_i even)
      if (s[i] < sizes[i]) break;
      s[i] = 0;
    }
  }
}

}  // namespace detail

inline SpectralField to_spectral(const WaveField& f) {
  if (f.values.size() != f.grid.size())
    throw ContractError("to_spectral: value count does not match grid");
  SpectralField out{f.grid, f.values};
  detail::apply_checkerboard(out.coeffs, f.grid.N, f.grid.dim());
  for (int axis = 0; axis < f.grid.dim(); ++axis)
    detail::fft_axis_inplace(out.coeffs.data(), f.grid.N, f.grid.dim(), axis, false);
  double scale = f.grid.cellVolume();
  for (int i = 0; i < f.grid.dim(); ++i) scale /= std::sqrt(f.grid.domain.length(i));
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

inline WaveField to_physical(const SpectralField& s) {
  if (s.coeffs.size() != s.grid.size())
    throw ContractError("to_physical: coefficient count does not match grid");
  WaveField out{s.grid, s.coeffs};
  for (int axis = 0; axis < s.grid.dim(); ++axis)
    detail::fft_axis_inplace(out.values.data(), s.grid.N, s.grid.dim(), axis, true);
  detail::apply_checkerboard(out.values, s.grid.N, s.grid.dim());
  double scale = 1.0;
  for (int i = 0; i < s.grid.dim(); ++i) scale /= std::sqrt(s.grid.domain.length(i));
  for (auto& v : out.values) v *= scale;
  return out;
}

// E_k(x) for one wavenumber; x need not lie on the grid.
inline std::complex<double> basis_value(const Grid& g, const MultiIndex& k,
                                        const Point& x) {
  double phase = 0.0;
  double scale = 1.0;
  for (int i = 0; i < g.dim(); ++i) {
    const double L = g.domain.length(i);
    phase += 2.0 * std::numbers::pi * k[i] * (x[i] - g.domain.lo[i]) / L;
    scale /= std::sqrt(L);
  }
  return std::polar(scale, phase);
}

// Evaluate the trigonometric interpolant at an arbitrary point by direct
// summation (O(prod N_i) per call; for bulk evaluation see the advection
// backends, which share this convention).
inline std::complex<double> eval_at(const SpectralField& s, const Point& x) {
  const Grid& g = s.grid;
  std::array<std::vector<std::complex<double>>, kMaxDim> axisPhase;
  for (int i = 0; i < g.dim(); ++i) {
    axisPhase[i].resize(g.N[i]);
    const double L = g.domain.length(i);
    for (int t = 0; t < g.N[i]; ++t) {
      const int k = t - g.N[i] / 2;
      axisPhase[i][t] = std::polar(
          1.0 / std::sqrt(L), 2.0 * std::numbers::pi * k * (x[i] - g.domain.lo[i]) / L);
    }
  }
  // Separable summation: contract the innermost (contiguous) axis first so
  // every coefficient costs one multiply-add.
  std::complex<double> acc{0.0, 0.0};
  const std::complex<double>* c = s.coeffs.data();
  switch (g.dim()) {
    case 1:
      for (int t0 = 0; t0 < g.N[0]; ++t0) acc += axisPhase[0][t0] * c[t0];
      break;
    case 2: {
      std::size_t flat = 0;
      for (int t0 = 0; t0 < g.N[0]; ++t0) {
        std::complex<double> inner{0.0, 0.0};
        for (int t1 = 0; t1 < g.N[1]; ++t1) inner += axisPhase[1][t1] * c[flat++];
        acc += axisPhase[0][t0] * inner;
      }
      break;
    }
    default: {
      std::size_t flat = 0;
      for (int t0 = 0; t0 < g.N[0]; ++t0) {
        std::complex<double> mid{0.0, 0.0};
        for (int t1 = 0; t1 < g.N[1]; ++t1) {
          std::complex<double> inner{0.0, 0.0};
          for (int t2 = 0; t2 < g.N[2]; ++t2) inner += axisPhase[2][t2] * c[flat++];
          mid += axisPhase[1][t1] * inner;
        }
        acc += axisPhase[0][t0] * mid;
      }
      break;
    }
  }
  return acc;
}

// Exact flow of the kinetic operator (i eps/2) Laplacian over time tau:
// coefficient k picks up the unimodular factor exp(-i tau (eps/2) |2pi k / L|^2).
// The factor is separable across axes, so per-axis tables are built once per call.
inline SpectralField kinetic_step(const SpectralField& s, double tau, double eps) {
  const Grid& g = s.grid;
  std::array<std::vector<std::complex<double>>, kMaxDim> axisFactor;
  for (int i = 0; i < g.dim(); ++i) {
    axisFactor[i].resize(g.N[i]);
    const double L = g.domain.length(i);
    for (int t = 0; t < g.N[i]; ++t) {
      const double w = 2.0 * std::numbers::pi * (t - g.N[i] / 2) / L;
      axisFactor[i][t] = std::polar(1.0, -tau * 0.5 * eps * w * w);
    }
  }
  SpectralField out{g, s.coeffs};
  std::array<int, kMaxDim> t_idx{};
  const std::size_t total = g.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::complex<double> f = axisFactor[0][t_idx[0]];
    for (int i = 1; i < g.dim(); ++i) f *= axisFactor[i][t_idx[i]];
    out.coeffs[flat] *= f;
    for (int i = g.dim() - 1; i >= 0; --i) {
      if (++t_idx[i] < g.N[i]) break;
      t_idx[i] = 0;
    }
  }
  return out;
}

}  // namespace magsplit
