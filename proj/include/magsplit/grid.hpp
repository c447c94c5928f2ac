#pragma once
// Periodic hyperrectangle grids with centered node placement and
// signed (wavenumber-style) per-axis indexing.
//
// Storage convention: a signed index j_i in [-N_i/2, N_i/2) maps to the
// storage offset s_i = j_i + N_i/2, and multi-indices flatten row-major
// (axis 0 slowest). The same convention is used for spectral coefficients,
// where the signed index is the wavenumber k_i.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace magsplit {

inline constexpr int kMaxDim = 3;

// Coordinates / small vectors; entries past the active dimension stay zero.
using Point = std::array<double, kMaxDim>;
using MultiIndex = std::array<int, kMaxDim>;

struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Domain {
  int dim = 0;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};

  double length(int axis) const { return hi[axis] - lo[axis]; }
  double center(int axis) const { return 0.5 * (lo[axis] + hi[axis]); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= length(i);
    return v;
  }
};

inline Domain make_domain(std::initializer_list<double> lo,
                          std::initializer_list<double> hi) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > kMaxDim)
    throw ContractError("domain: need 1..3 matching bounds");
  Domain d;
  d.dim = static_cast<int>(lo.size());
  int i = 0;
  for (double v : lo) d.lo[i++] = v;
  i = 0;
  for (double v : hi) d.hi[i++] = v;
  for (int a = 0; a < d.dim; ++a) {
    if (!std::isfinite(d.lo[a]) || !std::isfinite(d.hi[a]) || !(d.lo[a] < d.hi[a]))
      throw ContractError("domain: bounds must be finite with lo < hi");
  }
  return d;
}

struct Grid {
  Domain domain;
  std::array<int, kMaxDim> N{};  // even, >= 2 per axis

  int dim() const { return domain.dim; }
  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(N[i]);
    return n;
  }
  double h(int axis) const { return domain.length(axis) / N[axis]; }
  double cellVolume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= h(i);
    return v;
  }
};

inline Grid make_grid(const Domain& dom, std::initializer_list<int> N) {
  if (static_cast<int>(N.size()) != dom.dim)
    throw ContractError("grid: one size per axis required");
  Grid g;
  g.domain = dom;
  int i = 0;
  for (int n : N) {
    if (n < 2 || n % 2 != 0)
      throw ContractError("grid: sizes must be even and >= 2, got " + std::to_string(n));
    g.N[i++] = n;
  }
  return g;
}

inline Grid make_grid(const Domain& dom, const std::array<int, kMaxDim>& N) {
  Grid g;
  g.domain = dom;
  g.N = N;
  for (int i = 0; i < dom.dim; ++i)
    if (N[i] < 2 || N[i] % 2 != 0)
      throw ContractError("grid: sizes must be even and >= 2, got " + std::to_string(N[i]));
  return g;
}

// Node j (signed components in [-N_i/2, N_i/2)): midpoint + (j_i/N_i) * length.
inline Point grid_point(const Grid& g, const MultiIndex& j) {
  Point x{};
  for (int i = 0; i < g.dim(); ++i) {
    if (j[i] < -g.N[i] / 2 || j[i] >= g.N[i] / 2)
      throw ContractError("grid_point: index out of range");
    x[i] = g.domain.center(i) +
           (static_cast<double>(j[i]) / g.N[i]) * g.domain.length(i);
  }
  return x;
}

// Wrap a coordinate into [lo, hi) by shifting with integer multiples of the period.
inline double wrap_periodic(double x, double lo, double hi) {
  if (!std::isfinite(x)) throw ContractError("wrap_periodic: non-finite coordinate");
  const double L = hi - lo;
  double r = x - L * std::floor((x - lo) / L);
  if (r >= hi) r = lo;  // rounding guard: keep the half-open interval
  if (r < lo) r = lo;
  return r;
}

inline Point wrap_periodic(const Domain& dom, Point x) {
  for (int i = 0; i < dom.dim; ++i) x[i] = wrap_periodic(x[i], dom.lo[i], dom.hi[i]);
  return x;
}

inline std::size_t flatten(const Grid& g, const MultiIndex& j) {
  std::size_t flat = 0;
  for (int i = 0; i < g.dim(); ++i) {
    const int s = j[i] + g.N[i] / 2;
    if (s < 0 || s >= g.N[i]) throw ContractError("flatten: index out of range");
    flat = flat * static_cast<std::size_t>(g.N[i]) + static_cast<std::size_t>(s);
  }
  return flat;
}

inline MultiIndex unflatten(const Grid& g, std::size_t flat) {
  MultiIndex j{};
  for (int i = g.dim() - 1; i >= 0; --i) {
    const std::size_t n = static_cast<std::size_t>(g.N[i]);
    j[i] = static_cast<int>(flat % n) - g.N[i] / 2;
    flat /= n;
  }
  if (flat != 0) throw ContractError("unflatten: flat index out of range");
  return j;
}

// Visit all nodes in storage (row-major) order: fn(flatIndex, signedMultiIndex).
template <class Fn>
inline void for_each_index(const Grid& g, Fn&& fn) {
  const std::size_t total = g.size();
  MultiIndex j{};
  for (int i = 0; i < g.dim(); ++i) j[i] = -g.N[i] / 2;
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, j);
    for (int i = g.dim() - 1; i >= 0; --i) {
      if (++j[i] < g.N[i] / 2) break;
      j[i] = -g.N[i] / 2;
    }
  }
}

// Symbol of the kinetic operator on the plane-wave basis for wavenumber k:
// i * (eps/2) * sum_i (2*pi*k_i / L_i)^2. Purely imaginary; symmetric in k -> -k.
inline std::complex<double> wavenumber_eigenvalue(const Grid& g, const MultiIndex& k,
                                                  double eps) {
  double s = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    const double w = 2.0 * std::numbers::pi * k[i] / g.domain.length(i);
    s += w * w;
  }
  return {0.0, 0.5 * eps * s};
}

}  // namespace magsplit
