#pragma once
// Coulomb gauge preprocessing.
//
// Given a (periodic, time-independent) vector potential A, solve
//     eps * Laplacian(lambda) = -div A
// spectrally on the grid, with the zero mode of lambda pinned to zero. The
// gauged data are then
//     A~ = A + eps * grad(lambda),   V~ = V,   u~ = u * exp(i lambda),
// with div A~ = 0. Spatial observables |u| are unchanged by the transform.
//
// Off-grid evaluation of grad(lambda) (needed when tracing characteristics
// through arbitrary points) uses the trigonometric expansion of each gradient
// component, compressed to the modes that carry weight; an exactly
// divergence-free A compresses to nothing and the original samplers are
// returned untouched.

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "magsplit/potential.hpp"
#include "magsplit/spectral.hpp"

namespace magsplit {

struct GaugeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Multiply spectral coefficients by the derivative symbol i * 2 pi k_a / L_a
// along one axis. The unpaired highest mode k_a = -N_a/2 is zeroed, the usual
// convention for odd-order spectral derivatives of real data.
inline void apply_derivative_symbol(SpectralField& s, int axis) {
  const Grid& g = s.grid;
  const double L = g.domain.length(axis);
  for_each_index(g, [&](std::size_t flat, const MultiIndex& k) {
    if (k[axis] == -g.N[axis] / 2) {
      s.coeffs[flat] = 0.0;
    } else {
      s.coeffs[flat] *= std::complex<double>(
          0.0, 2.0 * std::numbers::pi * k[axis] / L);
    }
  });
}

}  // namespace detail

// Spectral partial derivative of a real grid field along one axis.
inline std::vector<double> spectral_derivative(const Grid& g,
                                               const std::vector<double>& f,
                                               int axis) {
  WaveField w = make_wave_field(g);
  for (std::size_t i = 0; i < f.size(); ++i) w.values[i] = f[i];
  SpectralField s = to_spectral(w);
  detail::apply_derivative_symbol(s, axis);
  const WaveField d = to_physical(s);
  std::vector<double> out(d.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d.values[i].real();
  return out;
}

// Spectral divergence of a vector field given by per-axis grid samples.
// Exact (to round-off) for trigonometric polynomials resolvable on the grid.
inline std::vector<double> spectral_divergence(
    const Grid& g, const std::array<std::vector<double>, kMaxDim>& comps) {
  std::vector<double> div(g.size(), 0.0);
  for (int axis = 0; axis < g.dim(); ++axis) {
    if (comps[axis].size() != g.size())
      throw ContractError("spectral_divergence: component not sampled on the grid");
    const std::vector<double> d = spectral_derivative(g, comps[axis], axis);
    for (std::size_t i = 0; i < div.size(); ++i) div[i] += d[i];
  }
  return div;
}

struct GaugeField {
  Grid grid;
  double epsilon = 1.0;
  std::vector<double> lambda;                            // zero-mean grid samples
  std::array<std::vector<double>, kMaxDim> gradLambda;   // grid samples per axis
  struct Mode {
    MultiIndex k;
    std::complex<double> c;
  };
  // compressed trigonometric expansion of each gradient component
  std::array<std::vector<Mode>, kMaxDim> gradModes;
  double maxAbsLambda = 0.0;

  bool trivial() const {
    for (int i = 0; i < grid.dim(); ++i)
      if (!gradModes[i].empty()) return false;
    return true;
  }

  // eps * grad(lambda) at an arbitrary point, one axis.
  double epsGradAt(int axis, const Point& x) const {
    std::complex<double> acc{0.0, 0.0};
    for (const Mode& m : gradModes[axis]) acc += m.c * basis_value(grid, m.k, x);
    return epsilon * acc.real();
  }
};

// Solve for the Coulomb gauge of A sampled at t = 0.
//
// A periodicity probe guards against vector potentials whose divergence has a
// nonzero mean (such fields admit no periodic gauge): sampling A one grid
// spacing to each side makes the probe cancel exactly for genuinely periodic
// samplers and exposes secular growth otherwise.
inline GaugeField coulomb_gauge(const Grid& g, const VectorSampler& A, double eps) {
  if (!(eps > 0.0)) throw ContractError("coulomb_gauge: eps must be positive");

  std::array<std::vector<double>, kMaxDim> samples;
  double maxAbsA = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) samples[axis].resize(g.size());
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    const Point a = A(0.0, grid_point(g, j));
    for (int axis = 0; axis < g.dim(); ++axis) {
      samples[axis][flat] = a[axis];
      maxAbsA = std::max(maxAbsA, std::abs(a[axis]));
    }
  });

  // periodicity / zero-mean-divergence probe
  double meanDiv = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double h = g.h(axis);
    double acc = 0.0;
    for_each_index(g, [&](std::size_t, const MultiIndex& j) {
      Point xp = grid_point(g, j), xm = xp;
      xp[axis] += h;
      xm[axis] -= h;
      acc += (A(0.0, xp)[axis] - A(0.0, xm)[axis]) / (2.0 * h);
    });
    meanDiv += acc / static_cast<double>(g.size());
  }
  if (std::abs(meanDiv) > 1e-8 * (1.0 + maxAbsA))
    throw GaugeError("coulomb_gauge: divergence of A has nonzero mean "
                     "(no periodic gauge exists for this field)");

  const std::vector<double> div = spectral_divergence(g, samples);

  WaveField divW = make_wave_field(g);
  for (std::size_t i = 0; i < div.size(); ++i) divW.values[i] = div[i];
  SpectralField lamHat = to_spectral(divW);
  for_each_index(g, [&](std::size_t flat, const MultiIndex& k) {
    double w2 = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
      const double w = 2.0 * std::numbers::pi * k[i] / g.domain.length(i);
      w2 += w * w;
    }
    if (w2 == 0.0) {
      lamHat.coeffs[flat] = 0.0;  // zero-mean normalization of lambda
    } else {
      lamHat.coeffs[flat] /= eps * w2;
    }
  });

  GaugeField out;
  out.grid = g;
  out.epsilon = eps;
  const WaveField lam = to_physical(lamHat);
  out.lambda.resize(lam.values.size());
  for (std::size_t i = 0; i < out.lambda.size(); ++i) {
    out.lambda[i] = lam.values[i].real();
    out.maxAbsLambda = std::max(out.maxAbsLambda, std::abs(out.lambda[i]));
  }

  // gradient: grid samples plus compressed modes for off-grid evaluation
  double vol = 1.0;
  for (int i = 0; i < g.dim(); ++i) vol *= g.domain.length(i);
  const double coeffTol = 1e-13 * (1.0 + maxAbsA) * std::sqrt(vol);
  for (int axis = 0; axis < g.dim(); ++axis) {
    SpectralField gHat = lamHat;
    detail::apply_derivative_symbol(gHat, axis);
    const WaveField gw = to_physical(gHat);
    out.gradLambda[axis].resize(gw.values.size());
    for (std::size_t i = 0; i < gw.values.size(); ++i)
      out.gradLambda[axis][i] = gw.values[i].real();
    for_each_index(g, [&](std::size_t flat, const MultiIndex& k) {
      if (std::abs(gHat.coeffs[flat]) > coeffTol)
        out.gradModes[axis].push_back({k, gHat.coeffs[flat]});
    });
  }
  return out;
}

// Gauged potentials: A~ = A + eps grad(lambda), V~ = V. A gauge that came out
// identically zero hands back the original samplers unchanged.
inline PotentialSet transform_potentials(const PotentialSet& P, const GaugeField& gf) {
  if (gf.trivial()) return P;
  auto gauge = std::make_shared<const GaugeField>(gf);
  const VectorSampler baseA = P.A;
  const int dim = gf.grid.dim();
  PotentialSet out;
  out.V = P.V;
  out.timeDependent = P.timeDependent;
  out.A = [gauge, baseA, dim](double t, const Point& x) {
    Point a = baseA(t, x);
    for (int axis = 0; axis < dim; ++axis) a[axis] += gauge->epsGradAt(axis, x);
    return a;
  };
  return out;
}

// u~ = u exp(+i lambda) (forward) or u exp(-i lambda) (inverse).
inline WaveField transform_wavefunction(const WaveField& u, const GaugeField& gf,
                                        bool forward = true) {
  if (u.values.size() != gf.lambda.size())
    throw ContractError("transform_wavefunction: grid mismatch");
  WaveField out = u;
  const double sign = forward ? 1.0 : -1.0;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= std::polar(1.0, sign * gf.lambda[i]);
  return out;
}

}  // namespace magsplit
