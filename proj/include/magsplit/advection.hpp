#pragma once
// Semi-Lagrangian advection step for the transport part
//     d/dt u = A(t, x) . grad u,
// whose exact solution follows characteristics: u(t_n + tau, x) =
// u(t_n, y(tau)) with  y'(r) = A(t_n + tau - r, y),  y(0) = x.
//
// The departure points ("feet") are integrated per grid node with classical
// RK4 substeps; the field value at a foot is then recovered from the grid
// data by one of three interchangeable evaluation backends:
//   DIRECT       exact trigonometric evaluation by full Fourier summation,
//                O(prod N) per point -- the accuracy reference,
//   LOCAL_INTERP tensor-product Lagrange interpolation of even order p on
//                the p^d surrounding nodes with periodic wraparound,
//   NFFT         nonequispaced FFT evaluation of the same trigonometric
//                interpolant up to window accuracy, at FFT cost.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "magsplit/grid.hpp"
#include "magsplit/nfft.hpp"
#include "magsplit/potential.hpp"
#include "magsplit/spectral.hpp"

namespace magsplit {

enum class AdvectionBackend { DIRECT, LOCAL_INTERP, NFFT };

struct AdvectionConfig {
  AdvectionBackend backend = AdvectionBackend::NFFT;
  int interpOrder = 4;  // even, >= 2 (LOCAL_INTERP)
  int nfftCutoff = 8;   // window taps per side (NFFT)
  NfftPrecompute nfftMode = NfftPrecompute::PRE_PSI;
  std::size_t nfftMemBudget = std::size_t{2} << 30;
  int substeps = 16;  // RK4 substeps per departure-point solve
};

struct DeparturePoints {
  Grid grid;
  double tau = 0.0;
  std::vector<Point> feet;  // wrapped into the domain, flat storage order
};

// Trace every grid node along y' = A(tStart + tau - r, y) from r = 0 to tau.
inline DeparturePoints compute_departure_points(const Grid& g, const VectorSampler& A,
                                                double tau, double tStart = 0.0,
                                                int substeps = 16) {
  if (substeps < 1) throw ContractError("compute_departure_points: substeps >= 1");
  DeparturePoints dp;
  dp.grid = g;
  dp.tau = tau;
  dp.feet.resize(g.size());
  if (tau == 0.0) {
    for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
      dp.feet[flat] = grid_point(g, j);
    });
    return dp;
  }
  const int d = g.domain.dim;
  const double h = tau / substeps;
  auto rhs = [&](double r, const Point& y) {
    Point yw = y;
    for (int i = 0; i < d; ++i)
      yw[i] = wrap_periodic(yw[i], g.domain.lo[i], g.domain.hi[i]);
    return A(tStart + tau - r, yw);
  };
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    Point y = grid_point(g, j);
    for (int s = 0; s < substeps; ++s) {
      const double r0 = s * h;
      const Point k1 = rhs(r0, y);
      Point y2 = y, y3 = y, y4 = y;
      for (int i = 0; i < d; ++i) y2[i] += 0.5 * h * k1[i];
      const Point k2 = rhs(r0 + 0.5 * h, y2);
      for (int i = 0; i < d; ++i) y3[i] += 0.5 * h * k2[i];
      const Point k3 = rhs(r0 + 0.5 * h, y3);
      for (int i = 0; i < d; ++i) y4[i] += h * k3[i];
      const Point k4 = rhs(r0 + h, y4);
      for (int i = 0; i < d; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (int i = 0; i < d; ++i)
      y[i] = wrap_periodic(y[i], g.domain.lo[i], g.domain.hi[i]);
    dp.feet[flat] = y;
  });
  return dp;
}

// DIRECT backend: evaluate the trigonometric interpolant by full summation.
inline std::vector<std::complex<double>> evaluate_direct(
    const SpectralField& s, const std::vector<Point>& pts) {
  std::vector<std::complex<double>> out(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) out[q] = eval_at(s, pts[q]);
  return out;
}

// LOCAL_INTERP backend: tensor-product Lagrange interpolation of even order p.
// Along each axis the p-node stencil brackets the target between its two
// middle nodes; a target exactly on a node binds to the stencil whose right
// middle node it is, which reproduces the node value exactly.
inline std::vector<std::complex<double>> evaluate_lagrange(
    const WaveField& u, const std::vector<Point>& pts, int p) {
  if (p < 2 || p % 2 != 0)
    throw ContractError("evaluate_lagrange: order must be even and >= 2");
  const Grid& g = u.grid;
  const int d = g.domain.dim;
  for (int i = 0; i < d; ++i)
    if (p > g.N[i]) throw ContractError("evaluate_lagrange: order exceeds grid size");

  std::array<std::size_t, kMaxDim> stride{};
  {
    std::size_t s = 1;
    for (int i = d - 1; i >= 0; --i) {
      stride[i] = s;
      s *= static_cast<std::size_t>(g.N[i]);
    }
  }

  std::vector<std::complex<double>> out(pts.size());
  std::array<std::array<double, 16>, kMaxDim> w{};           // p <= 16 in practice
  std::array<std::array<std::size_t, 16>, kMaxDim> nodeIdx{};
  if (p > 16) throw ContractError("evaluate_lagrange: order capped at 16");
  std::size_t tensor = 1;
  for (int i = 0; i < d; ++i) tensor *= static_cast<std::size_t>(p);

  for (std::size_t q = 0; q < pts.size(); ++q) {
    for (int i = 0; i < d; ++i) {
      const int N = g.N[i];
      const double h = g.h(i);
      const double mid = g.domain.center(i);
      const double theta = (pts[q][i] - mid) / h;  // real-valued signed index
      const int jstar = static_cast<int>(std::floor(theta)) + 1;
      const double t = theta - jstar;  // in [-1, 0)
      for (int o = -p / 2; o <= p / 2 - 1; ++o) {
        double wk = 1.0;
        for (int o2 = -p / 2; o2 <= p / 2 - 1; ++o2)
          if (o2 != o) wk *= (t - o2) / static_cast<double>(o - o2);
        const int jnode = jstar + o;
        const int snode = ((jnode + N / 2) % N + N) % N;
        w[i][static_cast<std::size_t>(o + p / 2)] = wk;
        nodeIdx[i][static_cast<std::size_t>(o + p / 2)] =
            static_cast<std::size_t>(snode) * stride[i];
      }
    }
    std::complex<double> acc{0.0, 0.0};
    std::array<std::size_t, kMaxDim> r{};
    for (std::size_t idx = 0; idx < tensor; ++idx) {
      double wk = w[0][r[0]];
      std::size_t lin = nodeIdx[0][r[0]];
      for (int i = 1; i < d; ++i) {
        wk *= w[i][r[i]];
        lin += nodeIdx[i][r[i]];
      }
      acc += wk * u.values[lin];
      for (int i = d - 1; i >= 0; --i) {
        if (++r[i] < static_cast<std::size_t>(p)) break;
        r[i] = 0;
      }
    }
    out[q] = acc;
  }
  return out;
}

// NFFT backend: the interpolant sum_k chat_k E_k(x) maps onto the transform
// kernel exp(-2 pi i k.y) with y = -(x - lo)/L on the torus, up to the
// basis normalization 1/sqrt(prod L).
struct AdvectionNfft {
  NfftPlan plan;
  double scale = 1.0;
};

inline AdvectionNfft make_advection_nfft(const Grid& g, const std::vector<Point>& pts,
                                         int m = 8,
                                         NfftPrecompute mode = NfftPrecompute::PRE_PSI,
                                         std::size_t memBudgetBytes = std::size_t{2}
                                                                      << 30) {
  const int d = g.domain.dim;
  std::vector<Point> torus(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) {
    for (int i = 0; i < d; ++i) {
      const double frac = (pts[q][i] - g.domain.lo[i]) / g.domain.length(i);
      torus[q][i] = wrap_periodic(-frac, -0.5, 0.5);
    }
  }
  AdvectionNfft an{plan_nfft(d, g.N, std::move(torus), m, mode, memBudgetBytes), 1.0};
  an.scale = 1.0 / std::sqrt(g.domain.volume());
  return an;
}

inline std::vector<std::complex<double>> evaluate_nfft(const AdvectionNfft& an,
                                                       const SpectralField& s) {
  auto vals = nfft_execute(an.plan, s.coeffs);
  for (auto& v : vals) v *= an.scale;
  return vals;
}

// One advection step: resample u at the departure points with the chosen
// backend. tau = 0 short-circuits to an exact copy.
inline WaveField advection_step(const WaveField& u, const DeparturePoints& dp,
                                const AdvectionConfig& cfg) {
  if (u.grid.size() != dp.grid.size() || u.grid.domain.dim != dp.grid.domain.dim)
    throw ContractError("advection_step: grid mismatch");
  WaveField out = u;
  if (dp.tau == 0.0) return out;
  switch (cfg.backend) {
    case AdvectionBackend::DIRECT: {
      const SpectralField s = to_spectral(u);
      out.values = evaluate_direct(s, dp.feet);
      break;
    }
    case AdvectionBackend::LOCAL_INTERP:
      out.values = evaluate_lagrange(u, dp.feet, cfg.interpOrder);
      break;
    case AdvectionBackend::NFFT: {
      const SpectralField s = to_spectral(u);
      const auto an = make_advection_nfft(u.grid, dp.feet, cfg.nfftCutoff, cfg.nfftMode,
                                          cfg.nfftMemBudget);
      out.values = evaluate_nfft(an, s);
      break;
    }
  }
  return out;
}

}  // namespace magsplit
