#pragma once
// Pointwise potential propagator.
//
// Solves d/dt u = -(i/eps) (|A|^2/2 + V) u node by node. With time-independent
// samplers the flow is the exact unimodular exponential; time-dependent
// samplers are integrated in time with Gauss-Legendre quadrature of the phase.
// When the vector potential is not divergence-free, the generator gains the
// real term (1/2) div A, which shows up as a real exponent and (intentionally)
// breaks norm conservation of this substep.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "magsplit/grid.hpp"
#include "magsplit/spectral.hpp"

namespace magsplit {

using ScalarSampler = std::function<double(double, const Point&)>;   // (t, x) -> V
using VectorSampler = std::function<Point(double, const Point&)>;    // (t, x) -> A

struct PotentialSet {
  ScalarSampler V;
  VectorSampler A;
  bool timeDependent = false;
};

struct PotentialStepConfig {
  bool divergenceFree = true;
  std::vector<double> halfDivA;  // grid samples of (1/2) div A; used when not div-free
  int quadratureNodes = 8;       // per-step nodes for time-dependent phases
};

namespace detail {

// Gauss-Legendre nodes/weights on [0, 1], by Newton iteration on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& nodes,
                              std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess on [-1, 1]
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // evaluate P_n and P_n' by the three-term recurrence
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    nodes[i] = 0.5 * (1.0 - x);  // mirror-mapped to [0, 1]
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

}  // namespace detail

// Phase integral -(1/eps) * int_0^tau (|A|^2/2 + V)(t0 + s, x) ds for one node.
inline double potential_phase(const PotentialSet& P, double eps, double tau, double t0,
                              const Point& x, int quadratureNodes) {
  auto integrand = [&](double t) {
    const Point a = P.A(t, x);
    double s = P.V(t, x);
    for (double ai : a) s += 0.5 * ai * ai;
    return s;
  };
  if (!P.timeDependent) return -tau * integrand(t0) / eps;
  std::vector<double> nodes, weights;
  detail::gauss_legendre_01(quadratureNodes, nodes, weights);
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q)
    acc += weights[q] * integrand(t0 + tau * nodes[q]);
  return -tau * acc / eps;
}

// The per-node multiplier field for one application of the substep. Both the
// public step and any caching caller go through this, so cached and direct
// applications are bit-identical.
inline std::vector<std::complex<double>> potential_multiplier(
    const Grid& g, const PotentialSet& P, double eps, double tau, double t0,
    const PotentialStepConfig& cfg = {}) {
  if (!cfg.divergenceFree && cfg.halfDivA.size() != g.size())
    throw ContractError("potential_multiplier: halfDivA must be sampled on the grid");
  std::vector<std::complex<double>> mult(g.size());
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    const Point x = grid_point(g, j);
    std::complex<double> m =
        std::polar(1.0, potential_phase(P, eps, tau, t0, x, cfg.quadratureNodes));
    if (!cfg.divergenceFree) m *= std::exp(tau * cfg.halfDivA[flat]);
    mult[flat] = m;
  });
  return mult;
}

inline WaveField potential_step(const WaveField& u, const PotentialSet& P, double eps,
                                double tau, double t0 = 0.0,
                                const PotentialStepConfig& cfg = {}) {
  const auto mult = potential_multiplier(u.grid, P, eps, tau, t0, cfg);
  WaveField out = u;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= mult[i];
  return out;
}

// Double the Gauss-Legendre node count until two successive phase estimates
// agree to 1e-14 on a spread of probe nodes. Intended to run once per plan.
inline int calibrated_quadrature_nodes(const Grid& g, const PotentialSet& P, double eps,
                                       double tau, double t0, int start = 8) {
  if (!P.timeDependent) return start;
  std::vector<Point> probes;
  const std::size_t stride = std::max<std::size_t>(1, g.size() / 16);
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    if (flat % stride == 0) probes.push_back(grid_point(g, j));
  });
  int n = start;
  for (; n <= 1024; n *= 2) {
    double worst = 0.0;
    for (const Point& x : probes)
      worst = std::max(worst, std::abs(potential_phase(P, eps, tau, t0, x, n) -
                                       potential_phase(P, eps, tau, t0, x, 2 * n)));
    if (worst <= 1e-14) break;
  }
  return n;
}

}  // namespace magsplit
