#pragma once
// Nonequispaced fast Fourier transform (evaluation direction), from scratch.
//
// Given coefficients fhat_k for k in I_N = prod_i [-N_i/2, N_i/2) and
// arbitrary points y^q in the torus [-1/2, 1/2)^d, approximates
//     f(y^q) = sum_{k in I_N} fhat_k exp(-2 pi i k . y^q)
// in O(prod n_i log n_i + (2m+1)^d #points) work:
//
//   1. deconvolution: ghat_k = fhat_k / prod_i c_{k_i}, zero-padded to the
//      oversampled index set I_n, where c_k are the Fourier coefficients of
//      the 1-periodized Kaiser-Bessel window,
//   2. an inverse-type FFT of length n_i per axis (n_i the smallest power of
//      two >= 2 N_i, so the oversampling factor sigma_i = n_i/N_i lies in
//      [2, 4)), giving samples g_l on the fine grid,
//   3. a windowed gather per point with the compactly supported truncation
//      psi = phi * chi_[-m/n, m/n]: at most (2m+1) taps per axis.
//
// The window shape parameter is beta = pi (2 - 1/sigma) with the rounded
// sigma = n/N. The cutoff m = 8 reaches near double-precision accuracy; m = 4
// trades several orders of accuracy for speed.
//
// Precompute modes trade memory for the per-tap window evaluations:
// ON_THE_FLY stores nothing, PRE_PSI stores d(2m+1) weights per point,
// PRE_FULL_PSI stores the (2m+1)^d tensor products per point. All three run
// the identical arithmetic in the identical order, so their outputs are
// bit-identical; PRE_FULL_PSI refuses to build if its table would exceed the
// configured memory budget.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "magsplit/fft.hpp"
#include "magsplit/grid.hpp"

namespace magsplit {

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NfftPrecompute { ON_THE_FLY, PRE_PSI, PRE_FULL_PSI };

// Kaiser-Bessel window, continuous in x with value beta/pi at |x| = m/n:
// inside the bump (|x| < m/n) a sinh profile, outside its oscillating decay.
inline double kb_window(double x, int n, int m, double beta) {
  const double nx = static_cast<double>(n) * x;
  const double t = static_cast<double>(m) * m - nx * nx;
  if (t > 0.0) {
    const double s = std::sqrt(t);
    return std::sinh(beta * s) / (std::numbers::pi * s);
  }
  if (t < 0.0) {
    const double s = std::sqrt(-t);
    return std::sin(beta * s) / (std::numbers::pi * s);
  }
  return beta / std::numbers::pi;
}

// The truncated window used in the gather stage: phi restricted to its bump.
inline double kb_window_truncated(double x, int n, int m, double beta) {
  const double nx = static_cast<double>(n) * x;
  const double t = static_cast<double>(m) * m - nx * nx;
  if (t > 0.0) {
    const double s = std::sqrt(t);
    return std::sinh(beta * s) / (std::numbers::pi * s);
  }
  if (t < 0.0) return 0.0;
  return beta / std::numbers::pi;
}

// Fourier coefficients c_k of the periodized window, k in [-n/2, n/2) stored
// at t = k + n/2. The integrand decays from its huge central bump to
// O(1) at the truncation radius m/n, so a 2048-point midpoint rule over the
// bump alone is already converged far beyond the accuracy of the transform;
// the omitted oscillatory tail is ~16 orders below the bump's contribution.
inline std::vector<double> window_fourier_coeffs(int n, int m, double beta) {
  constexpr int kQuadPoints = 2048;
  const double radius = static_cast<double>(m) / n;
  const double width = 2.0 * radius;
  std::vector<double> phi(kQuadPoints), xs(kQuadPoints);
  for (int q = 0; q < kQuadPoints; ++q) {
    xs[q] = -radius + (q + 0.5) * width / kQuadPoints;
    phi[q] = kb_window(xs[q], n, m, beta);
  }
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int k = 0; k <= n / 2; ++k) {
    double acc = 0.0;
    for (int q = 0; q < kQuadPoints; ++q)
      acc += phi[q] * std::cos(2.0 * std::numbers::pi * k * xs[q]);
    acc *= width / kQuadPoints;
    if (k < n / 2) c[static_cast<std::size_t>(k + n / 2)] = acc;
    if (k > 0) c[static_cast<std::size_t>(n / 2 - k)] = acc;  // even in k
  }
  return c;
}

struct NfftPlan {
  int dim = 0;
  std::array<int, kMaxDim> N{};      // bandwidth per axis (even)
  std::array<int, kMaxDim> n{};      // oversampled length per axis (power of two)
  std::array<double, kMaxDim> sigma{};
  std::array<double, kMaxDim> beta{};
  int m = 8;
  NfftPrecompute mode = NfftPrecompute::PRE_PSI;
  std::array<std::vector<double>, kMaxDim> windowCoeffs;  // c_k, index k + n/2
  std::vector<Point> points;                              // in [-1/2, 1/2)^d
  std::vector<double> psi;                                // per-mode weight table
  std::size_t taps() const { return static_cast<std::size_t>(2 * m + 1); }
};

namespace detail {

// The 2m+1 tap weights of one point along one axis. Kept as the single place
// the weight arithmetic lives so that every precompute mode produces
// bit-identical numbers.
inline void axis_tap_weights(const NfftPlan& plan, int axis, double y, double* w) {
  const int n = plan.n[axis];
  const int u = static_cast<int>(std::floor(n * y));
  for (int r = 0; r <= 2 * plan.m; ++r) {
    const int l = u - plan.m + r;
    w[r] = kb_window_truncated(y - static_cast<double>(l) / n, n, plan.m,
                               plan.beta[axis]);
  }
}

inline int tap_anchor(const NfftPlan& plan, int axis, double y) {
  return static_cast<int>(std::floor(plan.n[axis] * y));
}

}  // namespace detail

inline NfftPlan plan_nfft(int dim, const std::array<int, kMaxDim>& N,
                          std::vector<Point> points, int m = 8,
                          NfftPrecompute mode = NfftPrecompute::PRE_PSI,
                          std::size_t memBudgetBytes = std::size_t{2} << 30) {
  if (dim < 1 || dim > kMaxDim) throw PlanError("plan_nfft: dim must be 1..3");
  if (m < 1 || m > 64) throw PlanError("plan_nfft: cutoff m out of range");
  NfftPlan plan;
  plan.dim = dim;
  plan.N = N;
  plan.m = m;
  plan.mode = mode;
  for (int i = 0; i < dim; ++i) {
    if (N[i] < 2 || N[i] % 2 != 0)
      throw PlanError("plan_nfft: bandwidths must be even and >= 2");
    plan.n[i] = static_cast<int>(detail::next_pow2(2 * static_cast<std::size_t>(N[i])));
    plan.sigma[i] = static_cast<double>(plan.n[i]) / N[i];
    plan.beta[i] = std::numbers::pi * (2.0 - 1.0 / plan.sigma[i]);
    if (2 * m > plan.n[i])
      throw PlanError("plan_nfft: window support exceeds the oversampled grid");
  }
  for (auto& p : points) {
    for (int i = 0; i < dim; ++i) {
      if (!std::isfinite(p[i])) throw PlanError("plan_nfft: non-finite point");
      p[i] = wrap_periodic(p[i], -0.5, 0.5);
    }
  }
  plan.points = std::move(points);

  for (int i = 0; i < dim; ++i) {
    // reuse coefficients across axes with the same geometry
    bool copied = false;
    for (int j = 0; j < i; ++j) {
      if (plan.n[j] == plan.n[i] && plan.N[j] == plan.N[i]) {
        plan.windowCoeffs[i] = plan.windowCoeffs[j];
        copied = true;
        break;
      }
    }
    if (!copied)
      plan.windowCoeffs[i] = window_fourier_coeffs(plan.n[i], m, plan.beta[i]);
    for (int k = -N[i] / 2; k < N[i] / 2; ++k) {
      const double c = plan.windowCoeffs[i][static_cast<std::size_t>(k + plan.n[i] / 2)];
      if (!(std::abs(c) >= 1e-300))
        throw PlanError("plan_nfft: window coefficient underflow at wavenumber " +
                        std::to_string(k));
    }
  }

  const std::size_t npts = plan.points.size();
  const std::size_t taps = plan.taps();
  if (mode == NfftPrecompute::PRE_PSI) {
    plan.psi.resize(npts * static_cast<std::size_t>(dim) * taps);
    for (std::size_t q = 0; q < npts; ++q)
      for (int i = 0; i < dim; ++i)
        detail::axis_tap_weights(plan, i, plan.points[q][i],
                                 plan.psi.data() + (q * dim + i) * taps);
  } else if (mode == NfftPrecompute::PRE_FULL_PSI) {
    std::size_t tensor = 1;
    for (int i = 0; i < dim; ++i) tensor *= taps;
    const std::size_t bytes = npts * tensor * sizeof(double);
    if (bytes > memBudgetBytes)
      throw PlanError("plan_nfft: PRE_FULL_PSI table needs " + std::to_string(bytes) +
                      " bytes, over the budget of " + std::to_string(memBudgetBytes) +
                      "; raise the budget or use PRE_PSI");
    plan.psi.resize(npts * tensor);
    std::array<std::array<double, 129>, kMaxDim> axisW{};  // taps <= 2*64+1
    for (std::size_t q = 0; q < npts; ++q) {
      for (int i = 0; i < dim; ++i)
        detail::axis_tap_weights(plan, i, plan.points[q][i], axisW[i].data());
      std::array<std::size_t, kMaxDim> r{};
      for (std::size_t idx = 0; idx < tensor; ++idx) {
        double w = axisW[0][r[0]];
        for (int i = 1; i < dim; ++i) w *= axisW[i][r[i]];
        plan.psi[q * tensor + idx] = w;
        for (int i = dim - 1; i >= 0; --i) {
          if (++r[i] < taps) break;
          r[i] = 0;
        }
      }
    }
  }
  return plan;
}

// Evaluate the transform for one coefficient array (row-major over I_N with
// the grid storage convention t_i = k_i + N_i/2).
inline std::vector<std::complex<double>> nfft_execute(
    const NfftPlan& plan, const std::vector<std::complex<double>>& coeffs) {
  using cd = std::complex<double>;
  std::size_t sizeN = 1, sizen = 1;
  for (int i = 0; i < plan.dim; ++i) {
    sizeN *= static_cast<std::size_t>(plan.N[i]);
    sizen *= static_cast<std::size_t>(plan.n[i]);
  }
  if (coeffs.size() != sizeN)
    throw PlanError("nfft_execute: coefficient count does not match the plan");

  // 1. deconvolve and zero-pad onto the oversampled index set
  std::vector<cd> ghat(sizen, cd{0.0, 0.0});
  {
    std::array<int, kMaxDim> t{};  // storage multi-index over the N-grid
    for (std::size_t flat = 0; flat < sizeN; ++flat) {
      double cprod = 1.0;
      std::size_t flatn = 0;
      for (int i = 0; i < plan.dim; ++i) {
        const int k = t[i] - plan.N[i] / 2;
        cprod *= plan.windowCoeffs[i][static_cast<std::size_t>(k + plan.n[i] / 2)];
        flatn = flatn * static_cast<std::size_t>(plan.n[i]) +
                static_cast<std::size_t>(k + plan.n[i] / 2);
      }
      ghat[flatn] = coeffs[flat] / cprod;
      for (int i = plan.dim - 1; i >= 0; --i) {
        if (++t[i] < plan.N[i]) break;
        t[i] = 0;
      }
    }
  }

  // 2. g_l = (1/prod n_i) sum_k ghat_k exp(-2 pi i k.l/n): with the centered
  // index convention this is a checkerboarded forward FFT per axis plus a
  // per-axis global sign (-1)^{n_i/2} (trivial for n_i divisible by 4).
  {
    std::array<int, kMaxDim> s{};
    int parity = 0;
    for (std::size_t flat = 0; flat < sizen; ++flat) {
      if (parity & 1) ghat[flat] = -ghat[flat];
      for (int i = plan.dim - 1; i >= 0; --i) {
        ++s[i];
        parity ^= 1;
        if (s[i] < plan.n[i]) break;
        s[i] = 0;
      }
    }
    for (int axis = 0; axis < plan.dim; ++axis)
      detail::fft_axis_inplace(ghat.data(), plan.n, plan.dim, axis, false);
    double scale = 1.0;
    for (int i = 0; i < plan.dim; ++i) {
      scale /= static_cast<double>(plan.n[i]);
      if ((plan.n[i] / 2) % 2 != 0) scale = -scale;  // (-1)^{n_i/2}
    }
    std::array<int, kMaxDim> s2{};
    parity = 0;
    for (std::size_t flat = 0; flat < sizen; ++flat) {
      ghat[flat] *= (parity & 1) ? -scale : scale;
      for (int i = plan.dim - 1; i >= 0; --i) {
        ++s2[i];
        parity ^= 1;
        if (s2[i] < plan.n[i]) break;
        s2[i] = 0;
      }
    }
  }
  const std::vector<cd>& g = ghat;

  // 3. windowed gather: at most (2m+1)^d taps per point
  const std::size_t taps = plan.taps();
  std::size_t tensor = 1;
  for (int i = 0; i < plan.dim; ++i) tensor *= taps;
  std::array<std::size_t, kMaxDim> stride{};
  {
    std::size_t s = 1;
    for (int i = plan.dim - 1; i >= 0; --i) {
      stride[i] = s;
      s *= static_cast<std::size_t>(plan.n[i]);
    }
  }

  std::vector<cd> out(plan.points.size());
  std::array<std::array<double, 129>, kMaxDim> axisW{};
  std::array<std::array<std::size_t, 129>, kMaxDim> axisIdx{};
  for (std::size_t q = 0; q < plan.points.size(); ++q) {
    for (int i = 0; i < plan.dim; ++i) {
      const int n = plan.n[i];
      const int u = detail::tap_anchor(plan, i, plan.points[q][i]);
      if (plan.mode == NfftPrecompute::PRE_PSI) {
        const double* src = plan.psi.data() + (q * plan.dim + i) * taps;
        for (std::size_t r = 0; r < taps; ++r) axisW[i][r] = src[r];
      } else if (plan.mode == NfftPrecompute::ON_THE_FLY) {
        detail::axis_tap_weights(plan, i, plan.points[q][i], axisW[i].data());
      }
      for (std::size_t r = 0; r < taps; ++r) {
        const int l = u - plan.m + static_cast<int>(r);
        const int wrapped = ((l + n / 2) % n + n) % n;
        axisIdx[i][r] = static_cast<std::size_t>(wrapped) * stride[i];
      }
    }
    cd acc{0.0, 0.0};
    std::array<std::size_t, kMaxDim> r{};
    const double* fullRow =
        plan.mode == NfftPrecompute::PRE_FULL_PSI ? plan.psi.data() + q * tensor : nullptr;
    for (std::size_t idx = 0; idx < tensor; ++idx) {
      double w;
      if (fullRow) {
        w = fullRow[idx];
      } else {
        w = axisW[0][r[0]];
        for (int i = 1; i < plan.dim; ++i) w *= axisW[i][r[i]];
      }
      std::size_t lin = axisIdx[0][r[0]];
      for (int i = 1; i < plan.dim; ++i) lin += axisIdx[i][r[i]];
      acc += w * g[lin];
      for (int i = plan.dim - 1; i >= 0; --i) {
        if (++r[i] < taps) break;
        r[i] = 0;
      }
    }
    out[q] = acc;
  }
  return out;
}

}  // namespace magsplit
