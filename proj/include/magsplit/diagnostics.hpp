#pragma once
// Observables, error norms, convergence-order fitting, stage timing, and the
// per-run report structure.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magsplit/spectral.hpp"

namespace magsplit {

// Discrete mass: cellVolume * sum_j |u(x^j)|^2.
inline double mass(const WaveField& u) {
  double s = 0.0;
  for (const auto& v : u.values) s += std::norm(v);
  return u.grid.cellVolume() * s;
}

// Scaled l2 distance on a shared grid: sqrt(cellVolume * sum_j |u - ref|^2).
inline double l2_error(const WaveField& u, const WaveField& ref) {
  if (u.values.size() != ref.values.size())
    throw ContractError("l2_error: fields live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    s += std::norm(u.values[i] - ref.values[i]);
  return std::sqrt(u.grid.cellVolume() * s);
}

inline double linf_diff(const WaveField& u, const WaveField& ref) {
  if (u.values.size() != ref.values.size())
    throw ContractError("linf_diff: fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    m = std::max(m, std::abs(u.values[i] - ref.values[i]));
  return m;
}

// Least-squares slope of log(error) against log(tau). Needs >= 3 samples with
// positive tau and error; rescaling all errors by a common factor leaves the
// slope unchanged.
inline double fit_order(const std::vector<double>& taus,
                        const std::vector<double>& errors) {
  if (taus.size() != errors.size() || taus.size() < 3)
    throw ContractError("fit_order: need at least 3 (tau, error) samples");
  const std::size_t n = taus.size();
  std::vector<double> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(taus[i] > 0.0) || !(errors[i] > 0.0))
      throw ContractError("fit_order: undefined for non-positive tau or error");
    X[i] = std::log(taus[i]);
    Y[i] = std::log(errors[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (sxx == 0.0) throw ContractError("fit_order: tau samples must be distinct");
  return sxy / sxx;
}

// Accumulated wall-clock seconds per named stage.
struct StageTimings {
  std::map<std::string, double> seconds;
  void add(const std::string& stage, double dt) { seconds[stage] += dt; }
};

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct ExperimentReport {
  std::vector<double> massSeries;       // steps + 1 entries, massSeries[0] = initial
  double maxMassDeviation = 0.0;        // max_n |m_n - m_0| / m_0
  std::map<double, double> errors;      // tau -> scaled l2 error vs reference
  std::optional<double> fittedOrder;
  StageTimings timings;
  std::map<std::string, std::string> config;  // echo of the effective settings
};

}  // namespace magsplit
