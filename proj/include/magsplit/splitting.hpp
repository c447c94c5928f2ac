#pragma once
// Exponential operator splitting for the gauged magnetic Schroedinger
// equation
//     i eps d/dt u = -(eps^2/2) Lap u + i eps A . grad u
//                    + (|A|^2 / 2) u + V u
// on a periodic hyperrectangle, with divergence-free A. One time step
// composes three exactly solvable flows:
//     B  multiplication by exp(-i tau (|A|^2/2 + V) / eps)   (potential)
//     A  Fourier multiplier of the free kinetic flow          (kinetic)
//     C  semi-Lagrangian resampling along characteristics     (advection)
// as either the first-order Lie product C A B or the symmetric second-order
// Strang product B_1/2 A_1/2 C A_1/2 B_1/2 (advection once, over the full
// step).
//
// For time-independent data the departure points, the potential multipliers
// and the nonequispaced-transform plan are all built once and reused every
// step; time-dependent data rebuilds them per step at the correct time slice.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "magsplit/advection.hpp"
#include "magsplit/diagnostics.hpp"
#include "magsplit/gauge.hpp"
#include "magsplit/grid.hpp"
#include "magsplit/potential.hpp"
#include "magsplit/spectral.hpp"

namespace magsplit {

enum class SplittingScheme { LIE, STRANG };

struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulationProblem {
  Grid grid;
  double epsilon = 1.0;
  PotentialSet potentials;              // gauged (divergence-free) by the caller
  PotentialStepConfig potentialConfig;  // carries the correction for ungauged runs
  std::function<std::complex<double>(const Point&)> initial;
  double T = 0.0;
  int steps = 1;
  SplittingScheme scheme = SplittingScheme::STRANG;
  AdvectionConfig advection;
};

// Called after every step (and once for the initial state) with the step
// index, the physical time and the current wave function.
using StepObserver = std::function<void(int, double, const WaveField&)>;

struct PropagationResult {
  WaveField u;
  ExperimentReport report;
};

class SplitStepper {
 public:
  explicit SplitStepper(const SimulationProblem& prob, StageTimings* timings = nullptr)
      : prob_(prob), timings_(timings) {
    if (prob_.steps < 1) throw ContractError("splitting: steps must be >= 1");
    if (!(std::isfinite(prob_.T)) || prob_.T < 0.0)
      throw ContractError("splitting: final time must be finite and >= 0");
    if (!prob_.potentials.V || !prob_.potentials.A)
      throw ContractError("splitting: potential samplers are required");
    tau_ = prob_.T / prob_.steps;
    if (tau_ != 0.0 && !prob_.potentials.timeDependent) prepare();
  }

  double tau() const { return tau_; }

  // Advance u from t_n = stepIndex * tau to t_n + tau in place.
  void advance(WaveField& u, int stepIndex) {
    if (tau_ == 0.0) return;  // every sub-flow is the identity
    const double tn = stepIndex * tau_;
    if (prob_.scheme == SplittingScheme::LIE)
      lieStep(u, tn);
    else
      strangStep(u, tn);
  }

 private:
  void record(const char* stage, const StageTimer& t) {
    if (timings_) timings_->add(stage, t.elapsed());
  }

  void prepare() {
    const StageTimer t;
    feet_ = compute_departure_points(prob_.grid, prob_.potentials.A, tau_, 0.0,
                                     prob_.advection.substeps);
    potFull_ = potential_multiplier(prob_.grid, prob_.potentials, prob_.epsilon, tau_,
                                    0.0, prob_.potentialConfig);
    if (prob_.scheme == SplittingScheme::STRANG)
      potHalf_ = potential_multiplier(prob_.grid, prob_.potentials, prob_.epsilon,
                                      0.5 * tau_, 0.0, prob_.potentialConfig);
    if (prob_.advection.backend == AdvectionBackend::NFFT) {
      nfft_ = make_advection_nfft(prob_.grid, feet_.feet, prob_.advection.nfftCutoff,
                                  prob_.advection.nfftMode, prob_.advection.nfftMemBudget);
    }
    record("setup", t);
  }

  static void applyMultiplier(WaveField& u, const std::vector<std::complex<double>>& m) {
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] *= m[i];
  }

  // Potential flow over [t0, t0 + dt].
  void potentialFlow(WaveField& u, double t0, double dt, bool half) {
    const StageTimer t;
    if (prob_.potentials.timeDependent) {
      applyMultiplier(u, potential_multiplier(prob_.grid, prob_.potentials,
                                              prob_.epsilon, dt, t0,
                                              prob_.potentialConfig));
    } else {
      applyMultiplier(u, half ? potHalf_ : potFull_);
    }
    record("potential", t);
  }

  SpectralField kineticFlow(const WaveField& u, double dt) {
    const StageTimer tTrans;
    SpectralField s = to_spectral(u);
    record("transform", tTrans);
    const StageTimer tKin;
    s = kinetic_step(s, dt, prob_.epsilon);
    record("kinetic", tKin);
    return s;
  }

  // Advection flow over [tn, tn + tau]: resample at the departure points.
  void advectionFlow(WaveField& u, const SpectralField& s, double tn) {
    const DeparturePoints* feet = &feet_;
    DeparturePoints local;
    if (prob_.potentials.timeDependent) {
      const StageTimer tFeet;
      local = compute_departure_points(prob_.grid, prob_.potentials.A, tau_, tn,
                                       prob_.advection.substeps);
      feet = &local;
      record("setup", tFeet);
    }
    const StageTimer t;
    switch (prob_.advection.backend) {
      case AdvectionBackend::DIRECT:
        u.values = evaluate_direct(s, feet->feet);
        break;
      case AdvectionBackend::LOCAL_INTERP: {
        const WaveField phys = to_physical(s);
        u.values = evaluate_lagrange(phys, feet->feet, prob_.advection.interpOrder);
        break;
      }
      case AdvectionBackend::NFFT: {
        if (prob_.potentials.timeDependent) {
          const auto plan =
              make_advection_nfft(prob_.grid, feet->feet, prob_.advection.nfftCutoff,
                                  prob_.advection.nfftMode, prob_.advection.nfftMemBudget);
          u.values = evaluate_nfft(plan, s);
        } else {
          u.values = evaluate_nfft(nfft_, s);
        }
        break;
      }
    }
    record("advection", t);
  }

  void lieStep(WaveField& u, double tn) {
    potentialFlow(u, tn, tau_, false);
    const SpectralField s = kineticFlow(u, tau_);
    advectionFlow(u, s, tn);
  }

  void strangStep(WaveField& u, double tn) {
    potentialFlow(u, tn, 0.5 * tau_, true);
    const SpectralField s1 = kineticFlow(u, 0.5 * tau_);
    advectionFlow(u, s1, tn);
    const SpectralField s2 = kineticFlow(u, 0.5 * tau_);
    {
      const StageTimer t;
      u = to_physical(s2);
      record("transform", t);
    }
    potentialFlow(u, tn + 0.5 * tau_, 0.5 * tau_, true);
  }

  SimulationProblem prob_;
  double tau_ = 0.0;
  StageTimings* timings_ = nullptr;
  DeparturePoints feet_;
  std::vector<std::complex<double>> potFull_, potHalf_;
  AdvectionNfft nfft_;
};

inline PropagationResult propagate(const SimulationProblem& prob, WaveField u0,
                                   const StepObserver& observe = {}) {
  if (u0.grid.size() != prob.grid.size() || u0.values.size() != prob.grid.size())
    throw ContractError("propagate: initial state does not live on the problem grid");
  PropagationResult res{std::move(u0), {}};
  SplitStepper stepper(prob, &res.report.timings);
  const double m0 = mass(res.u);
  if (!std::isfinite(m0)) throw PropagationError("propagate: non-finite initial state");
  res.report.massSeries.reserve(static_cast<std::size_t>(prob.steps) + 1);
  res.report.massSeries.push_back(m0);
  if (observe) observe(0, 0.0, res.u);
  const double denom = m0 > 0.0 ? m0 : 1.0;
  for (int n = 0; n < prob.steps; ++n) {
    stepper.advance(res.u, n);
    const double m = mass(res.u);
    if (!std::isfinite(m))
      throw PropagationError("propagate: non-finite state after step " +
                             std::to_string(n + 1));
    res.report.massSeries.push_back(m);
    res.report.maxMassDeviation =
        std::max(res.report.maxMassDeviation, std::abs(m - m0) / denom);
    if (observe) observe(n + 1, (n + 1) * stepper.tau(), res.u);
  }
  return res;
}

inline PropagationResult propagate(const SimulationProblem& prob,
                                   const StepObserver& observe = {}) {
  if (!prob.initial) throw ContractError("propagate: initial sampler is required");
  return propagate(
      prob, sample_field(prob.grid, [&](const Point& x) { return prob.initial(x); }),
      observe);
}

}  // namespace magsplit
