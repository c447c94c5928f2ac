#pragma once
// Built-in experiment families: the 1d/2d/3d periodic magnetic benchmark
// problems, with their published domains, potentials, initial states and
// default discretizations. All potentials here are the original (ungauged)
// fields; the runner applies the Coulomb gauge on top when requested.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "magsplit/grid.hpp"
#include "magsplit/potential.hpp"

namespace magsplit {

struct ExperimentPreset {
  std::string name;
  Domain domain;
  MultiIndex defaultN{};
  double epsilon = 1.0;
  double T = 1.0;
  int defaultSteps = 100;
  PotentialSet potentials;  // original fields, not yet gauged
  std::function<std::complex<double>(const Point&)> initial;
  // Known closed-form Coulomb gauge function, when one exists (1d family).
  std::function<double(const Point&)> analyticLambda;
};

// 1d: unit torus, eps = 1/128, compressive initial phase that develops
// caustics; A = sin(2 pi x)/5 + 1/5 has the closed-form gauge
// lambda = cos(2 pi x) / (10 pi eps), after which A-tilde is the constant 1/5.
inline ExperimentPreset preset_ex1d() {
  constexpr double pi = std::numbers::pi;
  ExperimentPreset p;
  p.name = "ex1d";
  p.domain = make_domain({0.0}, {1.0});
  p.defaultN = {2048, 0, 0};
  p.epsilon = 1.0 / 128.0;
  p.T = 0.42;
  p.defaultSteps = 128;
  p.potentials.V = [](double, const Point& x) {
    return std::cos(2.0 * pi * x[0]) / 5.0 + 0.8;
  };
  p.potentials.A = [](double, const Point& x) {
    return Point{std::sin(2.0 * pi * x[0]) / 5.0 + 0.2, 0.0, 0.0};
  };
  const double eps = p.epsilon;
  p.initial = [eps](const Point& x) {
    const double rho = std::exp(-50.0 * (x[0] - 0.5) * (x[0] - 0.5));
    const double S =
        -std::log(std::exp(5.0 * (x[0] - 0.5)) + std::exp(-5.0 * (x[0] - 0.5))) / 5.0;
    return std::polar(std::sqrt(rho), S / eps);
  };
  p.analyticLambda = [eps](const Point& x) {
    return std::cos(2.0 * pi * x[0]) / (10.0 * pi * eps);
  };
  return p;
}

// 2d: [-5,5]^2, eps = 1, rotating divergence-free vector potential and a
// unit-mass Gaussian off the origin. Published long run: T = 50, 1000 steps.
inline ExperimentPreset preset_ex2d() {
  constexpr double pi = std::numbers::pi;
  ExperimentPreset p;
  p.name = "ex2d";
  p.domain = make_domain({-5.0, -5.0}, {5.0, 5.0});
  p.defaultN = {64, 64, 0};
  p.epsilon = 1.0;
  p.T = 50.0;
  p.defaultSteps = 1000;
  p.potentials.V = [](double, const Point& x) {
    return 20.0 * std::cos(2.0 * pi * (x[0] + 5.0) / 10.0) +
           20.0 * std::cos(2.0 * pi * (x[1] + 5.0) / 10.0) + 40.0;
  };
  p.potentials.A = [](double, const Point& x) {
    return Point{-3.0 * std::sin(2.0 * pi * (x[1] + 5.0) / 10.0),
                 3.0 * std::sin(2.0 * pi * (x[0] + 5.0) / 10.0), 0.0};
  };
  p.initial = [](const Point& x) {
    const double r2 = (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
    return std::complex<double>(std::sqrt(std::sqrt(10.0) / pi) *
                                    std::exp(-0.5 * std::sqrt(10.0) * r2),
                                0.0);
  };
  return p;
}

// 3d: [-5,5]^3 variation of the 2d problem (divergence-free by symmetry),
// Gaussian initial state of mass pi^(-3/2). Published run: T = 5, 100 steps.
inline ExperimentPreset preset_ex3d() {
  constexpr double pi = std::numbers::pi;
  ExperimentPreset p;
  p.name = "ex3d";
  p.domain = make_domain({-5.0, -5.0, -5.0}, {5.0, 5.0, 5.0});
  p.defaultN = {32, 32, 32};
  p.epsilon = 1.0;
  p.T = 5.0;
  p.defaultSteps = 100;
  auto s = [](double v) { return std::sin(2.0 * std::numbers::pi * (v + 5.0) / 10.0); };
  p.potentials.V = [](double, const Point& x) {
    return 20.0 * std::cos(2.0 * pi * (x[0] + 5.0) / 10.0) +
           20.0 * std::cos(2.0 * pi * (x[1] + 5.0) / 10.0) +
           20.0 * std::cos(2.0 * pi * (x[2] + 5.0) / 10.0) + 60.0;
  };
  p.potentials.A = [s](double, const Point& x) {
    return Point{s(x[1]) + s(x[2]), s(x[0]) + s(x[2]), s(x[0]) + s(x[1])};
  };
  p.initial = [](const Point& x) {
    const double r2 =
        (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1] + x[2] * x[2];
    return std::complex<double>(
        std::pow(2.0, 3.0 / 8.0) / std::pow(pi, 1.5) *
            std::exp(-0.5 * std::sqrt(2.0) * r2),
        0.0);
  };
  return p;
}

inline ExperimentPreset preset_by_name(const std::string& name) {
  if (name == "ex1d") return preset_ex1d();
  if (name == "ex2d") return preset_ex2d();
  if (name == "ex3d") return preset_ex3d();
  throw ContractError("unknown preset '" + name + "' (expected ex1d, ex2d or ex3d)");
}

}  // namespace magsplit
