#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "magsplit/diagnostics.hpp"
#include "magsplit/splitting.hpp"

using namespace magsplit;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

PotentialSet free_particle() {
  PotentialSet P;
  P.V = [](double, const Point&) { return 0.0; };
  P.A = [](double, const Point&) { return Point{}; };
  return P;
}

PotentialSet constant_fields(double a, double v) {
  PotentialSet P;
  P.V = [v](double, const Point&) { return v; };
  P.A = [a](double, const Point&) { return Point{a, 0.0, 0.0}; };
  return P;
}

// 1d gauged benchmark-style data: constant vector potential, cosine scalar.
PotentialSet cosine_well() {
  PotentialSet P;
  P.V = [](double, const Point& x) { return std::cos(2.0 * kPi * x[0]) / 5.0 + 0.8; };
  P.A = [](double, const Point&) { return Point{0.2, 0.0, 0.0}; };
  return P;
}

}  // namespace

TEST_CASE("free plane wave accumulates exactly the kinetic phase") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {32});
  prob.epsilon = 0.5;
  prob.potentials = free_particle();
  prob.initial = [&](const Point& x) { return basis_value(prob.grid, {2, 0, 0}, x); };
  prob.T = 0.3;
  prob.steps = 5;
  prob.advection.backend = AdvectionBackend::DIRECT;
  const cd factor = std::polar(1.0, -0.3 * 0.25 * 16.0 * kPi * kPi);
  for (auto scheme : {SplittingScheme::LIE, SplittingScheme::STRANG}) {
    prob.scheme = scheme;
    auto res = propagate(prob);
    auto want = sample_field(prob.grid, [&](const Point& x) {
      return factor * basis_value(prob.grid, {2, 0, 0}, x);
    });
    for (std::size_t i = 0; i < want.values.size(); ++i)
      CHECK(std::abs(res.u.values[i] - want.values[i]) <= 1e-12);
    CHECK(res.report.maxMassDeviation <= 1e-13);
  }
}

TEST_CASE("zero total time leaves the state bitwise untouched") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {16});
  prob.potentials = cosine_well();
  prob.initial = [](const Point& x) {
    return cd{std::exp(-10.0 * (x[0] - 0.5) * (x[0] - 0.5)), 0.3};
  };
  prob.T = 0.0;
  prob.steps = 3;
  auto u0 = sample_field(prob.grid, [&](const Point& x) { return prob.initial(x); });
  auto res = propagate(prob);
  REQUIRE(res.report.massSeries.size() == 4);
  for (std::size_t i = 0; i < u0.values.size(); ++i)
    CHECK(res.u.values[i] == u0.values[i]);
  for (double m : res.report.massSeries) CHECK(m == res.report.massSeries[0]);
}

TEST_CASE("one lie step is exactly the composition of its three flows") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {64});
  prob.epsilon = 0.125;
  prob.potentials = cosine_well();
  prob.initial = [](const Point& x) {
    return std::polar(std::exp(-30.0 * (x[0] - 0.5) * (x[0] - 0.5)),
                      3.0 * std::cos(2.0 * kPi * x[0]));
  };
  prob.T = 0.13;
  prob.steps = 1;
  prob.scheme = SplittingScheme::LIE;
  prob.advection.backend = AdvectionBackend::DIRECT;
  auto res = propagate(prob);

  auto u = sample_field(prob.grid, [&](const Point& x) { return prob.initial(x); });
  u = potential_step(u, prob.potentials, prob.epsilon, 0.13);
  SpectralField s = to_spectral(u);
  s = kinetic_step(s, 0.13, prob.epsilon);
  auto dp = compute_departure_points(prob.grid, prob.potentials.A, 0.13, 0.0,
                                     prob.advection.substeps);
  auto vals = evaluate_direct(s, dp.feet);
  for (std::size_t i = 0; i < vals.size(); ++i) CHECK(res.u.values[i] == vals[i]);
}

TEST_CASE("one strang step is exactly the composition of its five flows") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {64});
  prob.epsilon = 0.125;
  prob.potentials = cosine_well();
  prob.initial = [](const Point& x) {
    return std::polar(std::exp(-30.0 * (x[0] - 0.5) * (x[0] - 0.5)),
                      2.0 * std::sin(2.0 * kPi * x[0]));
  };
  prob.T = 0.11;
  prob.steps = 1;
  prob.scheme = SplittingScheme::STRANG;
  prob.advection.backend = AdvectionBackend::DIRECT;
  auto res = propagate(prob);

  const double tau = 0.11;
  auto u = sample_field(prob.grid, [&](const Point& x) { return prob.initial(x); });
  u = potential_step(u, prob.potentials, prob.epsilon, 0.5 * tau);
  SpectralField s1 = to_spectral(u);
  s1 = kinetic_step(s1, 0.5 * tau, prob.epsilon);
  auto dp = compute_departure_points(prob.grid, prob.potentials.A, tau, 0.0,
                                     prob.advection.substeps);
  u.values = evaluate_direct(s1, dp.feet);
  SpectralField s2 = to_spectral(u);
  s2 = kinetic_step(s2, 0.5 * tau, prob.epsilon);
  u = to_physical(s2);
  u = potential_step(u, prob.potentials, prob.epsilon, 0.5 * tau);
  for (std::size_t i = 0; i < u.values.size(); ++i) CHECK(res.u.values[i] == u.values[i]);
}

TEST_CASE("commuting constant fields make both schemes exact") {
  // With A and V constant the three flows commute, so the splitting has no
  // error at all: a single mode picks up the product of the three phases.
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {16});
  prob.epsilon = 0.3;
  prob.potentials = constant_fields(0.4, 0.7);
  prob.initial = [&](const Point& x) { return basis_value(prob.grid, {1, 0, 0}, x); };
  prob.T = 0.5;
  prob.steps = 7;
  prob.advection.backend = AdvectionBackend::DIRECT;
  const double w = 2.0 * kPi;  // k = 1 on unit length
  const double kineticPhase = -0.5 * 0.5 * prob.epsilon * w * w;
  const double translatePhase = w * 0.5 * 0.4;
  const double potentialPhase = -0.5 * (0.5 * 0.4 * 0.4 + 0.7) / prob.epsilon;
  const cd factor = std::polar(1.0, kineticPhase + translatePhase + potentialPhase);
  for (auto scheme : {SplittingScheme::LIE, SplittingScheme::STRANG}) {
    prob.scheme = scheme;
    auto res = propagate(prob);
    auto want = sample_field(prob.grid, [&](const Point& x) {
      return factor * basis_value(prob.grid, {1, 0, 0}, x);
    });
    for (std::size_t i = 0; i < want.values.size(); ++i)
      CHECK(std::abs(res.u.values[i] - want.values[i]) <= 1e-12);
  }
}

TEST_CASE("propagation is deterministic run to run") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {64});
  prob.epsilon = 0.25;
  prob.potentials = cosine_well();
  prob.initial = [](const Point& x) {
    return std::polar(std::exp(-20.0 * (x[0] - 0.4) * (x[0] - 0.4)), 4.0 * x[0]);
  };
  prob.T = 0.2;
  prob.steps = 5;
  prob.advection.backend = AdvectionBackend::NFFT;
  auto a = propagate(prob);
  auto b = propagate(prob);
  for (std::size_t i = 0; i < a.u.values.size(); ++i)
    CHECK(a.u.values[i] == b.u.values[i]);
  REQUIRE(a.report.massSeries.size() == b.report.massSeries.size());
  for (std::size_t i = 0; i < a.report.massSeries.size(); ++i)
    CHECK(a.report.massSeries[i] == b.report.massSeries[i]);
}

TEST_CASE("direct and nfft backends propagate in lockstep") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {256});
  prob.epsilon = 1.0 / 16.0;
  prob.potentials = cosine_well();
  prob.initial = [&](const Point& x) {
    const double rho = std::exp(-50.0 * (x[0] - 0.5) * (x[0] - 0.5));
    const double S =
        -std::log(std::exp(5.0 * (x[0] - 0.5)) + std::exp(-5.0 * (x[0] - 0.5))) / 5.0;
    return std::polar(std::sqrt(rho), S / prob.epsilon);
  };
  prob.T = 0.42;
  prob.steps = 16;
  prob.scheme = SplittingScheme::STRANG;

  prob.advection.backend = AdvectionBackend::DIRECT;
  auto direct = propagate(prob);
  prob.advection.backend = AdvectionBackend::NFFT;
  auto nfft = propagate(prob);

  double maxDiff = 0.0;
  for (std::size_t i = 0; i < direct.u.values.size(); ++i)
    maxDiff = std::max(maxDiff, std::abs(direct.u.values[i] - nfft.u.values[i]));
  CHECK(maxDiff <= 1e-10);
  CHECK(direct.report.maxMassDeviation <= 1e-12);
  CHECK(nfft.report.maxMassDeviation <= 1e-11);
}

TEST_CASE("invalid problems are rejected up front") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {16});
  prob.potentials = cosine_well();
  prob.initial = [](const Point&) { return cd{1.0, 0.0}; };
  prob.T = 1.0;

  SimulationProblem bad = prob;
  bad.steps = 0;
  CHECK_THROWS_AS(propagate(bad), ContractError);
  bad = prob;
  bad.T = -1.0;
  CHECK_THROWS_AS(propagate(bad), ContractError);
  bad = prob;
  bad.initial = nullptr;
  CHECK_THROWS_AS(propagate(bad), ContractError);
  bad = prob;
  bad.potentials.V = nullptr;
  CHECK_THROWS_AS(propagate(bad), ContractError);
}

TEST_CASE("non-finite states abort with the offending step") {
  SimulationProblem prob;
  prob.grid = make_grid(make_domain({0.0}, {1.0}), {16});
  prob.potentials = cosine_well();
  prob.initial = [](const Point&) {
    return cd{std::numeric_limits<double>::quiet_NaN(), 0.0};
  };
  prob.T = 0.1;
  prob.steps = 2;
  CHECK_THROWS_AS(propagate(prob), PropagationError);
}
