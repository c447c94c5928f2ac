#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "magsplit/diagnostics.hpp"

using namespace magsplit;
using cd = std::complex<double>;

TEST_CASE("mass: zero field and normalized Gaussian") {
  const Grid g = make_grid(make_domain({-5.0, -5.0}, {5.0, 5.0}), {128, 128});
  CHECK(mass(make_wave_field(g)) == 0.0);

  // sqrt(sqrt(10)/pi) * exp(-(sqrt(10)/2) ((x-1)^2 + y^2)) has unit L2 norm
  const double s10 = std::sqrt(10.0);
  const WaveField u = sample_field(g, [&](const Point& x) {
    return std::sqrt(s10 / std::numbers::pi) *
           std::exp(-0.5 * s10 * ((x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1]));
  });
  CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mass is invariant under a unimodular pointwise factor") {
  const Grid g = make_grid(make_domain({0.0}, {1.0}), {64});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WaveField f = make_wave_field(g);
  for (auto& v : f.values) v = cd{u(rng), u(rng)};
  const double m0 = mass(f);
  WaveField h = f;
  for (std::size_t i = 0; i < h.values.size(); ++i)
    h.values[i] *= std::polar(1.0, 2.7 * static_cast<double>(i % 17));
  CHECK(mass(h) == doctest::Approx(m0).epsilon(1e-14));
}

TEST_CASE("l2_error: scaling and simple cases") {
  const Grid g = make_grid(make_domain({0.0}, {2.0}), {8});
  WaveField a = make_wave_field(g), b = make_wave_field(g);
  CHECK(l2_error(a, b) == 0.0);
  for (auto& v : a.values) v = cd{1.0, 0.0};
  // |a-b| = 1 at every node: error = sqrt(cellVol * N) = sqrt(2)
  CHECK(l2_error(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const Grid g2 = make_grid(make_domain({0.0}, {2.0}), {16});
  WaveField c = make_wave_field(g2);
  CHECK_THROWS_AS((void)l2_error(a, c), ContractError);
}

TEST_CASE("fit_order recovers exact slopes and rejects bad input") {
  std::vector<double> taus{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e1(taus.size()), e2(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    e1[i] = 3.0 * taus[i];
    e2[i] = 0.7 * taus[i] * taus[i];
  }
  CHECK(fit_order(taus, e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit_order(taus, e2) == doctest::Approx(2.0).epsilon(1e-12));

  // rescaling errors by a common factor does not change the slope
  std::vector<double> e3 = e2;
  for (auto& e : e3) e *= 42.0;
  CHECK(fit_order(taus, e3) == doctest::Approx(fit_order(taus, e2)).epsilon(1e-12));

  CHECK_THROWS_AS((void)fit_order({0.1, 0.05}, {1.0, 0.5}), ContractError);
  CHECK_THROWS_AS((void)fit_order({0.1, 0.05, 0.025}, {1.0, 0.0, 0.25}),
                  ContractError);
  CHECK_THROWS_AS((void)fit_order({0.1, 0.1, 0.1}, {1.0, 1.0, 1.0}), ContractError);
}

TEST_CASE("stage timings accumulate") {
  StageTimings t;
  t.add("fft", 0.5);
  t.add("fft", 0.25);
  t.add("advection", 1.0);
  CHECK(t.seconds.at("fft") == doctest::Approx(0.75));
  CHECK(t.seconds.at("advection") == doctest::Approx(1.0));
}
