#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "magsplit/diagnostics.hpp"
#include "magsplit/gauge.hpp"

using namespace magsplit;
using cd = std::complex<double>;

namespace {

const double kEps1d = 1.0 / 128.0;
const double kTwoPi = 2.0 * std::numbers::pi;

// 1D experiment fields: A = sin(2 pi x)/5 + 1/5, V = cos(2 pi x)/5 + 4/5.
PotentialSet fields_1d() {
  PotentialSet P;
  P.A = [](double, const Point& x) {
    return Point{std::sin(kTwoPi * x[0]) / 5.0 + 0.2, 0.0, 0.0};
  };
  P.V = [](double, const Point& x) { return std::cos(kTwoPi * x[0]) / 5.0 + 0.8; };
  return P;
}

// 2D experiment vector potential (already divergence-free).
VectorSampler field_2d_A() {
  return [](double, const Point& x) {
    return Point{-3.0 * std::sin(kTwoPi * (x[1] + 5.0) / 10.0),
                 3.0 * std::sin(kTwoPi * (x[0] + 5.0) / 10.0), 0.0};
  };
}

}  // namespace

TEST_CASE("spectral_derivative: constants and single harmonics") {
  const Grid g = make_grid(make_domain({0.0}, {1.0}), {32});
  std::vector<double> c(g.size(), 4.2);
  for (double d : spectral_derivative(g, c, 0)) CHECK(std::abs(d) < 1e-13);

  std::vector<double> s(g.size());
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    s[flat] = std::sin(kTwoPi * grid_point(g, j)[0]);
  });
  const std::vector<double> ds = spectral_derivative(g, s, 0);
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    CHECK(ds[flat] == doctest::Approx(kTwoPi * std::cos(kTwoPi * grid_point(g, j)[0]))
                          .epsilon(1e-12));
  });
}

TEST_CASE("spectral_divergence of the 2D experiment field vanishes") {
  const Grid g = make_grid(make_domain({-5.0, -5.0}, {5.0, 5.0}), {32, 32});
  const VectorSampler A = field_2d_A();
  std::array<std::vector<double>, kMaxDim> comps;
  comps[0].resize(g.size());
  comps[1].resize(g.size());
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    const Point a = A(0.0, grid_point(g, j));
    comps[0][flat] = a[0];
    comps[1][flat] = a[1];
  });
  for (double d : spectral_divergence(g, comps)) CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("coulomb gauge of the 1D experiment matches the analytic gauge") {
  const Grid g = make_grid(make_domain({0.0}, {1.0}), {256});
  const PotentialSet P = fields_1d();
  const GaugeField gf = coulomb_gauge(g, P.A, kEps1d);

  // lambda(x) = cos(2 pi x) / (10 pi eps), zero mean
  double mean = 0.0;
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    const double x = grid_point(g, j)[0];
    const double want = std::cos(kTwoPi * x) / (10.0 * std::numbers::pi * kEps1d);
    CHECK(std::abs(gf.lambda[flat] - want) < 1e-10);
    mean += gf.lambda[flat];
  });
  CHECK(std::abs(mean / static_cast<double>(g.size())) < 1e-12);

  // symbolic-differentiation check: eps * dlambda/dx = -sin(2 pi x)/5 on the grid
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    const double x = grid_point(g, j)[0];
    CHECK(std::abs(kEps1d * gf.gradLambda[0][flat] + std::sin(kTwoPi * x) / 5.0) <
          1e-12);
  });

  // gauged vector potential is identically 1/5, on and off the grid
  const PotentialSet Pt = transform_potentials(P, gf);
  for (double x : {0.0, 0.123456, 0.5, 0.77, 0.999}) {
    CHECK(std::abs(Pt.A(0.0, Point{x, 0.0, 0.0})[0] - 0.2) < 1e-12);
  }
  // scalar potential untouched
  CHECK(Pt.V(0.0, Point{0.3, 0.0, 0.0}) ==
        doctest::Approx(P.V(0.0, Point{0.3, 0.0, 0.0})).epsilon(1e-15));

  // the gauged field is divergence-free in the spectral sense
  std::array<std::vector<double>, kMaxDim> comps;
  comps[0].resize(g.size());
  for_each_index(g, [&](std::size_t flat, const MultiIndex& j) {
    comps[0][flat] = Pt.A(0.0, grid_point(g, j))[0];
  });
  for (double d : spectral_divergence(g, comps)) CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("coulomb gauge is idempotent: re-gauging the gauged field is trivial") {
  const Grid g = make_grid(make_domain({0.0}, {1.0}), {128});
  const PotentialSet P = fields_1d();
  const GaugeField gf = coulomb_gauge(g, P.A, kEps1d);
  const PotentialSet Pt = transform_potentials(P, gf);
  const GaugeField gf2 = coulomb_gauge(g, Pt.A, kEps1d);
  CHECK(gf2.maxAbsLambda < 1e-12);
  CHECK(gf2.trivial());
}

TEST_CASE("divergence-free 2D field: gauge is trivial, potentials unchanged") {
  const Grid g = make_grid(make_domain({-5.0, -5.0}, {5.0, 5.0}), {32, 32});
  PotentialSet P;
  P.A = field_2d_A();
  P.V = [](double, const Point& x) { return x[0] + x[1]; };
  const GaugeField gf = coulomb_gauge(g, P.A, 1.0);
  CHECK(gf.maxAbsLambda < 1e-12);
  CHECK(gf.trivial());
  const PotentialSet Pt = transform_potentials(P, gf);
  for (double x : {-4.2, 0.0, 1.7}) {
    const Point p{x, 0.5 * x + 1.0, 0.0};
    CHECK(Pt.A(0.0, p)[0] == P.A(0.0, p)[0]);
    CHECK(Pt.A(0.0, p)[1] == P.A(0.0, p)[1]);
  }
}

TEST_CASE("vector potentials with nonzero-mean divergence are rejected") {
  const Grid g = make_grid(make_domain({0.0}, {1.0}), {64});
  const VectorSampler secular = [](double, const Point& x) {
    return Point{x[0] + std::sin(kTwoPi * x[0]), 0.0, 0.0};
  };
  CHECK_THROWS_AS((void)coulomb_gauge(g, secular, 1.0), GaugeError);
}

TEST_CASE("transform_wavefunction: unimodular, invertible, observable-preserving") {
  const Grid g = make_grid(make_domain({0.0}, {1.0}), {128});
  const GaugeField gf = coulomb_gauge(g, fields_1d().A, kEps1d);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WaveField f = make_wave_field(g);
  for (auto& v : f.values) v = cd{u(rng), u(rng)};

  const WaveField t = transform_wavefunction(f, gf, true);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    // |u~| = |u| pointwise to near round-off
    CHECK(std::abs(t.values[i]) ==
          doctest::Approx(std::abs(f.values[i])).epsilon(1e-15));
  }
  CHECK(mass(t) == doctest::Approx(mass(f)).epsilon(1e-14));

  const WaveField back = transform_wavefunction(t, gf, false);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(std::abs(back.values[i] - f.values[i]) < 1e-14);
}
