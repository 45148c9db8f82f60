#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "hfscat/grid.hpp"
#include "support.hpp"

using namespace hfscat;
using testing::sample;
using testing::sqrt_2pi;

TEST_CASE("grid construction") {
  const GridPtr g = Grid::make(8, 8.0);
  CHECK(g->dx() == 1.0);
  CHECK(g->x(0) == -4.0);
  CHECK(g->x(7) == 3.0);
  const double q = std::numbers::pi / 4.0;
  CHECK(g->xi(0) == 0.0);
  CHECK(g->xi(1) == doctest::Approx(q));
  CHECK(g->xi(3) == doctest::Approx(3 * q));
  CHECK(g->xi(4) == doctest::Approx(-4 * q));
  CHECK(g->xi(7) == doctest::Approx(-q));
  CHECK(g->nyquist_index() == 4);
  CHECK(g->mode_index(-1) == 7);
  CHECK(g->mode_index(2) == 2);
  CHECK(g->nearest_frequency_index(0.9 * q) == 1);

  CHECK(Grid::make(16, 16.0)->dx() == 1.0);
  const GridPtr h = Grid::make(1024, 64.0);
  CHECK(h->dx() * 1024 == 64.0);
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(Grid::make(10, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(4, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(16, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(16, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(16, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("frequency lattice is symmetric apart from nyquist") {
  const GridPtr g = Grid::make(64, 10.0);
  for (long m = 1; m < 32; ++m) CHECK(g->xi(g->mode_index(m)) == doctest::Approx(-g->xi(g->mode_index(-m))));
  CHECK(g->xi(g->nyquist_index()) == doctest::Approx(-std::numbers::pi / g->dx()));
}

TEST_CASE("zero transforms to zero") {
  const GridPtr g = Grid::make(32, 8.0);
  const SpectralField f = forward_transform(ComplexField(g));
  const ComplexField b = inverse_transform(SpectralField(g));
  for (const auto& c : f.coefficients()) CHECK(c == cplx{});
  for (const auto& v : b.values()) CHECK(v == cplx{});
}

TEST_CASE("gaussian is its own transform") {
  const GridPtr g = Grid::make(1024, 64.0);
  const SpectralField f = forward_transform(sample(g, [](double x) { return std::exp(-0.5 * x * x); }));
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double xi = g->xi(k);
    if (std::abs(xi) > 4.0) continue;
    const double exact = std::exp(-0.5 * xi * xi);
    CHECK(std::abs(f[k] - exact) <= 1e-10 * exact);
  }
}

TEST_CASE("plancherel and round trip on random data") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GridPtr g = Grid::make(256, 17.0);
    const ComplexField f = testing::random_field(g, seed);
    const SpectralField fh = forward_transform(f);
    CHECK(std::abs(l2_norm(fh) - l2_norm(f)) <= 1e-12 * l2_norm(f));
    const ComplexField back = inverse_transform(fh);
    CHECK(testing::max_diff(back, f) <= 1e-12 * sup_norm(f));
  }
}

TEST_CASE("single coefficient inverts to a scaled plane wave") {
  const GridPtr g = Grid::make(64, 12.0);
  for (long m : {0L, 3L, -5L}) {
    SpectralField F(g);
    const std::size_t k = g->mode_index(m);
    F[k] = 1.0;
    const ComplexField f = inverse_transform(F);
    for (std::size_t j = 0; j < f.size(); ++j) {
      const cplx expected = g->dxi() / sqrt_2pi * std::polar(1.0, g->x(j) * g->xi(k));
      CHECK(std::abs(f[j] - expected) <= 1e-14);
    }
  }
}

TEST_CASE("non-finite input is rejected") {
  const GridPtr g = Grid::make(16, 4.0);
  ComplexField f(g);
  f[3] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  CHECK_THROWS_AS(forward_transform(f), std::domain_error);
}

TEST_CASE("free propagation") {
  const GridPtr g = Grid::make(1024, 64.0);
  const ComplexField u0 = sample(g, [](double x) { return std::exp(-0.5 * x * x); });

  SUBCASE("t = 0 is the identity") { CHECK(testing::max_diff(free_propagate(u0, 0.0), u0) <= 1e-15); }

  SUBCASE("gaussian closed form at t = 1") {
    const ComplexField u1 = free_propagate(u0, 1.0);
    const cplx a(1.0, 2.0);
    for (std::size_t j = 0; j < u1.size(); ++j) {
      const double x = g->x(j);
      if (std::abs(x) > 16.0) continue;
      const cplx exact = std::pow(a, -0.5) * std::exp(-x * x / (2.0 * a));
      CHECK(std::abs(u1[j] - exact) <= 1e-8 * std::abs(exact) + 1e-15);
    }
  }

  SUBCASE("grid mode picks up the exact phase") {
    const double xi = g->xi(g->mode_index(7));
    const ComplexField e = sample(g, [&](double x) { return std::polar(1.0, xi * x); });
    const ComplexField p = free_propagate(e, 2.3);
    for (std::size_t j = 0; j < p.size(); ++j) CHECK(std::abs(p[j] - std::polar(1.0, -2.3 * xi * xi) * e[j]) <= 1e-12);
  }

  SUBCASE("norm and group law") {
    const ComplexField f = testing::random_field(g, 9);
    const ComplexField a = free_propagate(free_propagate(f, 0.7), 1.9);
    const ComplexField b = free_propagate(f, 2.6);
    CHECK(std::abs(l2_norm(a) - l2_norm(f)) <= 1e-12 * l2_norm(f));
    CHECK(testing::max_diff(a, b) <= 1e-12 * sup_norm(f));
  }
}

TEST_CASE("convolution") {
  const GridPtr g = Grid::make(512, 64.0);
  const ComplexField f = sample(g, [](double x) { return std::exp(-0.5 * x * x); });

  SUBCASE("dirac mass scales") {
    const ComplexField c = convolve(Potential::dirac(2.5), f);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(c[j] - 2.5 * f[j]) <= 1e-14);
  }

  SUBCASE("gaussian with gaussian adds variances") {
    // N(0,1) * e^{-x^2/2} = e^{-x^2/4} / sqrt(2)
    const ComplexField c = convolve(Potential::gaussian(1.0, 1.0), f);
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double x = g->x(j);
      const double exact = std::exp(-0.25 * x * x) / std::numbers::sqrt2;
      CHECK(std::abs(c[j] - exact) <= 1e-8 * exact + 1e-15);
    }
  }

  SUBCASE("zero stays zero") {
    const ComplexField c = convolve(Potential::gaussian(1, 1), ComplexField(g));
    for (const auto& v : c.values()) CHECK(v == cplx{});
  }

  SUBCASE("linear and commuting with the free flow") {
    const Potential w = Potential::box(0.8, 1.5);
    const ComplexField r = testing::random_field(g, 4);
    ComplexField sum(g);
    for (std::size_t j = 0; j < f.size(); ++j) sum[j] = 2.0 * f[j] - cplx(0, 1) * r[j];
    const ComplexField cf = convolve(w, f), cr = convolve(w, r), cs = convolve(w, sum);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(cs[j] - (2.0 * cf[j] - cplx(0, 1) * cr[j])) <= 1e-12);
    CHECK(testing::max_diff(convolve(w, free_propagate(r, 1.3)), free_propagate(convolve(w, r), 1.3)) <= 1e-12);
  }
}

TEST_CASE("dispersive bound on the gaussian family") {
  const GridPtr g = Grid::make(16384, 4096.0);
  for (double a : {0.5, 1.0, 2.0}) {
    CAPTURE(a);
    const ComplexField f = sample(g, [a](double x) { return std::exp(-a * x * x); });
    const SpectralField fh = forward_transform(f);
    double fh_sup = 0.0;
    for (const auto& c : fh.coefficients()) fh_sup = std::max(fh_sup, std::abs(c));
    double worst = 0.0;
    for (double t = 1.0; t <= 64.0 + 1e-9; t *= std::numbers::sqrt2) {
      worst = std::max(worst, std::sqrt(t) * sup_norm(inverse_transform(free_propagate(fh, t))) / fh_sup);
    }
    CHECK(worst <= 2.0);
  }
}
