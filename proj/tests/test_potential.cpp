#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hfscat/potential.hpp"
#include "support.hpp"

using hfscat::Potential;
using testing::sqrt_2pi;

namespace {

std::vector<Potential> family() {
  return {Potential::dirac(1.0),          Potential::dirac(-2.0),
          Potential::gaussian(1.0, 1.0),  Potential::gaussian(0.5, 0.3),
          Potential::box(1.0, 2.0),       Potential::box(-0.7, 0.5),
          Potential::sum_of_diracs({{1.0, 1.0}, {1.0, -1.0}}),
          Potential::sum_of_diracs({{0.4, 0.0}, {-0.3, 2.5}})};
}

}  // namespace

TEST_CASE("dirac transform is constant") {
  const Potential w = Potential::dirac(1.0);
  for (double eta : {0.0, 0.3, -7.0, 123.4}) CHECK(w.fourier_at(eta) == doctest::Approx(1.0 / sqrt_2pi).epsilon(1e-15));
}

TEST_CASE("gaussian transform at zero is the normalized mass") {
  CHECK(Potential::gaussian(1.0, 1.0).fourier_at(0.0) == doctest::Approx(1.0 / sqrt_2pi).epsilon(1e-15));
  const Potential w = Potential::gaussian(2.0, 0.5);
  CHECK(w.fourier_at(3.0) == doctest::Approx(2.0 / sqrt_2pi * std::exp(-0.5 * 0.25 * 9.0)).epsilon(1e-14));
}

TEST_CASE("box transform vanishes at a sinc zero") {
  CHECK(std::abs(Potential::box(1.0, 2.0).fourier_at(std::numbers::pi)) < 1e-16);
  CHECK(Potential::box(1.0, 2.0).fourier_at(0.0) == doctest::Approx(1.0 / sqrt_2pi).epsilon(1e-15));
  CHECK(Potential::box(1.0, 2.0).fourier_at(1e-9) == doctest::Approx(1.0 / sqrt_2pi).epsilon(1e-15));
}

TEST_CASE("m1 norms") {
  CHECK(Potential::dirac(-2.0).m1_norm() == 2.0);
  CHECK(Potential::sum_of_diracs({{1.0, 1.0}, {1.0, -1.0}}).m1_norm() == 2.0);
  CHECK(Potential::gaussian(0.5, 1.0).m1_norm() == 0.5);
  CHECK(Potential::box(-3.0, 1.0).m1_norm() == 3.0);
}

TEST_CASE("total mass matches the transform at zero") {
  for (const auto& w : family()) {
    CAPTURE(w.kind_name());
    CHECK(std::abs(w.total_mass() - sqrt_2pi * w.fourier_at(0.0)) <= 1e-12);
  }
}

TEST_CASE("transform is even and obeys the finite measure bound") {
  for (const auto& w : family()) {
    CAPTURE(w.kind_name());
    double worst_even = 0.0, worst_bound = 0.0;
    for (int i = -500; i < 500; ++i) {
      const double eta = 0.0371 * i + 0.001 * i * i * (i < 0 ? -1 : 1);
      worst_even = std::max(worst_even, std::abs(w.fourier_at(eta) - w.fourier_at(-eta)));
      worst_bound = std::max(worst_bound, std::abs(w.fourier_at(eta)) - w.m1_norm() / sqrt_2pi);
      CHECK(std::isfinite(w.fourier_at(eta)));
    }
    CHECK(worst_even == 0.0);
    CHECK(worst_bound <= 1e-15);
  }
}

TEST_CASE("gaussian transform agrees with quadrature of the density") {
  const Potential w = Potential::gaussian(1.3, 0.8);
  REQUIRE(w.has_density());
  for (double eta : {0.0, 0.7, 2.5}) {
    // Even density: the transform is a cosine integral.
    const auto integrand = [&](double x) { return w.density_at(x) * std::cos(eta * x); };
    const double q = testing::trapezoid(integrand, -12.0, 12.0, 200000);
    CHECK(q / sqrt_2pi == doctest::Approx(w.fourier_at(eta)).epsilon(1e-9));
  }
}

TEST_CASE("box density is flat on its support") {
  const Potential w = Potential::box(0.9, 1.5);
  REQUIRE(w.has_density());
  CHECK(w.density_at(0.0) == doctest::Approx(0.9 / 3.0));
  CHECK(w.density_at(1.4) == w.density_at(0.0));
  CHECK(w.density_at(1.6) == 0.0);
  for (double eta : {0.0, 0.7, 2.5}) {
    const double q = testing::trapezoid([&](double x) { return w.density_at(0.0) * std::cos(eta * x); }, -1.5, 1.5, 200000);
    CHECK(q / sqrt_2pi == doctest::Approx(w.fourier_at(eta)).epsilon(1e-9));
  }
}

TEST_CASE("atomic variants have no density") {
  CHECK_FALSE(Potential::dirac(1.0).has_density());
  CHECK_THROWS_AS((void)Potential::dirac(1.0).density_at(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)Potential::sum_of_diracs({{1.0, 1.0}}).density_at(0.0), std::invalid_argument);
}

TEST_CASE("kind names") {
  CHECK(Potential::dirac(1).kind_name() == "dirac");
  CHECK(Potential::gaussian(1, 1).kind_name() == "gaussian");
  CHECK(Potential::box(1, 1).kind_name() == "box");
  CHECK(Potential::sum_of_diracs({}).kind_name() == "sum_of_diracs");
}
