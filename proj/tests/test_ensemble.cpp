#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hfscat/ensemble.hpp"
#include "support.hpp"

using namespace hfscat;
using testing::sample;

namespace {

// Dense N x N matrix of sum alpha_n |u_n><u_n| (dx-weighted) with its trace norm from an SVD.
double dense_trace_norm(const OrbitalEnsemble& a, const OrbitalEnsemble& b) {
  const std::size_t n = a.grid()->size();
  const double dx = a.grid()->dx();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto add = [&](const OrbitalEnsemble& e, double sign) {
    for (std::size_t k = 0; k < e.rank(); ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              sign * e.weight(k) * e.orbital(k)[i] * std::conj(e.orbital(k)[j]) * dx;
        }
      }
    }
  };
  add(a, 1.0);
  add(b, -1.0);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues().sum();
}

OrbitalEnsemble single(const ComplexField& u, double alpha = 1.0) { return OrbitalEnsemble({alpha}, {u}, 0.0); }

ComplexField normalized(ComplexField f) {
  const double n = l2_norm(f);
  for (auto& z : f.values()) z /= n;
  return f;
}

}  // namespace

TEST_CASE("ensemble validation") {
  const GridPtr g = Grid::make(16, 4.0);
  const GridPtr h = Grid::make(32, 4.0);
  CHECK_THROWS_AS(OrbitalEnsemble({}, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OrbitalEnsemble({-1.0}, {ComplexField(g)}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OrbitalEnsemble({1.0, 1.0}, {ComplexField(g)}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OrbitalEnsemble({1.0, 1.0}, {ComplexField(g), ComplexField(h)}, 0.0), std::invalid_argument);
  CHECK_NOTHROW(OrbitalEnsemble({0.0}, {ComplexField(g)}, 0.0));
}

TEST_CASE("density of a single gaussian") {
  const GridPtr g = Grid::make(256, 32.0);
  const OrbitalEnsemble e = single(sample(g, [](double x) { return std::exp(-0.5 * x * x); }));
  const ComplexField rho = density(e);
  for (std::size_t j = 0; j < rho.size(); ++j) {
    CHECK(rho[j].real() == doctest::Approx(std::exp(-g->x(j) * g->x(j))).epsilon(1e-14));
    CHECK(rho[j].imag() == 0.0);
  }
}

TEST_CASE("density integrates to the trace mass") {
  const GridPtr g = Grid::make(128, 24.0);
  const OrbitalEnsemble e = testing::localized(g, 4, 1.0, 17);
  double integral = 0.0;
  const ComplexField rho = density(e);
  for (const auto& z : rho.values()) {
    CHECK(z.real() >= 0.0);
    integral += z.real() * g->dx();
  }
  CHECK(integral == doctest::Approx(e.trace_mass()).epsilon(1e-12));
}

TEST_CASE("monte-carlo density matches the covariance sum") {
  const GridPtr g = Grid::make(32, 12.0);
  const OrbitalEnsemble e = testing::localized(g, 3, 1.0, 5);
  const ComplexField rho = density(e);
  const int samples = 10000;
  std::vector<double> mean(g->size(), 0.0), sq(g->size(), 0.0);
  for (int s = 0; s < samples; ++s) {
    const GaussianSample gs = sample_field(e, static_cast<std::uint64_t>(s) + 1000);
    for (std::size_t j = 0; j < g->size(); ++j) {
      const double v = std::norm(gs.realization[j]);
      mean[j] += v;
      sq[j] += v * v;
    }
  }
  for (std::size_t j = 0; j < g->size(); ++j) {
    const double m = mean[j] / samples;
    const double se = std::sqrt(std::max(sq[j] / samples - m * m, 0.0) / samples);
    CHECK(std::abs(m - rho[j].real()) <= 3.0 * se + 1e-15);
  }
}

TEST_CASE("monte-carlo covariance reproduces gamma") {
  const GridPtr g = Grid::make(32, 12.0);
  const OrbitalEnsemble e = testing::localized(g, 2, 1.0, 6);
  const ComplexField v = sample(g, [](double x) { return std::exp(-0.3 * x * x) * std::polar(1.0, 0.4 * x); });
  const ComplexField exact = covariance_apply(e, v);
  ComplexField acc(g);
  const int samples = 20000;
  for (int s = 0; s < samples; ++s) {
    const GaussianSample gs = sample_field(e, static_cast<std::uint64_t>(s));
    const cplx c = inner(gs.realization, v);
    for (std::size_t j = 0; j < g->size(); ++j) acc[j] += c * gs.realization[j] / static_cast<double>(samples);
  }
  CHECK(testing::max_diff(acc, exact) <= 0.05 * sup_norm(exact));
}

TEST_CASE("covariance operator") {
  const GridPtr g = Grid::make(128, 16.0);
  const ComplexField u1 = normalized(sample(g, [](double x) { return std::exp(-0.5 * x * x); }));
  const ComplexField u2 = normalized(sample(g, [](double x) { return x * std::exp(-0.5 * x * x); }));
  const OrbitalEnsemble e({0.7, 0.2}, {u1, u2}, 0.0);

  SUBCASE("eigenvector") {
    const ComplexField r = covariance_apply(e, u1);
    for (std::size_t j = 0; j < r.size(); ++j) CHECK(std::abs(r[j] - 0.7 * u1[j]) <= 1e-14);
  }
  SUBCASE("orthogonal complement is annihilated") {
    const ComplexField v = sample(g, [](double x) { return std::exp(-0.5 * (x - 0.7) * (x - 0.7)); });
    REQUIRE(std::abs(inner(u1, v)) > 0.1);
    // Project out u1 and u2.
    ComplexField w = v;
    const cplx c1 = inner(u1, v), c2 = inner(u2, v);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= c1 * u1[j] + c2 * u2[j];
    CHECK(sup_norm(covariance_apply(e, w)) <= 1e-14);
  }
  SUBCASE("positive and self-adjoint") {
    const OrbitalEnsemble r = testing::localized(g, 3, 1.0, 2);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const ComplexField a = testing::random_field(g, s), b = testing::random_field(g, s + 100);
      CHECK(inner(a, covariance_apply(r, a)).real() >= -1e-12);
      CHECK(std::abs(inner(a, covariance_apply(r, b)) - inner(covariance_apply(r, a), b)) <= 1e-10);
    }
  }
}

TEST_CASE("weighted traces against fine quadrature") {
  const GridPtr g = Grid::make(2048, 64.0);
  const double norm = std::pow(std::numbers::pi, -0.25);
  const OrbitalEnsemble e = single(sample(g, [&](double x) { return norm * std::exp(-0.5 * x * x); }));
  const WeightedTraces tr = weighted_traces(e);
  const double tr_x = testing::trapezoid([&](double x) { return std::hypot(1.0, x) * norm * norm * std::exp(-x * x); },
                                         -30.0, 30.0, 1000000);
  // |u^|^2 = |u|^2 for this gaussian.
  CHECK(tr.tr_x == doctest::Approx(tr_x).epsilon(1e-8));
  CHECK(tr.tr_grad == doctest::Approx(tr_x).epsilon(1e-8));
  CHECK(tr.tr_x >= e.trace_mass() - 1e-12);
  CHECK(tr.tr_grad >= e.trace_mass() - 1e-12);

  const OrbitalEnsemble zero({0.0}, {e.orbital(0)}, 0.0);
  CHECK(weighted_traces(zero).tr_x == 0.0);
  CHECK(weighted_traces(zero).tr_grad == 0.0);
}

TEST_CASE("gram matrix is hermitian") {
  const GridPtr g = Grid::make(64, 16.0);
  const Eigen::MatrixXcd G = testing::localized(g, 4, 1.0, 3).gram();
  CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("schatten-1 distance") {
  const GridPtr g = Grid::make(32, 8.0);
  const ComplexField u = normalized(sample(g, [](double x) { return std::exp(-0.5 * x * x); }));
  ComplexField v = normalized(sample(g, [](double x) { return x * std::exp(-0.5 * x * x); }));
  const cplx overlap = inner(u, v);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= overlap * u[j];
  v = normalized(v);

  SUBCASE("identical operators") {
    const OrbitalEnsemble a = testing::localized(g, 3, 1.0, 4);
    CHECK(schatten1_distance(a, a) <= 1e-12);
  }
  SUBCASE("phase invariance") {
    ComplexField mu = u;
    for (auto& z : mu.values()) z = -z;
    CHECK(schatten1_distance(single(u), single(mu)) <= 1e-12);
  }
  SUBCASE("orthogonal unit vectors are at distance two") {
    CHECK(schatten1_distance(single(u), single(v)) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("agrees with a dense singular value decomposition") {
    for (std::uint64_t s = 0; s < 4; ++s) {
      const OrbitalEnsemble a = testing::localized(g, 2, 1.0, s);
      const OrbitalEnsemble b = testing::localized(g, 3, 0.8, s + 50);
      CHECK(schatten1_distance(a, b) == doctest::Approx(dense_trace_norm(a, b)).epsilon(1e-10));
    }
  }
  SUBCASE("metric properties") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const OrbitalEnsemble a = testing::localized(g, 2, 1.0, s);
      const OrbitalEnsemble b = testing::localized(g, 1, 1.0, s + 10);
      const OrbitalEnsemble c = testing::localized(g, 3, 1.0, s + 20);
      CHECK(schatten1_distance(a, b) == doctest::Approx(schatten1_distance(b, a)).epsilon(1e-12));
      CHECK(schatten1_distance(a, c) <= schatten1_distance(a, b) + schatten1_distance(b, c) + 1e-12);
    }
  }
  SUBCASE("continuity bound for rank-one pairs") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const ComplexField z1 = testing::random_field(g, s), z2 = testing::random_field(g, s + 30);
      ComplexField d(g);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = z1[j] - z2[j];
      CHECK(schatten1_distance(single(z1), single(z2)) <= l2_norm(d) * (l2_norm(z1) + l2_norm(z2)) + 1e-12);
    }
  }
  SUBCASE("grid mismatch") {
    CHECK_THROWS_AS(schatten1_distance(single(u), single(ComplexField(Grid::make(64, 8.0)))), std::invalid_argument);
  }
}

TEST_CASE("gaussian sampling") {
  const GridPtr g = Grid::make(8, 4.0);
  const OrbitalEnsemble e({1.0}, {sample(g, [](double) { return cplx(1.0); })}, 0.0);
  const GaussianSample a = sample_field(e, 42), b = sample_field(e, 42);
  CHECK(testing::max_diff(a.realization, b.realization) == 0.0);
  CHECK(a.coefficients == b.coefficients);

  const int draws = 100000;
  cplx mean{};
  double second = 0.0;
  for (int s = 0; s < draws; ++s) {
    const cplx c = sample_field(e, static_cast<std::uint64_t>(s)).coefficients[0];
    mean += c;
    second += std::norm(c);
  }
  CHECK(std::abs(mean / static_cast<double>(draws)) <= 0.02);
  CHECK(second / draws == doctest::Approx(1.0).epsilon(0.02));
}
