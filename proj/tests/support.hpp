#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "hfscat/ensemble.hpp"
#include "hfscat/grid.hpp"

namespace testing {

using hfscat::ComplexField;
using hfscat::cplx;
using hfscat::GridPtr;
using hfscat::OrbitalEnsemble;

inline constexpr double sqrt_2pi = 2.5066282746310002;

inline ComplexField sample(const GridPtr& g, const std::function<cplx(double)>& f) {
  ComplexField out(g);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = f(g->x(j));
  return out;
}

inline ComplexField random_field(const GridPtr& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  ComplexField out(g);
  for (auto& z : out.values()) z = {n01(rng), n01(rng)};
  return out;
}

/// Smooth localized orbitals: each a sum of three modulated Gaussians.
inline OrbitalEnsemble localized(const GridPtr& g, std::size_t k, double amplitude, std::uint64_t seed,
                                 double t = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> weights;
  std::vector<ComplexField> orbitals;
  for (std::size_t n = 0; n < k; ++n) {
    ComplexField f(g);
    for (int b = 0; b < 3; ++b) {
      const cplx c(u(rng), u(rng));
      const double x0 = 2.0 * u(rng), xi0 = 1.5 * u(rng), width = 1.0 + 0.3 * u(rng);
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double z = (g->x(j) - x0) / width;
        f[j] += amplitude * c * std::exp(-0.5 * z * z) * std::polar(1.0, xi0 * g->x(j));
      }
    }
    weights.push_back(1.0 / static_cast<double>(n + 1));
    orbitals.push_back(std::move(f));
  }
  return OrbitalEnsemble(std::move(weights), std::move(orbitals), t);
}

/// Orbitals c_n e^{i xi x} sharing one lattice mode.
inline OrbitalEnsemble shared_mode(const GridPtr& g, long mode, const std::vector<cplx>& coeffs,
                                   const std::vector<double>& weights) {
  const double xi = g->xi(g->mode_index(mode));
  std::vector<ComplexField> orbitals;
  for (const cplx& c : coeffs) orbitals.push_back(sample(g, [&](double x) { return c * std::polar(1.0, xi * x); }));
  return OrbitalEnsemble(weights, std::move(orbitals), 0.0);
}

inline double max_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double max_diff(const std::vector<ComplexField>& a, const std::vector<ComplexField>& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, max_diff(a[n], b[n]));
  return m;
}

inline double max_abs(const std::vector<ComplexField>& fs) {
  double m = 0.0;
  for (const auto& f : fs) m = std::max(m, hfscat::sup_norm(f));
  return m;
}

/// Composite trapezoid rule on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

}  // namespace testing
