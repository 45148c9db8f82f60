#include "hfscat/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hfscat {

OrbitalEnsemble::OrbitalEnsemble(std::vector<double> weights, std::vector<ComplexField> orbitals,
                                 double time)
    : weights_(std::move(weights)), orbitals_(std::move(orbitals)), time_(time) {
  if (weights_.empty()) throw std::invalid_argument("ensemble: rank must be >= 1");
  if (weights_.size() != orbitals_.size()) {
    throw std::invalid_argument("ensemble: weight and orbital counts differ");
  }
  for (double a : weights_) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("ensemble: weights must be finite and >= 0");
  }
  const Grid& g = *orbitals_.front().grid();
  for (const auto& u : orbitals_) {
    if (!u.grid()->same_as(g)) throw std::invalid_argument("ensemble: orbitals live on different grids");
  }
}

double OrbitalEnsemble::trace_mass() const {
  double acc = 0.0;
  for (std::size_t n = 0; n < rank(); ++n) {
    const double nrm = l2_norm(orbitals_[n]);
    acc += weights_[n] * nrm * nrm;
  }
  return acc;
}

Eigen::MatrixXcd OrbitalEnsemble::gram() const {
  const auto k = static_cast<Eigen::Index>(rank());
  Eigen::MatrixXcd g(k, k);
  for (Eigen::Index n = 0; n < k; ++n) {
    for (Eigen::Index m = n; m < k; ++m) {
      const cplx v = inner(orbitals_[n], orbitals_[m]);
      g(n, m) = v;
      g(m, n) = std::conj(v);
    }
    g(n, n) = g(n, n).real();
  }
  return g;
}

ComplexField density(const OrbitalEnsemble& ens) {
  ComplexField rho(ens.grid());
  auto r = rho.values();
  for (std::size_t n = 0; n < ens.rank(); ++n) {
    const double a = ens.weight(n);
    const auto u = ens.orbital(n).values();
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += a * std::norm(u[j]);
  }
  return rho;
}

ComplexField covariance_apply(const OrbitalEnsemble& ens, const ComplexField& v) {
  if (!v.grid()->same_as(*ens.grid())) throw std::invalid_argument("covariance_apply: grid mismatch");
  ComplexField out(ens.grid());
  auto o = out.values();
  for (std::size_t n = 0; n < ens.rank(); ++n) {
    const cplx c = ens.weight(n) * inner(ens.orbital(n), v);
    const auto u = ens.orbital(n).values();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] += c * u[j];
  }
  return out;
}

WeightedTraces weighted_traces(const OrbitalEnsemble& ens) {
  const Grid& g = *ens.grid();
  WeightedTraces tr;
  std::vector<cplx> spec(g.size());
  for (std::size_t n = 0; n < ens.rank(); ++n) {
    const double a = ens.weight(n);
    if (a == 0.0) continue;
    const auto u = ens.orbital(n).values();
    double sx = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) sx += std::hypot(1.0, g.x(j)) * std::norm(u[j]);
    g.forward(u, spec);
    double sk = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) sk += std::hypot(1.0, g.xi(k)) * std::norm(spec[k]);
    tr.tr_x += a * sx * g.dx();
    tr.tr_grad += a * sk * g.dxi();
  }
  return tr;
}

double schatten1_norm(const std::vector<ComplexField>& family, const Eigen::MatrixXcd& coefficients) {
  const auto m = static_cast<Eigen::Index>(family.size());
  if (coefficients.rows() != m || coefficients.cols() != m) {
    throw std::invalid_argument("schatten1_norm: coefficient matrix does not match family size");
  }
  if (m == 0) return 0.0;
  const Grid& g = *family.front().grid();
  const auto npts = static_cast<Eigen::Index>(g.size());
  const double sdx = std::sqrt(g.dx());
  Eigen::MatrixXcd phi(npts, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!family[static_cast<std::size_t>(i)].grid()->same_as(g)) {
      throw std::invalid_argument("schatten1_norm: grid mismatch");
    }
    const auto v = family[static_cast<std::size_t>(i)].values();
    for (Eigen::Index j = 0; j < npts; ++j) phi(j, i) = sdx * v[static_cast<std::size_t>(j)];
  }
  // phi = Q R with orthonormal Q, so the nonzero spectrum of phi C phi^* is that of R C R^*.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(phi);
  const Eigen::Index r = std::min(npts, m);
  Eigen::MatrixXcd rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::MatrixXcd small = rr * coefficients * rr.adjoint();
  small = 0.5 * (small + small.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(small, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double schatten1_distance(const OrbitalEnsemble& a, const OrbitalEnsemble& b) {
  if (!a.grid()->same_as(*b.grid())) throw std::invalid_argument("schatten1_distance: grid mismatch");
  const std::size_t ka = a.rank();
  const std::size_t kb = b.rank();
  bool same_weights = ka == kb;
  for (std::size_t n = 0; same_weights && n < ka; ++n) same_weights = a.weight(n) == b.weight(n);

  if (same_weights) {
    // gamma_A - gamma_B = sum alpha (|u><d| + |d><u| - |d><d|) with d = u - v; working
    // with d directly keeps small distances free of cancellation.
    std::vector<ComplexField> family;
    family.reserve(2 * ka);
    for (std::size_t n = 0; n < ka; ++n) {
      ComplexField d = a.orbital(n);
      const auto v = b.orbital(n).values();
      auto dv = d.values();
      for (std::size_t j = 0; j < dv.size(); ++j) dv[j] -= v[j];
      family.push_back(std::move(d));
    }
    for (std::size_t n = 0; n < ka; ++n) family.push_back(a.orbital(n));
    const auto k = static_cast<Eigen::Index>(ka);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
    for (Eigen::Index n = 0; n < k; ++n) {
      const double w = a.weight(static_cast<std::size_t>(n));
      c(n, n) = -w;
      c(n, k + n) = w;
      c(k + n, n) = w;
    }
    return schatten1_norm(family, c);
  }

  std::vector<ComplexField> family;
  family.reserve(ka + kb);
  for (std::size_t n = 0; n < ka; ++n) family.push_back(a.orbital(n));
  for (std::size_t n = 0; n < kb; ++n) family.push_back(b.orbital(n));
  const auto m = static_cast<Eigen::Index>(ka + kb);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t n = 0; n < ka; ++n) c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = a.weight(n);
  for (std::size_t n = 0; n < kb; ++n) {
    const auto i = static_cast<Eigen::Index>(ka + n);
    c(i, i) = -b.weight(n);
  }
  return schatten1_norm(family, c);
}

GaussianSample sample_field(const OrbitalEnsemble& ens, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianSample s;
  s.seed = seed;
  s.realization = ComplexField(ens.grid());
  s.coefficients.resize(ens.rank());
  auto x = s.realization.values();
  for (std::size_t n = 0; n < ens.rank(); ++n) {
    const double re = normal(rng);
    const double im = normal(rng);
    const cplx g = cplx(re, im) / std::numbers::sqrt2;
    s.coefficients[n] = g;
    const cplx c = std::sqrt(ens.weight(n)) * g;
    const auto u = ens.orbital(n).values();
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += c * u[j];
  }
  return s;
}

}  // namespace hfscat
