#include "hfscat/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

namespace hfscat {

std::string to_string(RhsMode mode) {
  switch (mode) {
    case RhsMode::HartreeFock: return "hartree-fock";
    case RhsMode::ReducedHartree: return "reduced-hartree";
    case RhsMode::Linear: return "linear";
  }
  return "unknown";
}

RhsMode parse_rhs_mode(std::string_view name) {
  if (name == "hartree-fock") return RhsMode::HartreeFock;
  if (name == "reduced-hartree") return RhsMode::ReducedHartree;
  if (name == "linear") return RhsMode::Linear;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected hartree-fock, reduced-hartree or linear)");
}

NonlinearOperator::NonlinearOperator(GridPtr grid, const Potential& w, RhsMode mode)
    : grid_(std::move(grid)),
      mode_(mode),
      multiplier_(grid_->convolution_multiplier(w)),
      mean_field_(grid_->size()),
      rho_scratch_(grid_->size()),
      rho_spec_(grid_->size()) {}

void NonlinearOperator::potential_of_density(std::span<const double> weights, const OrbitalValues& u) {
  const std::size_t npts = grid_->size();
  const std::size_t k = u.size();
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < npts; ++j) {
    double r = 0.0;
    for (std::size_t n = 0; n < k; ++n) r += weights[n] * std::norm(u[n][j]);
    rho_scratch_[j] = r;
  }
  grid_->raw_forward(rho_scratch_, rho_spec_);
  for (std::size_t q = 0; q < npts; ++q) rho_spec_[q] *= multiplier_[q];
  grid_->raw_backward(rho_spec_, rho_scratch_);
  // w even and real, rho real: the convolution is real up to roundoff.
  for (std::size_t j = 0; j < npts; ++j) mean_field_[j] = rho_scratch_[j].real();
}

void NonlinearOperator::pair_convolutions(const OrbitalValues& u) {
  const std::size_t k = u.size();
  const std::size_t npts = grid_->size();
  const std::size_t npairs = k * (k + 1) / 2;
  if (rank_ != k || pairs_.size() != npairs) {
    pairs_.assign(npairs, std::vector<cplx>(npts));
    pair_spec_.assign(npairs, std::vector<cplx>(npts));
    rank_ = k;
  }
  // Pair p enumerates (n, m) with n <= m, row-major.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < npairs; ++p) {
    std::size_t n = 0;
    std::size_t rem = p;
    while (rem >= k - n) {
      rem -= k - n;
      ++n;
    }
    const std::size_t m = n + rem;
    auto& buf = pairs_[p];
    auto& spec = pair_spec_[p];
    const auto& un = u[n];
    const auto& um = u[m];
    for (std::size_t j = 0; j < npts; ++j) buf[j] = std::conj(un[j]) * um[j];
    grid_->raw_forward(buf, spec);
    for (std::size_t q = 0; q < npts; ++q) spec[q] *= multiplier_[q];
    grid_->raw_backward(spec, buf);
  }
}

cplx NonlinearOperator::pair_value(std::size_t n, std::size_t m, std::size_t j) const {
  const std::size_t k = rank_;
  if (n <= m) {
    const std::size_t p = n * k - n * (n - 1) / 2 + (m - n);
    return pairs_[p][j];
  }
  const std::size_t p = m * k - m * (m - 1) / 2 + (n - m);
  return std::conj(pairs_[p][j]);
}

void NonlinearOperator::split(std::span<const double> weights, const OrbitalValues& u,
                              OrbitalValues& direct, OrbitalValues& exchange) {
  const std::size_t k = u.size();
  const std::size_t npts = grid_->size();
  if (weights.size() != k) throw std::invalid_argument("nonlinearity: weight count mismatch");
  direct.resize(k);
  for (auto& d : direct) d.assign(npts, cplx{});
  exchange.clear();
  if (mode_ == RhsMode::Linear) return;

  potential_of_density(weights, u);
#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t j = 0; j < npts; ++j) direct[m][j] = mean_field_[j] * u[m][j];
  }
  if (mode_ != RhsMode::HartreeFock) return;

  pair_convolutions(u);
  exchange.resize(k);
  for (auto& e : exchange) e.assign(npts, cplx{});
#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t j = 0; j < npts; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t n = 0; n < k; ++n) acc += weights[n] * u[n][j] * pair_value(n, m, j);
      exchange[m][j] = acc;
    }
  }
}

void NonlinearOperator::apply(std::span<const double> weights, const OrbitalValues& u, OrbitalValues& out) {
  const std::size_t k = u.size();
  const std::size_t npts = grid_->size();
  if (weights.size() != k) throw std::invalid_argument("nonlinearity: weight count mismatch");
  out.resize(k);
  for (auto& o : out) o.resize(npts);
  if (mode_ == RhsMode::Linear) {
    for (auto& o : out) std::fill(o.begin(), o.end(), cplx{});
    return;
  }
  potential_of_density(weights, u);
  if (mode_ == RhsMode::ReducedHartree) {
#pragma omp parallel for schedule(static)
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t j = 0; j < npts; ++j) out[m][j] = mean_field_[j] * u[m][j];
    }
    return;
  }
  pair_convolutions(u);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t j = 0; j < npts; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t n = 0; n < k; ++n) acc += weights[n] * u[n][j] * pair_value(n, m, j);
      out[m][j] = mean_field_[j] * u[m][j] - acc;
    }
  }
}

namespace {

OrbitalValues values_of(const OrbitalEnsemble& ens) {
  OrbitalValues u;
  u.reserve(ens.rank());
  for (const auto& f : ens.orbitals()) u.emplace_back(f.values().begin(), f.values().end());
  return u;
}

std::vector<ComplexField> fields_of(const GridPtr& grid, OrbitalValues&& v, std::size_t k) {
  std::vector<ComplexField> out;
  out.reserve(k);
  for (std::size_t m = 0; m < k; ++m) {
    if (m < v.size()) {
      out.emplace_back(grid, std::move(v[m]));
    } else {
      out.emplace_back(grid);
    }
  }
  return out;
}

}  // namespace

std::vector<ComplexField> direct_term(const OrbitalEnsemble& ens, const Potential& w) {
  NonlinearOperator op(ens.grid(), w, RhsMode::ReducedHartree);
  OrbitalValues out;
  op.apply(ens.weights(), values_of(ens), out);
  return fields_of(ens.grid(), std::move(out), ens.rank());
}

std::vector<ComplexField> exchange_term(const OrbitalEnsemble& ens, const Potential& w) {
  NonlinearOperator op(ens.grid(), w, RhsMode::HartreeFock);
  OrbitalValues direct, exchange;
  op.split(ens.weights(), values_of(ens), direct, exchange);
  return fields_of(ens.grid(), std::move(exchange), ens.rank());
}

std::vector<ComplexField> rhs(const OrbitalEnsemble& ens, const Potential& w, RhsMode mode) {
  NonlinearOperator op(ens.grid(), w, mode);
  OrbitalValues out;
  op.apply(ens.weights(), values_of(ens), out);
  return fields_of(ens.grid(), std::move(out), ens.rank());
}

std::vector<double> gridded_potential(const Potential& w, const Grid& grid) {
  const std::size_t npts = grid.size();
  std::vector<double> out(npts);
  for (std::size_t d = 0; d < npts; ++d) {
    const double lag = d < npts / 2 ? static_cast<double>(d) * grid.dx()
                                    : (static_cast<double>(d) - static_cast<double>(npts)) * grid.dx();
    out[d] = w.density_at(lag);
  }
  return out;
}

std::vector<ComplexField> exchange_dense_oracle(const OrbitalEnsemble& ens, std::span<const double> w_gridded) {
  const Grid& g = *ens.grid();
  const std::size_t npts = g.size();
  if (npts > 512) throw std::invalid_argument("exchange_dense_oracle: grid too large for the O(N^2 K) oracle (max 512)");
  if (w_gridded.size() != npts) throw std::invalid_argument("exchange_dense_oracle: potential samples do not match grid");
  const std::size_t k = ens.rank();
  // Kernel k(x_i, y_j) = sum alpha_n u_n(x_i) conj(u_n(y_j)), assembled explicitly.
  std::vector<cplx> kernel(npts * npts);
  for (std::size_t n = 0; n < k; ++n) {
    const auto u = ens.orbital(n).values();
    for (std::size_t i = 0; i < npts; ++i) {
      for (std::size_t j = 0; j < npts; ++j) kernel[i * npts + j] += ens.weight(n) * u[i] * std::conj(u[j]);
    }
  }
  std::vector<ComplexField> out;
  for (std::size_t m = 0; m < k; ++m) {
    ComplexField f(ens.grid());
    const auto um = ens.orbital(m).values();
    for (std::size_t i = 0; i < npts; ++i) {
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j < npts; ++j) {
        const std::size_t lag = (i + npts - j) % npts;
        acc += w_gridded[lag] * kernel[i * npts + j] * um[j];
      }
      f[i] = acc * g.dx();
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<ComplexField> exchange_dense_oracle(const OrbitalEnsemble& ens, const Potential& w) {
  if (!w.has_density()) {
    throw std::invalid_argument("exchange_dense_oracle: potential '" + w.kind_name() +
                                "' has no density to grid");
  }
  return exchange_dense_oracle(ens, gridded_potential(w, *ens.grid()));
}

}  // namespace hfscat
