#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hfscat/ensemble.hpp"
#include "hfscat/potential.hpp"

namespace hfscat {

enum class RhsMode { HartreeFock, ReducedHartree, Linear };

std::string to_string(RhsMode mode);
/// Accepts "hartree-fock", "reduced-hartree", "linear".
RhsMode parse_rhs_mode(std::string_view name);

using OrbitalValues = std::vector<std::vector<cplx>>;

/// Low-rank evaluation of the Hartree-Fock nonlinearity
///   N(u)_m = (w * rho) u_m - sum_n alpha_n u_n (w * (conj(u_n) u_m)),
/// with rho = sum_n alpha_n |u_n|^2.
///
/// The K(K+1)/2 pair convolutions share the grid's FFT plans and run in
/// parallel; the (m, n) pair is the conjugate of (n, m) since w is real and
/// even. Accumulation into each output orbital follows a fixed order, so the
/// result does not depend on the number of threads.
///
/// Holds per-pair scratch buffers: one instance per concurrent caller.
class NonlinearOperator {
 public:
  NonlinearOperator(GridPtr grid, const Potential& w, RhsMode mode);

  [[nodiscard]] RhsMode mode() const { return mode_; }
  [[nodiscard]] const GridPtr& grid() const { return grid_; }

  /// out[m] = N(u)_m. out is resized as needed.
  void apply(std::span<const double> weights, const OrbitalValues& u, OrbitalValues& out);

  /// Direct and exchange parts separately (exchange left empty outside HartreeFock).
  void split(std::span<const double> weights, const OrbitalValues& u, OrbitalValues& direct,
             OrbitalValues& exchange);

 private:
  void potential_of_density(std::span<const double> weights, const OrbitalValues& u);
  void pair_convolutions(const OrbitalValues& u);
  [[nodiscard]] cplx pair_value(std::size_t n, std::size_t m, std::size_t j) const;

  GridPtr grid_;
  RhsMode mode_;
  std::vector<double> multiplier_;
  std::vector<double> mean_field_;
  std::vector<cplx> rho_scratch_;
  std::vector<cplx> rho_spec_;
  std::vector<std::vector<cplx>> pairs_;
  std::vector<std::vector<cplx>> pair_spec_;
  std::size_t rank_ = 0;
};

/// (w * rho) u_m for every orbital.
std::vector<ComplexField> direct_term(const OrbitalEnsemble& ens, const Potential& w);
/// sum_n alpha_n u_n (w * (conj(u_n) u_m)) for every orbital.
std::vector<ComplexField> exchange_term(const OrbitalEnsemble& ens, const Potential& w);
/// direct - exchange (HartreeFock), direct (ReducedHartree) or 0 (Linear).
std::vector<ComplexField> rhs(const OrbitalEnsemble& ens, const Potential& w, RhsMode mode);

/// w sampled at the periodic lags d*dx, d = 0..n-1 (lags wrapped to [-L/2, L/2)).
/// Only density variants have samples; atomic variants throw.
std::vector<double> gridded_potential(const Potential& w, const Grid& grid);

/// Direct O(N^2 K) quadrature of int w(x - y) k(x, y) u_m(y) dy.
/// Rejects grids with more than 512 points.
std::vector<ComplexField> exchange_dense_oracle(const OrbitalEnsemble& ens,
                                                std::span<const double> w_gridded);
std::vector<ComplexField> exchange_dense_oracle(const OrbitalEnsemble& ens, const Potential& w);

namespace reference {

/// Serial, unfused versions kept as the baseline for the parallel kernels.
std::vector<ComplexField> direct_term(const OrbitalEnsemble& ens, const Potential& w);
std::vector<ComplexField> exchange_term(const OrbitalEnsemble& ens, const Potential& w);

}  // namespace reference

}  // namespace hfscat
