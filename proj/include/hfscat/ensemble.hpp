#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hfscat/grid.hpp"

namespace hfscat {

/// Weighted orbital family u_1..u_K with weights alpha_n >= 0.
///
/// The same data describes the density operator gamma = sum alpha_n |u_n><u_n|
/// and the Gaussian random field X = sum sqrt(alpha_n) g_n u_n whose covariance
/// is gamma. Every expectation over the probability space reduces to a finite
/// weighted sum over orbitals because E[conj(g_n) g_m] = delta_nm.
class OrbitalEnsemble {
 public:
  OrbitalEnsemble() = default;
  OrbitalEnsemble(std::vector<double> weights, std::vector<ComplexField> orbitals, double time);

  [[nodiscard]] std::size_t rank() const { return weights_.size(); }
  [[nodiscard]] const GridPtr& grid() const { return orbitals_.front().grid(); }
  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] double weight(std::size_t n) const { return weights_[n]; }
  [[nodiscard]] const ComplexField& orbital(std::size_t n) const { return orbitals_[n]; }
  [[nodiscard]] const std::vector<ComplexField>& orbitals() const { return orbitals_; }

  [[nodiscard]] OrbitalEnsemble with_orbitals(std::vector<ComplexField> orbitals, double time) const {
    return OrbitalEnsemble(weights_, std::move(orbitals), time);
  }

  /// sum alpha_n ||u_n||^2, the trace of gamma.
  [[nodiscard]] double trace_mass() const;
  /// G_nm = <u_n, u_m>.
  [[nodiscard]] Eigen::MatrixXcd gram() const;

 private:
  std::vector<double> weights_;
  std::vector<ComplexField> orbitals_;
  double time_ = 0.0;
};

/// One realisation sum sqrt(alpha_n) g_n u_n with g_n complex standard normal.
struct GaussianSample {
  std::uint64_t seed = 0;
  ComplexField realization;
  std::vector<cplx> coefficients;
};

/// rho(x) = sum alpha_n |u_n(x)|^2 = E|X(x)|^2.
ComplexField density(const OrbitalEnsemble& ens);
/// gamma(v) = sum alpha_n <u_n, v> u_n.
ComplexField covariance_apply(const OrbitalEnsemble& ens, const ComplexField& v);

struct WeightedTraces {
  double tr_grad = 0.0;  ///< Tr(<nabla> gamma)
  double tr_x = 0.0;     ///< Tr(<x> gamma)
};
WeightedTraces weighted_traces(const OrbitalEnsemble& ens);

/// Trace norm of gamma_A - gamma_B, computed exactly from the finite-rank structure.
double schatten1_distance(const OrbitalEnsemble& a, const OrbitalEnsemble& b);

/// Trace norm of sum_{ij} c_ij |f_i><f_j| for a finite family f and Hermitian c.
double schatten1_norm(const std::vector<ComplexField>& family, const Eigen::MatrixXcd& coefficients);

GaussianSample sample_field(const OrbitalEnsemble& ens, std::uint64_t seed);

}  // namespace hfscat
