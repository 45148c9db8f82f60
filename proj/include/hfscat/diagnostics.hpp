#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hfscat/ensemble.hpp"
#include "hfscat/integrator.hpp"
#include "hfscat/potential.hpp"

namespace hfscat {

/// Spectral profiles Z^_n(t, xi) = e^{i t xi^2} u^_n(t, xi) of one snapshot.
struct ProfileSnapshot {
  double t = 0.0;
  std::vector<double> weights;
  std::vector<SpectralField> profiles;

  [[nodiscard]] std::size_t rank() const { return weights.size(); }
  [[nodiscard]] const GridPtr& grid() const { return profiles.front().grid(); }
};

ProfileSnapshot profile(const OrbitalEnsemble& ens);

/// Analysis exponents. alpha must satisfy 0 < alpha < min(1/4, (1-theta)/(4(3-2 theta))).
struct FitConfig {
  double alpha = 0.05;
  double theta = 0.5;
  double beta = 0.125;
  double t_lo = 4.0;
  double t_hi = 64.0;

  void validate() const;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double sup_norm = 0.0;        ///< sup_x sqrt(rho(x))
  double l2_mass = 0.0;         ///< sum alpha_n ||u_n||^2
  double h10_x = 0.0;           ///< sqrt(sum alpha_n ||d_x u_n||^2)
  double h01_z = 0.0;           ///< sqrt(sum alpha_n ||x Z_n||^2)
  double gram_drift = 0.0;      ///< max |G(t) - G(t_0)|
  double boundary_mass_fraction = 0.0;
};

DiagnosticsRecord diagnostics_record(const OrbitalEnsemble& ens, const Eigen::MatrixXcd& initial_gram);
std::vector<DiagnosticsRecord> diagnostics_series(const Trajectory& traj);

struct XtNorm {
  double sup_weighted = 0.0;  ///< max t^{1/2} ||X||_{L^inf_x L^2_omega}
  double h10_weighted = 0.0;  ///< max t^{-alpha} ||X||_{H.^{1,0} L^2_omega}
  double h01_weighted = 0.0;  ///< max t^{-alpha} ||Z||_{H.^{0,1} L^2_omega}
  double l2 = 0.0;            ///< max ||X||_{L^2_x L^2_omega}
  [[nodiscard]] double combined() const { return sup_weighted + h10_weighted + h01_weighted + l2; }
};

XtNorm xt_norm(const Trajectory& traj, const FitConfig& fit);
XtNorm xt_norm(const std::vector<DiagnosticsRecord>& records, const FitConfig& fit);

struct FitResult {
  double exponent = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::size_t n_points = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Least-squares slope of log(value) against log(t) over t in [t_lo, t_hi].
/// Needs at least five points in the window and strictly positive values.
FitResult decay_fit(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi);

/// Plain linear least squares of y against x, with the slope's standard error.
FitResult linear_fit(const std::vector<std::pair<double, double>>& xy);

struct CauchyDistance {
  double d_inf = 0.0;     ///< sup_xi ||dZ^(xi)||_{L^2_omega}
  double d_theta0 = 0.0;  ///< ||<x>^theta dZ||, the H^{theta,0}_xi norm
  double d_0theta = 0.0;  ///< ||<xi>^theta dZ^||, the H^{0,theta}_xi norm
};

/// Distances between two profiles of the same orbital family.
CauchyDistance scattering_cauchy(const ProfileSnapshot& p1, const ProfileSnapshot& p2, const FitConfig& fit);

struct PhaseDrift {
  double slope = 0.0;
  double std_error = 0.0;
  std::size_t orbital = 0;
  double xi = 0.0;
  std::size_t n_points = 0;
};

/// Fits the unwrapped phase of the dominant orbital's profile at xi_probe
/// against log t. Throws if the probe amplitude drops below 1e-3 of the
/// orbital's peak anywhere in the series. An identically zero series has slope 0.
PhaseDrift phase_drift(const std::vector<ProfileSnapshot>& series, double xi_probe);

/// Time derivative of the profile at one instant, per orbital, plus its L^2_omega norm.
struct RemainderField {
  double s = 0.0;
  std::vector<double> weights;
  std::vector<std::vector<cplx>> per_orbital;
  [[nodiscard]] std::vector<double> norm() const;
  [[nodiscard]] double sup_norm() const;
};

/// Central difference (Z^(s+h) - Z^(s-h)) / 2h. Requires h <= 0.1 s.
RemainderField remainder_fd(const ProfileSnapshot& minus, const ProfileSnapshot& plus);

/// The Duhamel integrand of the profile equation evaluated as a double sum over
/// the frequency lattice:
///   R_m(s, xi) = -i (2 pi)^{-1/2} sum_{eta, sigma} dxi^2 e^{i s phi} F_m(s, eta, sigma, xi)
/// with phi = xi^2 + (xi-sigma-eta)^2 - (xi-sigma)^2 - (xi-eta)^2 (= 2 eta sigma without wrap).
/// O(n^3 K^2); grids above 64 points are rejected.
RemainderField remainder_quadrature(const ProfileSnapshot& p, const Potential& w);

/// F_m(eta, sigma, xi) = w^(eta) (E[conj Z^(xi-sigma-eta) Z^(xi-sigma)] Z^_m(xi-eta)
///                                - E[conj Z^(xi-sigma-eta) Z^(xi-eta)] Z^_m(xi-sigma)),
/// arguments are lattice indices. With include_potential = false the w^(eta) factor is dropped.
cplx f_integrand(const ProfileSnapshot& p, const Potential& w, std::size_t m, std::size_t k_eta,
                 std::size_t k_sigma, std::size_t k_xi, bool include_potential = true);

struct FIdentityReport {
  double max_f_at_origin = 0.0;    ///< max over xi, m of |F(s, 0, 0, xi)|
  double max_antisymmetry = 0.0;   ///< max |B(eta, sigma) + B(sigma, eta)| for the bracket B = F / w^(eta)
  double scale_cubed = 0.0;        ///< (max_xi ||Z^(xi)||_{L^2_omega})^3
};

FIdentityReport f_identity_check(const ProfileSnapshot& p, const Potential& w, std::size_t samples,
                                 std::uint64_t seed = 7);

struct OperatorScattering {
  OrbitalEnsemble gamma_infty;  ///< profiles W_n at t = 0, with the run's weights
  std::vector<std::pair<double, double>> distances;  ///< (t, ||gamma(t) - e^{it Delta} gamma_inf||_S1)
};

/// Uses the last snapshot's profile as the scattering state and measures the
/// trace-norm distance at every earlier snapshot.
OperatorScattering operator_scattering(const Trajectory& traj);

struct DispersiveRow {
  double t = 0.0;
  double lhs = 0.0;          ///< ||e^{it Delta} g||_inf
  double rhs_leading = 0.0;  ///< t^{-1/2} ||g^||_inf
  double rhs_weighted = 0.0; ///< t^{-1/2-2 beta} ||<x>^gamma g||_2
  double ratio = 0.0;        ///< lhs / (rhs_leading + rhs_weighted)
  double leading_ratio = 0.0;///< t^{1/2} lhs / ||g^||_inf
};

struct DispersiveReport {
  double constant = 0.0;        ///< sup of ratio over t >= 2
  double leading_constant = 0.0;///< sup of leading_ratio over t >= 2
  std::vector<DispersiveRow> rows;
};

DispersiveReport dispersive_estimate_check(const ComplexField& g, const std::vector<double>& t_list, double beta,
                                           double gamma_exp);

}  // namespace hfscat
