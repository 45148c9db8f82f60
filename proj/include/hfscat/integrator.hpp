#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfscat/ensemble.hpp"
#include "hfscat/nonlinearity.hpp"

namespace hfscat {

/// Raised when the evolution produces non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { IFRK4, Strang2 };

std::string to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct IntegratorConfig {
  double dt = 0.05;
  Scheme scheme = Scheme::IFRK4;
  double t_start = 1.0;
  double t_end = 128.0;
  /// Snapshots at t_start * r^j below t_end, plus t_end itself.
  double snapshot_ratio = 1.4142135623730951;
  /// Additional snapshot times inside [t_start, t_end].
  std::vector<double> extra_times;
  /// Zero the modes with |k| > n/3 of every nonlinear evaluation.
  bool dealias = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  [[nodiscard]] std::vector<double> snapshot_times() const;
};

enum class PacketShape { Gaussian, PlaneWave };

/// One orbital of the initial data at t = 0, before the free flow to t_start.
///
/// Gaussian: amplitude * H_order((x - center)/width) exp(-(x - center)^2 / (2 width^2)) e^{i frequency x}
/// with H_0 = 1 and H_1(z) = sqrt(2) z (orthogonal to H_0 for a shared center and width).
/// PlaneWave: amplitude * e^{i xi_m x} with xi_m the lattice frequency nearest to `frequency`.
struct WavePacket {
  PacketShape shape = PacketShape::Gaussian;
  double weight = 1.0;
  double amplitude = 0.1;
  double center = 0.0;
  double frequency = 0.0;
  double width = 1.0;
  int order = 0;
};

/// Builds X_0 from the packets and applies the free flow up to t_start.
OrbitalEnsemble prepare_initial(const std::vector<WavePacket>& packets, const GridPtr& grid,
                                double t_start = 1.0);

/// Advances orbitals of one ensemble by fixed steps. Keeps FFT scratch
/// buffers, so one instance serves one evolution at a time.
class Stepper {
 public:
  Stepper(GridPtr grid, const Potential& w, RhsMode mode, Scheme scheme, bool dealias = false);

  /// Advances the orbitals (physical values) from time t to t + h.
  void advance(std::span<const double> weights, OrbitalValues& u, double t, double h);

 private:
  void profile_rhs(std::span<const double> weights, const OrbitalValues& v, double tau, OrbitalValues& out);
  void filter(std::vector<cplx>& spec) const;
  void advance_ifrk4(std::span<const double> weights, OrbitalValues& u, double h);
  void advance_strang(std::span<const double> weights, OrbitalValues& u, double h);
  void free_flow(OrbitalValues& u, double h);

  GridPtr grid_;
  NonlinearOperator op_;
  Scheme scheme_;
  bool dealias_;
  OrbitalValues phys_, nl_, stage_, k1_, k2_, k3_, k4_, v0_;
};

OrbitalEnsemble step(const OrbitalEnsemble& ens, const Potential& w, RhsMode mode, double dt,
                     Scheme scheme = Scheme::IFRK4);

struct Trajectory {
  std::vector<OrbitalEnsemble> snapshots;
  std::string config_hash;
  Potential potential;
  RhsMode mode = RhsMode::HartreeFock;
  IntegratorConfig config;
  std::vector<std::string> warnings;

  [[nodiscard]] const GridPtr& grid() const { return snapshots.front().grid(); }
  /// Snapshot whose time matches t to 1e-9 relative; throws std::out_of_range otherwise.
  [[nodiscard]] const OrbitalEnsemble& at(double t) const;
  [[nodiscard]] bool has(double t) const;
};

/// Fraction of the trace mass in the outer tenth of the box on either side (|x| > 0.4 L).
double boundary_mass_fraction(const OrbitalEnsemble& ens);

using SnapshotCallback = std::function<void(const OrbitalEnsemble&)>;

/// Integrates from initial.time() to config.t_end, recording every snapshot time.
/// The last step before each snapshot is shortened to land on it exactly.
/// Warns once when the boundary mass fraction passes 1e-6 and twice its initial value.
Trajectory evolve(const IntegratorConfig& config, const OrbitalEnsemble& initial, const Potential& w,
                  RhsMode mode, const SnapshotCallback& on_snapshot = {});

/// Norm of X(t) - e^{i(t-s)Delta} X(s) + i int_s^t e^{i(t-tau)Delta} N(X(tau)) dtau for
/// consecutive snapshots, with X(tau) re-simulated on the composite Simpson nodes
/// (n_quad subintervals, even). fine_dt <= 0 picks min(h/4, 0.01).
std::vector<double> duhamel_residual(const Trajectory& traj, const Potential& w, RhsMode mode, int n_quad,
                                     double fine_dt = 0.0);

}  // namespace hfscat
