#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "hfscat/app.hpp"
#include "hfscat/io.hpp"

namespace hfscat {

namespace {

constexpr double sqrt_2pi = 2.5066282746310002;

std::vector<Potential> potential_family() {
  return {Potential::dirac(1.3), Potential::gaussian(0.7, 1.5), Potential::box(1.1, 2.0),
          Potential::sum_of_diracs({{1.0, 1.0}, {0.5, 2.5}})};
}

// Sums of a few shifted, modulated Gaussians with random complex coefficients.
OrbitalEnsemble localized_ensemble(const GridPtr& grid, std::size_t k, double amplitude, std::uint64_t seed,
                                   double spread = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  std::vector<double> weights;
  std::vector<ComplexField> orbitals;
  for (std::size_t n = 0; n < k; ++n) {
    ComplexField f(grid);
    for (int bump = 0; bump < 3; ++bump) {
      const cplx c(u01(rng), u01(rng));
      const double x0 = spread * u01(rng);
      const double xi0 = 1.5 * u01(rng);
      const double width = 1.0 + 0.3 * u01(rng);
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double z = (grid->x(j) - x0) / width;
        f[j] += amplitude * c * std::exp(-0.5 * z * z) * std::polar(1.0, xi0 * grid->x(j));
      }
    }
    weights.push_back(1.0 / static_cast<double>(n + 1));
    orbitals.push_back(std::move(f));
  }
  return OrbitalEnsemble(std::move(weights), std::move(orbitals), 0.0);
}

OrbitalEnsemble shared_plane_wave(const GridPtr& grid, long mode, double amplitude) {
  const std::vector<cplx> coeffs{{1.0, 0.0}, {0.0, 0.5}, {-0.3, 0.2}};
  const double xi = grid->xi(grid->mode_index(mode));
  std::vector<ComplexField> orbitals;
  for (const cplx& c : coeffs) {
    ComplexField f(grid);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = amplitude * c * std::polar(1.0, xi * grid->x(j));
    orbitals.push_back(std::move(f));
  }
  return OrbitalEnsemble({1.0, 0.5, 0.25}, std::move(orbitals), 0.0);
}

double max_abs(const std::vector<ComplexField>& fs) {
  double m = 0.0;
  for (const auto& f : fs) m = std::max(m, sup_norm(f));
  return m;
}

double max_diff(const std::vector<ComplexField>& a, const std::vector<ComplexField>& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (std::size_t j = 0; j < a[n].size(); ++j) m = std::max(m, std::abs(a[n][j] - b[n][j]));
  }
  return m;
}

// Cubic scale of an ensemble's nonlinearity: ||w||_M1 * sup rho * sup |u|.
double cubic_scale(const OrbitalEnsemble& ens, const Potential& w) {
  double rho = 0.0;
  for (const auto& z : density(ens).values()) rho = std::max(rho, z.real());
  double u = 0.0;
  for (const auto& f : ens.orbitals()) u = std::max(u, sup_norm(f));
  return std::max(w.m1_norm(), 1e-300) * rho * u;
}

std::vector<ComplexField> hf_rhs(const OrbitalEnsemble& ens, const Potential& w, Fault fault) {
  const auto d = direct_term(ens, w);
  const auto x = exchange_term(ens, w);
  const double sign = fault == Fault::ExchangeSign ? 1.0 : -1.0;
  std::vector<ComplexField> out;
  for (std::size_t m = 0; m < d.size(); ++m) {
    ComplexField f(ens.grid());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = d[m][j] + sign * x[m][j];
    out.push_back(std::move(f));
  }
  return out;
}

CheckResult make(std::string name, double value, double tol, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.passed = std::isfinite(value) && value <= tol;
  c.detail = std::move(detail);
  return c;
}

CheckResult check_potential_transform() {
  double worst = 0.0;
  for (const auto& w : potential_family()) {
    worst = std::max(worst, std::abs(w.total_mass() - sqrt_2pi * w.fourier_at(0.0)));
    for (int i = 1; i <= 1000; ++i) {
      const double eta = 0.013 * i * i;
      worst = std::max(worst, std::abs(w.fourier_at(eta) - w.fourier_at(-eta)));
      worst = std::max(worst, std::max(0.0, std::abs(w.fourier_at(eta)) - w.m1_norm() / sqrt_2pi));
    }
  }
  return make("potential_transform", worst, 1e-12);
}

CheckResult check_transform_unitarity() {
  const GridPtr g = Grid::make(64, 16.0);
  const OrbitalEnsemble ens = localized_ensemble(g, 1, 1.0, 11);
  const ComplexField& f = ens.orbital(0);
  const SpectralField fh = forward_transform(f);
  const ComplexField back = inverse_transform(fh);
  double rt = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) rt = std::max(rt, std::abs(back[j] - f[j]));
  const double norm_err = std::abs(l2_norm(fh) - l2_norm(f)) / l2_norm(f);
  return make("transform_unitarity", std::max(rt / sup_norm(f), norm_err), 1e-12);
}

CheckResult check_plane_wave(Fault fault) {
  const GridPtr g = Grid::make(64, 16.0);
  const OrbitalEnsemble ens = shared_plane_wave(g, 3, 0.7);
  double worst = 0.0;
  for (const auto& w : potential_family()) worst = std::max(worst, max_abs(hf_rhs(ens, w, fault)) / cubic_scale(ens, w));
  return make("plane_wave_cancellation", worst, 1e-12, "sup|N(u)| / (|w|_M1 sup rho sup|u|), 4 potentials");
}

CheckResult check_rank_one(Fault fault) {
  const GridPtr g = Grid::make(64, 16.0);
  const OrbitalEnsemble ens = localized_ensemble(g, 1, 0.8, 5);
  double worst = 0.0;
  for (const auto& w : potential_family()) worst = std::max(worst, max_abs(hf_rhs(ens, w, fault)) / cubic_scale(ens, w));
  return make("rank_one_cancellation", worst, 1e-12);
}

CheckResult check_exchange_oracle() {
  const GridPtr g = Grid::make(64, 16.0);
  const OrbitalEnsemble ens = localized_ensemble(g, 4, 1.0, 21);
  const Potential w = Potential::gaussian(1.0, 1.0);
  const auto fast = exchange_term(ens, w);
  const auto dense = exchange_dense_oracle(ens, w);
  return make("exchange_oracle", max_diff(fast, dense) / max_abs(dense), 1e-10, "N=64, K=4, gaussian");
}

CheckResult check_reference_kernels() {
  const GridPtr g = Grid::make(128, 32.0);
  const OrbitalEnsemble ens = localized_ensemble(g, 5, 1.0, 33);
  double worst = 0.0;
  for (const auto& w : potential_family()) {
    const auto d = direct_term(ens, w);
    const auto x = exchange_term(ens, w);
    worst = std::max(worst, max_diff(d, reference::direct_term(ens, w)) / max_abs(d));
    worst = std::max(worst, max_diff(x, reference::exchange_term(ens, w)) / max_abs(x));
  }
  return make("reference_kernels", worst, 1e-12);
}

CheckResult check_f_identity() {
  const GridPtr g = Grid::make(32, 16.0);
  const OrbitalEnsemble ens = localized_ensemble(g, 3, 1.0, 8);
  const ProfileSnapshot p = profile(ens.with_orbitals(ens.orbitals(), 3.0));
  const FIdentityReport rep = f_identity_check(p, Potential::gaussian(1.0, 1.0), 2000);
  return make("f_identity", std::max(rep.max_f_at_origin, rep.max_antisymmetry) / rep.scale_cubed, 1e-14);
}

CheckResult check_remainder_plane_wave() {
  const GridPtr g = Grid::make(32, 16.0);
  const OrbitalEnsemble ens = shared_plane_wave(g, 2, 0.7);
  const ProfileSnapshot p = profile(ens.with_orbitals(ens.orbitals(), 2.0));
  double scale = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    double a = 0.0;
    for (std::size_t n = 0; n < p.rank(); ++n) a += p.weights[n] * std::norm(p.profiles[n][k]);
    scale = std::max(scale, std::sqrt(a));
  }
  const RemainderField r = remainder_quadrature(p, Potential::gaussian(1.0, 1.0));
  return make("remainder_plane_wave", r.sup_norm() / (scale * scale * scale), 1e-14);
}

CheckResult check_schatten() {
  const GridPtr g = Grid::make(64, 16.0);
  const OrbitalEnsemble a = localized_ensemble(g, 3, 1.0, 41);
  std::vector<ComplexField> rotated;
  for (std::size_t n = 0; n < a.rank(); ++n) {
    ComplexField f = a.orbital(n);
    for (auto& z : f.values()) z *= std::polar(1.0, 0.7 * static_cast<double>(n + 1));
    rotated.push_back(std::move(f));
  }
  const double phase = schatten1_distance(a, a.with_orbitals(rotated, 0.0));
  const OrbitalEnsemble zero(std::vector<double>(a.rank(), 0.0), a.orbitals(), 0.0);
  const double trace = std::abs(schatten1_distance(a, zero) - a.trace_mass());
  return make("schatten1_identities", std::max(phase, trace) / a.trace_mass(), 1e-10);
}

CheckResult check_checkpoint() {
  const GridPtr g = Grid::make(32, 8.0);
  const OrbitalEnsemble a = localized_ensemble(g, 2, 1.0, 3);
  const OrbitalEnsemble b = a.with_orbitals(a.orbitals(), 1.5);
  const auto path = std::filesystem::temp_directory_path() / "hfscat_verify_roundtrip.hfsc";
  nlohmann::ordered_json header{{"grid", {{"n", 32}, {"L", 8.0}}}};
  write_checkpoint(path, header, {a, b});
  const Checkpoint cp = read_checkpoint(path);
  std::filesystem::remove(path);
  bool same = cp.snapshots.size() == 2;
  for (std::size_t s = 0; same && s < 2; ++s) {
    const OrbitalEnsemble& orig = s == 0 ? a : b;
    same = cp.snapshots[s].time() == orig.time() && cp.snapshots[s].rank() == orig.rank();
    for (std::size_t n = 0; same && n < orig.rank(); ++n) {
      same = cp.snapshots[s].weight(n) == orig.weight(n) &&
             std::equal(orig.orbital(n).values().begin(), orig.orbital(n).values().end(),
                        cp.snapshots[s].orbital(n).values().begin());
    }
  }
  return make("checkpoint_roundtrip", same ? 0.0 : 1.0, 0.0);
}

// Full-level checks.

CheckResult check_linear_decay() {
  const GridPtr g = Grid::make(4096, 1024.0);
  ComplexField u(g);
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = 0.1 * std::exp(-0.5 * g->x(j) * g->x(j));
  std::vector<std::pair<double, double>> series;
  for (double t = 4.0; t <= 64.0 * (1 + 1e-12); t *= std::numbers::sqrt2) series.emplace_back(t, sup_norm(free_propagate(u, t)));
  const FitResult f = decay_fit(series, 4.0, 64.0);
  return make("linear_dispersive_decay", std::abs(f.exponent + 0.5), 0.05, "exponent " + format_double(f.exponent));
}

CheckResult check_dispersive_constant() {
  const GridPtr g = Grid::make(4096, 1024.0);
  ComplexField u(g);
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::exp(-0.5 * g->x(j) * g->x(j));
  std::vector<double> ts;
  for (double t = 1.0; t <= 64.0 * (1 + 1e-12); t *= std::numbers::sqrt2) ts.push_back(t);
  const DispersiveReport rep = dispersive_estimate_check(u, ts, 0.125, 1.0);
  return make("dispersive_estimate", rep.constant, 2.0);
}

IntegratorConfig short_run(double dt, Scheme scheme, double t_end) {
  IntegratorConfig ic;
  ic.dt = dt;
  ic.scheme = scheme;
  ic.t_start = 1.0;
  ic.t_end = t_end;
  ic.snapshot_ratio = 1e6;
  return ic;
}

CheckResult check_rank_one_freeness() {
  const GridPtr g = Grid::make(256, 64.0);
  const OrbitalEnsemble init = prepare_initial({WavePacket{PacketShape::Gaussian, 1.0, 0.5, 0.0, 0.5, 1.0, 0}}, g, 1.0);
  const Potential w = Potential::gaussian(1.0, 1.0);
  const Trajectory hf = evolve(short_run(0.05, Scheme::IFRK4, 8.0), init, w, RhsMode::HartreeFock);
  const Trajectory lin = evolve(short_run(0.05, Scheme::IFRK4, 8.0), init, w, RhsMode::Linear);
  double err = 0.0;
  for (std::size_t s = 0; s < hf.snapshots.size(); ++s) {
    err = std::max(err, max_diff(hf.snapshots[s].orbitals(), lin.snapshots[s].orbitals()));
  }
  return make("rank_one_freeness", err, 1e-8);
}

double order_slope(Scheme scheme) {
  const GridPtr g = Grid::make(128, 32.0);
  const std::vector<WavePacket> packets{{PacketShape::Gaussian, 1.0, 1.5, 0.0, 0.5, 1.0, 0},
                                        {PacketShape::Gaussian, 0.5, 1.5, 0.0, 0.0, 1.0, 1}};
  const OrbitalEnsemble init = prepare_initial(packets, g, 1.0);
  const Potential w = Potential::gaussian(1.0, 1.0);
  const double t_end = 2.0;
  const auto final_state = [&](double dt) {
    return evolve(short_run(dt, scheme, t_end), init, w, RhsMode::HartreeFock).snapshots.back();
  };
  const OrbitalEnsemble ref = final_state(0.01 / 16.0);
  std::vector<std::pair<double, double>> pts;
  for (double dt : {0.04, 0.02, 0.01}) {
    pts.emplace_back(std::log(dt), std::log(max_diff(final_state(dt).orbitals(), ref.orbitals())));
  }
  return linear_fit(pts).exponent;
}

CheckResult check_ifrk4_order() {
  const double slope = order_slope(Scheme::IFRK4);
  return make("ifrk4_order", std::abs(slope - 4.0), 0.3, "slope " + format_double(slope));
}

CheckResult check_strang_order() {
  const double slope = order_slope(Scheme::Strang2);
  return make("strang2_order", std::abs(slope - 2.0), 0.3, "slope " + format_double(slope));
}

CheckResult check_duhamel() {
  const GridPtr g = Grid::make(128, 32.0);
  const std::vector<WavePacket> packets{{PacketShape::Gaussian, 1.0, 1.5, 0.0, 0.5, 1.0, 0},
                                        {PacketShape::Gaussian, 0.5, 1.5, 0.0, 0.0, 1.0, 1}};
  const OrbitalEnsemble init = prepare_initial(packets, g, 1.0);
  const Potential w = Potential::gaussian(1.0, 1.0);
  const Trajectory traj = evolve(short_run(0.005, Scheme::IFRK4, 2.0), init, w, RhsMode::HartreeFock);
  const auto coarse = duhamel_residual(traj, w, RhsMode::HartreeFock, 16, 0.005);
  const auto fine = duhamel_residual(traj, w, RhsMode::HartreeFock, 32, 0.005);
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) worst = std::max(worst, fine[i] / coarse[i]);
  return make("duhamel_refinement", worst, 1.0 / 8.0, "residual ratio fine/coarse");
}

CheckResult check_remainder_cross() {
  const GridPtr g = Grid::make(64, 32.0);
  const std::vector<WavePacket> packets{{PacketShape::Gaussian, 1.0, 1.0, 0.0, 0.0, 1.0, 0},
                                        {PacketShape::Gaussian, 0.5, 1.0, 0.0, 0.0, 1.0, 1}};
  const Potential w = Potential::gaussian(1.0, 1.0);
  const double s = 4.0, h = 0.05 * s;
  IntegratorConfig ic = short_run(0.002, Scheme::IFRK4, s + h);
  ic.extra_times = {s - h, s};
  const Trajectory traj = evolve(ic, prepare_initial(packets, g, 1.0), w, RhsMode::HartreeFock);
  const RemainderField fd = remainder_fd(profile(traj.at(s - h)), profile(traj.at(s + h)));
  const ProfileSnapshot p = profile(traj.at(s));
  const RemainderField q = remainder_quadrature(p, w);
  double diff = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    double a = 0.0;
    for (std::size_t n = 0; n < p.rank(); ++n) a += p.weights[n] * std::norm(q.per_orbital[n][k] - fd.per_orbital[n][k]);
    diff = std::max(diff, std::sqrt(a));
  }
  double scale = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    double a = 0.0;
    for (std::size_t n = 0; n < p.rank(); ++n) a += p.weights[n] * std::norm(p.profiles[n][k]);
    scale = std::max(scale, std::sqrt(a));
  }
  const double tol = 0.1 * fd.sup_norm() + 1e-6 * scale * scale * scale;
  return make("remainder_cross_check", diff, tol, "sup |R_q - R_fd| at s=4, n=64");
}

}  // namespace

std::vector<CheckResult> verify_checks(VerifyLevel level, Fault fault) {
  std::vector<CheckResult> out{check_potential_transform(), check_transform_unitarity(), check_plane_wave(fault),
                               check_rank_one(fault),       check_exchange_oracle(),     check_reference_kernels(),
                               check_f_identity(),          check_remainder_plane_wave(), check_schatten(),
                               check_checkpoint()};
  if (level == VerifyLevel::Full) {
    for (auto* f : {check_linear_decay, check_dispersive_constant, check_rank_one_freeness, check_ifrk4_order,
                    check_strang_order, check_duhamel, check_remainder_cross}) {
      out.push_back(f());
    }
  }
  return out;
}

}  // namespace hfscat
