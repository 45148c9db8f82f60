#include "hfscat/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hfscat {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::IFRK4 ? "ifrk4" : "strang2";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "ifrk4" || name == "IFRK4") return Scheme::IFRK4;
  if (name == "strang2" || name == "Strang2") return Scheme::Strang2;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected ifrk4 or strang2)");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("integrator.dt: must satisfy 0 < dt <= 0.1");
  if (!(t_start >= 1.0)) throw std::invalid_argument("integrator.t_start: must be >= 1");
  if (!(t_end >= t_start) || !std::isfinite(t_end)) {
    throw std::invalid_argument("integrator.t_end: must be finite and >= t_start");
  }
  if (!(snapshot_ratio > 1.0)) throw std::invalid_argument("integrator.snapshot_ratio: must be > 1");
  for (double t : extra_times) {
    if (!(t >= t_start && t <= t_end)) {
      throw std::invalid_argument("integrator.extra_times: every time must lie in [t_start, t_end]");
    }
  }
}

std::vector<double> IntegratorConfig::snapshot_times() const {
  std::vector<double> times;
  const double tol = 1e-12 * std::max(1.0, t_end);
  for (int j = 0;; ++j) {
    const double t = t_start * std::pow(snapshot_ratio, j);
    if (t > t_end - tol) break;
    times.push_back(t);
  }
  times.push_back(t_end);
  times.insert(times.end(), extra_times.begin(), extra_times.end());
  std::sort(times.begin(), times.end());
  std::vector<double> out;
  for (double t : times) {
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  }
  return out;
}

OrbitalEnsemble prepare_initial(const std::vector<WavePacket>& packets, const GridPtr& grid, double t_start) {
  if (packets.empty()) throw std::invalid_argument("initial_data: at least one packet is required");
  std::vector<double> weights;
  std::vector<ComplexField> orbitals;
  for (std::size_t p = 0; p < packets.size(); ++p) {
    const WavePacket& wp = packets[p];
    const std::string where = "initial_data.packets[" + std::to_string(p) + "]";
    if (!(wp.weight >= 0.0)) throw std::invalid_argument(where + ".weight: must be >= 0");
    if (!std::isfinite(wp.amplitude)) throw std::invalid_argument(where + ".amplitude: must be finite");
    ComplexField u(grid);
    if (wp.shape == PacketShape::Gaussian) {
      if (!(wp.width > 0.0)) throw std::invalid_argument(where + ".width: must be > 0");
      if (wp.order != 0 && wp.order != 1) throw std::invalid_argument(where + ".order: must be 0 or 1");
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double z = (grid->x(j) - wp.center) / wp.width;
        const double poly = wp.order == 0 ? 1.0 : std::numbers::sqrt2 * z;
        u[j] = wp.amplitude * poly * std::exp(-0.5 * z * z) * std::polar(1.0, wp.frequency * grid->x(j));
      }
    } else {
      const std::size_t k = grid->nearest_frequency_index(wp.frequency);
      const double xi = grid->xi(k);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = wp.amplitude * std::polar(1.0, xi * grid->x(j));
    }
    weights.push_back(wp.weight);
    orbitals.push_back(free_propagate(u, t_start));
  }
  return OrbitalEnsemble(std::move(weights), std::move(orbitals), t_start);
}

Stepper::Stepper(GridPtr grid, const Potential& w, RhsMode mode, Scheme scheme, bool dealias)
    : grid_(grid), op_(grid, w, mode), scheme_(scheme), dealias_(dealias) {}

void Stepper::filter(std::vector<cplx>& spec) const {
  const std::size_t n = grid_->size();
  spec[grid_->nyquist_index()] = 0.0;
  if (!dealias_) return;
  const std::size_t cut = n / 3;
  for (std::size_t k = cut + 1; k < n - cut; ++k) spec[k] = 0.0;
}

// v holds raw DFT coefficients of the profile relative to the step start;
// tau is the offset from the step start.
void Stepper::profile_rhs(std::span<const double> weights, const OrbitalValues& v, double tau,
                          OrbitalValues& out) {
  const std::size_t k = v.size();
  const std::size_t n = grid_->size();
  const auto xi = grid_->frequencies();
  const double inv_n = 1.0 / static_cast<double>(n);
  phys_.resize(k);
  out.resize(k);
#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<cplx> tmp(n);
    for (std::size_t q = 0; q < n; ++q) tmp[q] = v[m][q] * std::polar(inv_n, -tau * xi[q] * xi[q]);
    phys_[m].resize(n);
    grid_->raw_backward(tmp, phys_[m]);
  }
  op_.apply(weights, phys_, nl_);
#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < k; ++m) {
    out[m].resize(n);
    grid_->raw_forward(nl_[m], out[m]);
    for (std::size_t q = 0; q < n; ++q) out[m][q] *= cplx(0.0, -1.0) * std::polar(1.0, tau * xi[q] * xi[q]);
    filter(out[m]);
  }
}

void Stepper::free_flow(OrbitalValues& u, double h) {
  const std::size_t n = grid_->size();
  const auto xi = grid_->frequencies();
  const double inv_n = 1.0 / static_cast<double>(n);
#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < u.size(); ++m) {
    std::vector<cplx> spec(n);
    grid_->raw_forward(u[m], spec);
    for (std::size_t q = 0; q < n; ++q) spec[q] *= std::polar(inv_n, -h * xi[q] * xi[q]);
    grid_->raw_backward(spec, u[m]);
  }
}

void Stepper::advance_ifrk4(std::span<const double> weights, OrbitalValues& u, double h) {
  const std::size_t k = u.size();
  const std::size_t n = grid_->size();
  v0_.resize(k);
  stage_.resize(k);
  for (std::size_t m = 0; m < k; ++m) {
    v0_[m].resize(n);
    stage_[m].resize(n);
    grid_->raw_forward(u[m], v0_[m]);
  }
  auto combine = [&](const OrbitalValues& slope, double c) {
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t q = 0; q < n; ++q) stage_[m][q] = v0_[m][q] + c * slope[m][q];
    }
  };
  profile_rhs(weights, v0_, 0.0, k1_);
  combine(k1_, 0.5 * h);
  profile_rhs(weights, stage_, 0.5 * h, k2_);
  combine(k2_, 0.5 * h);
  profile_rhs(weights, stage_, 0.5 * h, k3_);
  combine(k3_, h);
  profile_rhs(weights, stage_, h, k4_);

  const auto xi = grid_->frequencies();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double c = h / 6.0;
  for (std::size_t m = 0; m < k; ++m) {
    auto& v = v0_[m];
    for (std::size_t q = 0; q < n; ++q) {
      v[q] += c * (k1_[m][q] + 2.0 * k2_[m][q] + 2.0 * k3_[m][q] + k4_[m][q]);
      v[q] *= std::polar(inv_n, -h * xi[q] * xi[q]);
    }
    grid_->raw_backward(v, u[m]);
  }
}

// Strang splitting: half free step, implicit midpoint for i u' = N(u), half free step.
void Stepper::advance_strang(std::span<const double> weights, OrbitalValues& u, double h) {
  const std::size_t k = u.size();
  const std::size_t n = grid_->size();
  free_flow(u, 0.5 * h);
  stage_ = u;
  OrbitalValues next = u;
  OrbitalValues mid(k, std::vector<cplx>(n));
  double scale = 0.0;
  for (const auto& f : u) {
    for (const auto& z : f) scale = std::max(scale, std::abs(z));
  }
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t q = 0; q < n; ++q) mid[m][q] = 0.5 * (stage_[m][q] + next[m][q]);
    }
    op_.apply(weights, mid, nl_);
    double change = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t q = 0; q < n; ++q) {
        const cplx updated = stage_[m][q] - cplx(0.0, h) * nl_[m][q];
        change = std::max(change, std::abs(updated - next[m][q]));
        next[m][q] = updated;
      }
    }
    if (change <= 1e-15 * std::max(scale, 1e-300)) break;
  }
  // Nyquist and optional dealiasing act on the nonlinear increment only.
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<cplx> inc(n), spec(n);
    for (std::size_t q = 0; q < n; ++q) inc[q] = next[m][q] - stage_[m][q];
    grid_->raw_forward(inc, spec);
    filter(spec);
    for (auto& z : spec) z /= static_cast<double>(n);
    grid_->raw_backward(spec, inc);
    for (std::size_t q = 0; q < n; ++q) u[m][q] = stage_[m][q] + inc[q];
  }
  free_flow(u, 0.5 * h);
}

void Stepper::advance(std::span<const double> weights, OrbitalValues& u, double /*t*/, double h) {
  if (scheme_ == Scheme::IFRK4) {
    advance_ifrk4(weights, u, h);
  } else {
    advance_strang(weights, u, h);
  }
}

namespace {

OrbitalValues values_of(const OrbitalEnsemble& ens) {
  OrbitalValues u;
  for (const auto& f : ens.orbitals()) u.emplace_back(f.values().begin(), f.values().end());
  return u;
}

OrbitalEnsemble ensemble_from(const OrbitalEnsemble& like, const OrbitalValues& u, double t) {
  std::vector<ComplexField> fields;
  fields.reserve(u.size());
  for (const auto& v : u) fields.emplace_back(like.grid(), v);
  return like.with_orbitals(std::move(fields), t);
}

bool all_finite(const OrbitalValues& u) {
  for (const auto& f : u) {
    double acc = 0.0;
    for (const auto& z : f) acc += z.real() + z.imag();
    if (!std::isfinite(acc)) return false;
  }
  return true;
}

}  // namespace

OrbitalEnsemble step(const OrbitalEnsemble& ens, const Potential& w, RhsMode mode, double dt, Scheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  Stepper stepper(ens.grid(), w, mode, scheme);
  OrbitalValues u = values_of(ens);
  stepper.advance(ens.weights(), u, ens.time(), dt);
  if (!all_finite(u)) throw NumericalError("step: non-finite values after step at t=" + std::to_string(ens.time()));
  return ensemble_from(ens, u, ens.time() + dt);
}

const OrbitalEnsemble& Trajectory::at(double t) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.time() - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  }
  throw std::out_of_range("trajectory: no snapshot at t=" + std::to_string(t));
}

bool Trajectory::has(double t) const {
  return std::any_of(snapshots.begin(), snapshots.end(), [t](const OrbitalEnsemble& s) {
    return std::abs(s.time() - t) <= 1e-9 * std::max(1.0, std::abs(t));
  });
}

double boundary_mass_fraction(const OrbitalEnsemble& ens) {
  const Grid& g = *ens.grid();
  const double edge = 0.4 * g.length();
  double outer = 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < ens.rank(); ++n) {
    const auto u = ens.orbital(n).values();
    double o = 0.0, a = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double p = std::norm(u[j]);
      a += p;
      if (std::abs(g.x(j)) > edge) o += p;
    }
    outer += ens.weight(n) * o;
    total += ens.weight(n) * a;
  }
  return total > 0.0 ? outer / total : 0.0;
}

Trajectory evolve(const IntegratorConfig& config, const OrbitalEnsemble& initial, const Potential& w,
                  RhsMode mode, const SnapshotCallback& on_snapshot) {
  config.validate();
  Trajectory traj;
  traj.potential = w;
  traj.mode = mode;
  traj.config = config;

  std::vector<double> times = config.snapshot_times();
  std::erase_if(times, [&](double t) { return t < initial.time() - 1e-12; });

  Stepper stepper(initial.grid(), w, mode, config.scheme, config.dealias);
  OrbitalValues u = values_of(initial);
  double t = initial.time();
  bool warned = false;
  const double baseline = boundary_mass_fraction(initial);
  auto record = [&](double at) {
    OrbitalEnsemble snap = ensemble_from(initial, u, at);
    const double frac = boundary_mass_fraction(snap);
    if (frac > 1e-6 && frac > 2.0 * baseline && !warned) {
      traj.warnings.push_back("boundary mass fraction " + std::to_string(frac) + " exceeds 1e-6 at t=" +
                              std::to_string(at) + "; periodic wrap-around may contaminate later snapshots");
      warned = true;
    }
    if (on_snapshot) on_snapshot(snap);
    traj.snapshots.push_back(std::move(snap));
  };

  for (double target : times) {
    while (t < target) {
      double h = config.dt;
      if (target - t <= h * (1.0 + 1e-9)) h = target - t;
      stepper.advance(initial.weights(), u, t, h);
      t = (h == target - t) ? target : t + h;
      if (!all_finite(u)) {
        throw NumericalError("evolve: non-finite values at t=" + std::to_string(t));
      }
    }
    record(target);
  }
  return traj;
}

std::vector<double> duhamel_residual(const Trajectory& traj, const Potential& w, RhsMode mode, int n_quad,
                                     double fine_dt) {
  if (n_quad < 2 || n_quad % 2 != 0) throw std::invalid_argument("duhamel_residual: n_quad must be even and >= 2");
  std::vector<double> out;
  if (traj.snapshots.size() < 2) return out;
  const GridPtr& grid = traj.grid();
  const Grid& g = *grid;
  const std::size_t npts = g.size();
  const auto xi = g.frequencies();
  NonlinearOperator op(grid, w, mode);
  Stepper stepper(grid, w, mode, traj.config.scheme, traj.config.dealias);

  for (std::size_t i = 0; i + 1 < traj.snapshots.size(); ++i) {
    const OrbitalEnsemble& start = traj.snapshots[i];
    const OrbitalEnsemble& end = traj.snapshots[i + 1];
    const double s = start.time();
    const double t = end.time();
    const double h = (t - s) / n_quad;
    const double sub = fine_dt > 0.0 ? fine_dt : std::min(h / 4.0, 0.01);
    const std::size_t k = start.rank();

    OrbitalValues u = values_of(start);
    OrbitalValues integral(k, std::vector<cplx>(npts));
    OrbitalValues nl;
    std::vector<cplx> spec(npts);
    double tau = s;
    for (int node = 0; node <= n_quad; ++node) {
      const double target = s + node * h;
      while (tau < target - 1e-14 * t) {
        const double step_h = std::min(sub, target - tau);
        stepper.advance(start.weights(), u, tau, step_h);
        tau = (step_h == target - tau) ? target : tau + step_h;
      }
      tau = target;
      const double simpson = (node == 0 || node == n_quad) ? 1.0 : (node % 2 == 1 ? 4.0 : 2.0);
      op.apply(start.weights(), u, nl);
      for (std::size_t m = 0; m < k; ++m) {
        g.forward(nl[m], spec);
        spec[g.nyquist_index()] = 0.0;
        for (std::size_t q = 0; q < npts; ++q) {
          integral[m][q] += simpson * h / 3.0 * std::polar(1.0, -(t - target) * xi[q] * xi[q]) * spec[q];
        }
      }
    }

    double acc = 0.0;
    std::vector<cplx> xs(npts), xt(npts);
    for (std::size_t m = 0; m < k; ++m) {
      g.forward(start.orbital(m).values(), xs);
      g.forward(end.orbital(m).values(), xt);
      double r = 0.0;
      for (std::size_t q = 0; q < npts; ++q) {
        const cplx res = xt[q] - std::polar(1.0, -(t - s) * xi[q] * xi[q]) * xs[q] + cplx(0.0, 1.0) * integral[m][q];
        r += std::norm(res);
      }
      acc += start.weight(m) * r * g.dxi();
    }
    out.push_back(std::sqrt(acc));
  }
  return out;
}

}  // namespace hfscat
