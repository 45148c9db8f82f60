#include "hfscat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hfscat {

namespace {

void require_same_family(const ProfileSnapshot& a, const ProfileSnapshot& b, const char* what) {
  if (a.rank() != b.rank() || a.weights != b.weights) {
    throw std::invalid_argument(std::string(what) + ": snapshots belong to different orbital families");
  }
  if (!a.grid()->same_as(*b.grid())) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double profile_scale(const ProfileSnapshot& p) {
  const std::size_t n = p.grid()->size();
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t o = 0; o < p.rank(); ++o) acc += p.weights[o] * std::norm(p.profiles[o][k]);
    m = std::max(m, acc);
  }
  return std::sqrt(m);
}

}  // namespace

ProfileSnapshot profile(const OrbitalEnsemble& ens) {
  ProfileSnapshot p;
  p.t = ens.time();
  p.weights.assign(ens.weights().begin(), ens.weights().end());
  for (const auto& u : ens.orbitals()) p.profiles.push_back(free_propagate(forward_transform(u), -ens.time()));
  return p;
}

void FitConfig::validate() const {
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("fit.theta: must lie in [0, 1)");
  const double bound = std::min(0.25, (1.0 - theta) / (4.0 * (3.0 - 2.0 * theta)));
  if (!(alpha > 0.0 && alpha < bound)) {
    throw std::invalid_argument("fit.alpha: must satisfy 0 < alpha < " + std::to_string(bound));
  }
  if (!(beta > 0.0)) throw std::invalid_argument("fit.beta: must be > 0");
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw std::invalid_argument("fit.window: need 0 < t_lo < t_hi");
}

DiagnosticsRecord diagnostics_record(const OrbitalEnsemble& ens, const Eigen::MatrixXcd& initial_gram) {
  const Grid& g = *ens.grid();
  const std::size_t npts = g.size();
  DiagnosticsRecord r;
  r.t = ens.time();
  const ComplexField rho = density(ens);
  double peak = 0.0;
  for (const auto& z : rho.values()) peak = std::max(peak, z.real());
  r.sup_norm = std::sqrt(peak);
  r.l2_mass = ens.trace_mass();

  std::vector<cplx> spec(npts), z(npts);
  const auto xi = g.frequencies();
  double h10 = 0.0, h01 = 0.0;
  for (std::size_t n = 0; n < ens.rank(); ++n) {
    g.forward(ens.orbital(n).values(), spec);
    double a = 0.0;
    for (std::size_t k = 0; k < npts; ++k) a += xi[k] * xi[k] * std::norm(spec[k]);
    h10 += ens.weight(n) * a * g.dxi();
    for (std::size_t k = 0; k < npts; ++k) spec[k] *= std::polar(1.0, ens.time() * xi[k] * xi[k]);
    g.inverse(spec, z);
    double b = 0.0;
    for (std::size_t j = 0; j < npts; ++j) b += g.x(j) * g.x(j) * std::norm(z[j]);
    h01 += ens.weight(n) * b * g.dx();
  }
  r.h10_x = std::sqrt(h10);
  r.h01_z = std::sqrt(h01);
  if (initial_gram.size() > 0) r.gram_drift = (ens.gram() - initial_gram).cwiseAbs().maxCoeff();
  r.boundary_mass_fraction = boundary_mass_fraction(ens);
  return r;
}

std::vector<DiagnosticsRecord> diagnostics_series(const Trajectory& traj) {
  std::vector<DiagnosticsRecord> out(traj.snapshots.size());
  if (traj.snapshots.empty()) return out;
  const Eigen::MatrixXcd g0 = traj.snapshots.front().gram();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) out[i] = diagnostics_record(traj.snapshots[i], g0);
  return out;
}

XtNorm xt_norm(const std::vector<DiagnosticsRecord>& records, const FitConfig& fit) {
  XtNorm x;
  for (const auto& r : records) {
    x.sup_weighted = std::max(x.sup_weighted, std::sqrt(r.t) * r.sup_norm);
    x.h10_weighted = std::max(x.h10_weighted, std::pow(r.t, -fit.alpha) * r.h10_x);
    x.h01_weighted = std::max(x.h01_weighted, std::pow(r.t, -fit.alpha) * r.h01_z);
    x.l2 = std::max(x.l2, std::sqrt(r.l2_mass));
  }
  return x;
}

XtNorm xt_norm(const Trajectory& traj, const FitConfig& fit) {
  if (traj.snapshots.size() < 2) throw std::invalid_argument("xt_norm: need at least two snapshots");
  return xt_norm(diagnostics_series(traj), fit);
}

FitResult linear_fit(const std::vector<std::pair<double, double>>& xy) {
  const std::size_t n = xy.size();
  if (n < 2) throw std::invalid_argument("linear_fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: abscissae are all equal");
  FitResult f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  f.n_points = n;
  if (n > 2) {
    double ssr = 0.0;
    for (const auto& [x, y] : xy) {
      const double r = y - (f.intercept + f.exponent * x);
      ssr += r * r;
    }
    f.std_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

FitResult decay_fit(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [t, v] : series) {
    if (t < t_lo * (1.0 - 1e-9) || t > t_hi * (1.0 + 1e-9)) continue;
    if (!(v > 0.0)) {
      throw std::domain_error("decay_fit: non-positive value " + std::to_string(v) + " at t=" + std::to_string(t));
    }
    logs.emplace_back(std::log(t), std::log(v));
  }
  if (logs.size() < 5) {
    throw std::invalid_argument("decay_fit: window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                                "] holds " + std::to_string(logs.size()) + " points, need at least 5");
  }
  FitResult f = linear_fit(logs);
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  return f;
}

CauchyDistance scattering_cauchy(const ProfileSnapshot& p1, const ProfileSnapshot& p2, const FitConfig& fit) {
  require_same_family(p1, p2, "scattering_cauchy");
  const Grid& g = *p1.grid();
  const std::size_t npts = g.size();
  const auto xi = g.frequencies();
  std::vector<double> pointwise(npts, 0.0);
  double h0theta = 0.0, htheta0 = 0.0;
  std::vector<cplx> diff(npts), phys(npts);
  for (std::size_t n = 0; n < p1.rank(); ++n) {
    const auto a = p1.profiles[n].coefficients();
    const auto b = p2.profiles[n].coefficients();
    for (std::size_t k = 0; k < npts; ++k) diff[k] = b[k] - a[k];
    double s = 0.0;
    for (std::size_t k = 0; k < npts; ++k) {
      const double d2 = std::norm(diff[k]);
      pointwise[k] += p1.weights[n] * d2;
      s += std::pow(1.0 + xi[k] * xi[k], fit.theta) * d2;
    }
    h0theta += p1.weights[n] * s * g.dxi();
    g.inverse(diff, phys);
    double r = 0.0;
    for (std::size_t j = 0; j < npts; ++j) r += std::pow(1.0 + g.x(j) * g.x(j), fit.theta) * std::norm(phys[j]);
    htheta0 += p1.weights[n] * r * g.dx();
  }
  CauchyDistance d;
  d.d_inf = std::sqrt(*std::max_element(pointwise.begin(), pointwise.end()));
  d.d_0theta = std::sqrt(h0theta);
  d.d_theta0 = std::sqrt(htheta0);
  return d;
}

PhaseDrift phase_drift(const std::vector<ProfileSnapshot>& series, double xi_probe) {
  if (series.size() < 3) throw std::invalid_argument("phase_drift: need at least three snapshots");
  const Grid& g = *series.front().grid();
  const std::size_t k = g.nearest_frequency_index(xi_probe);
  const ProfileSnapshot& first = series.front();
  std::size_t dominant = 0;
  double best = -1.0;
  for (std::size_t n = 0; n < first.rank(); ++n) {
    const double v = first.weights[n] * std::norm(first.profiles[n][k]);
    if (v > best) {
      best = v;
      dominant = n;
    }
  }
  bool all_zero = true;
  for (const auto& snap : series) {
    for (const auto& z : snap.profiles[dominant].coefficients()) all_zero = all_zero && z == cplx{};
  }
  if (all_zero) {
    PhaseDrift d;
    d.orbital = dominant;
    d.xi = g.xi(k);
    d.n_points = series.size();
    return d;
  }
  std::vector<std::pair<double, double>> pts;
  double unwrapped = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto coeffs = series[i].profiles[dominant].coefficients();
    double peak = 0.0;
    for (const auto& z : coeffs) peak = std::max(peak, std::abs(z));
    const cplx z = coeffs[k];
    if (!(std::abs(z) >= 1e-3 * peak) || peak == 0.0) {
      throw std::domain_error("phase_drift: profile amplitude at xi=" + std::to_string(g.xi(k)) +
                              " is below 1e-3 of its peak at t=" + std::to_string(series[i].t));
    }
    const double angle = std::arg(z);
    if (i == 0) {
      unwrapped = angle;
    } else {
      double step = angle - previous;
      step -= 2.0 * std::numbers::pi * std::round(step / (2.0 * std::numbers::pi));
      unwrapped += step;
    }
    previous = angle;
    pts.emplace_back(std::log(series[i].t), unwrapped);
  }
  const FitResult f = linear_fit(pts);
  PhaseDrift d;
  d.slope = f.exponent;
  d.std_error = f.std_error;
  d.orbital = dominant;
  d.xi = g.xi(k);
  d.n_points = pts.size();
  return d;
}

std::vector<double> RemainderField::norm() const {
  if (per_orbital.empty()) return {};
  std::vector<double> out(per_orbital.front().size(), 0.0);
  for (std::size_t n = 0; n < per_orbital.size(); ++n) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += weights[n] * std::norm(per_orbital[n][k]);
  }
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

double RemainderField::sup_norm() const {
  const auto n = norm();
  return n.empty() ? 0.0 : *std::max_element(n.begin(), n.end());
}

RemainderField remainder_fd(const ProfileSnapshot& minus, const ProfileSnapshot& plus) {
  require_same_family(minus, plus, "remainder_fd");
  const double h = 0.5 * (plus.t - minus.t);
  const double s = 0.5 * (plus.t + minus.t);
  if (!(h > 0.0)) throw std::invalid_argument("remainder_fd: snapshots must be ordered in time");
  if (h > 0.1 * s * (1.0 + 1e-9)) throw std::invalid_argument("remainder_fd: half-spacing exceeds 0.1 s");
  RemainderField r;
  r.s = s;
  r.weights = minus.weights;
  for (std::size_t n = 0; n < minus.rank(); ++n) {
    const auto a = minus.profiles[n].coefficients();
    const auto b = plus.profiles[n].coefficients();
    std::vector<cplx> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = (b[k] - a[k]) / (2.0 * h);
    r.per_orbital.push_back(std::move(d));
  }
  return r;
}

cplx f_integrand(const ProfileSnapshot& p, const Potential& w, std::size_t m, std::size_t k_eta,
                 std::size_t k_sigma, std::size_t k_xi, bool include_potential) {
  const Grid& g = *p.grid();
  const std::size_t npts = g.size();
  const std::size_t a = (k_xi + 2 * npts - k_sigma - k_eta) % npts;  // xi - sigma - eta
  const std::size_t b = (k_xi + npts - k_sigma) % npts;               // xi - sigma
  const std::size_t c = (k_xi + npts - k_eta) % npts;                 // xi - eta
  cplx e_ab{0.0, 0.0}, e_ac{0.0, 0.0};
  for (std::size_t n = 0; n < p.rank(); ++n) {
    const cplx za = std::conj(p.profiles[n][a]);
    e_ab += p.weights[n] * za * p.profiles[n][b];
    e_ac += p.weights[n] * za * p.profiles[n][c];
  }
  const cplx bracket = e_ab * p.profiles[m][c] - e_ac * p.profiles[m][b];
  return include_potential ? w.fourier_at(g.xi(k_eta)) * bracket : bracket;
}

RemainderField remainder_quadrature(const ProfileSnapshot& p, const Potential& w) {
  const Grid& g = *p.grid();
  const std::size_t npts = g.size();
  if (npts > 64) throw std::invalid_argument("remainder_quadrature: grid has more than 64 points (O(n^3) cost guard)");
  const std::size_t k = p.rank();
  const auto xi = g.frequencies();

  // E[conj Z^(a) Z^(b)] for every lattice pair.
  std::vector<cplx> pair_mean(npts * npts);
  for (std::size_t a = 0; a < npts; ++a) {
    for (std::size_t b = 0; b < npts; ++b) {
      cplx acc{0.0, 0.0};
      for (std::size_t n = 0; n < k; ++n) acc += p.weights[n] * std::conj(p.profiles[n][a]) * p.profiles[n][b];
      pair_mean[a * npts + b] = acc;
    }
  }
  std::vector<double> what(npts);
  for (std::size_t q = 0; q < npts; ++q) what[q] = w.fourier_at(xi[q]);

  const cplx prefactor = cplx(0.0, -1.0) * g.dxi() * g.dxi() / std::sqrt(2.0 * std::numbers::pi);
  RemainderField r;
  r.s = p.t;
  r.weights = p.weights;
  r.per_orbital.assign(k, std::vector<cplx>(npts));
  for (std::size_t m = 0; m < k; ++m) {
    const auto zm = p.profiles[m].coefficients();
    for (std::size_t kx = 0; kx < npts; ++kx) {
      if (kx == g.nyquist_index()) continue;
      cplx acc{0.0, 0.0};
      for (std::size_t ke = 0; ke < npts; ++ke) {
        const std::size_t c = (kx + npts - ke) % npts;
        for (std::size_t ks = 0; ks < npts; ++ks) {
          const std::size_t a = (kx + 2 * npts - ks - ke) % npts;
          const std::size_t b = (kx + npts - ks) % npts;
          const cplx f = what[ke] * (pair_mean[a * npts + b] * zm[c] - pair_mean[a * npts + c] * zm[b]);
          const double phi = xi[kx] * xi[kx] + xi[a] * xi[a] - xi[b] * xi[b] - xi[c] * xi[c];
          acc += std::polar(1.0, p.t * phi) * f;
        }
      }
      r.per_orbital[m][kx] = prefactor * acc;
    }
  }
  return r;
}

FIdentityReport f_identity_check(const ProfileSnapshot& p, const Potential& w, std::size_t samples,
                                 std::uint64_t seed) {
  const Grid& g = *p.grid();
  const std::size_t npts = g.size();
  FIdentityReport rep;
  const double scale = profile_scale(p);
  rep.scale_cubed = scale * scale * scale;
  for (std::size_t m = 0; m < p.rank(); ++m) {
    for (std::size_t kx = 0; kx < npts; ++kx) {
      rep.max_f_at_origin = std::max(rep.max_f_at_origin, std::abs(f_integrand(p, w, m, 0, 0, kx)));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, npts - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t ke = pick(rng), ks = pick(rng), kx = pick(rng);
    const std::size_t m = i % p.rank();
    const cplx fwd = f_integrand(p, w, m, ke, ks, kx, false);
    const cplx rev = f_integrand(p, w, m, ks, ke, kx, false);
    rep.max_antisymmetry = std::max(rep.max_antisymmetry, std::abs(fwd + rev));
  }
  return rep;
}

OperatorScattering operator_scattering(const Trajectory& traj) {
  if (traj.snapshots.size() < 4) throw std::invalid_argument("operator_scattering: need at least four snapshots");
  const OrbitalEnsemble& anchor = traj.snapshots.back();
  const double t_anchor = anchor.time();
  std::vector<SpectralField> final_spec;
  for (const auto& u : anchor.orbitals()) final_spec.push_back(forward_transform(u));

  auto scattered_at = [&](double t) {
    std::vector<ComplexField> orbitals;
    for (const auto& s : final_spec) orbitals.push_back(inverse_transform(free_propagate(s, t - t_anchor)));
    return anchor.with_orbitals(std::move(orbitals), t);
  };

  OperatorScattering out;
  out.gamma_infty = scattered_at(0.0);
  const std::size_t count = traj.snapshots.size() - 1;
  out.distances.resize(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    const OrbitalEnsemble& snap = traj.snapshots[i];
    out.distances[i] = {snap.time(), schatten1_distance(snap, scattered_at(snap.time()))};
  }
  return out;
}

DispersiveReport dispersive_estimate_check(const ComplexField& g, const std::vector<double>& t_list, double beta,
                                           double gamma_exp) {
  if (!(gamma_exp > 0.5 + 2.0 * beta)) {
    throw std::invalid_argument("dispersive_estimate_check: need gamma > 1/2 + 2 beta");
  }
  const Grid& grid = *g.grid();
  const SpectralField spec = forward_transform(g);
  double spec_sup = 0.0;
  for (const auto& z : spec.coefficients()) spec_sup = std::max(spec_sup, std::abs(z));
  double weighted = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    weighted += std::pow(1.0 + grid.x(j) * grid.x(j), gamma_exp) * std::norm(g[j]);
  }
  weighted = std::sqrt(weighted * grid.dx());

  DispersiveReport rep;
  bool any_late = false;
  for (double t : t_list) {
    DispersiveRow row;
    row.t = t;
    row.lhs = sup_norm(inverse_transform(free_propagate(spec, t)));
    row.rhs_leading = spec_sup / std::sqrt(t);
    row.rhs_weighted = weighted * std::pow(t, -0.5 - 2.0 * beta);
    const double denom = row.rhs_leading + row.rhs_weighted;
    row.ratio = denom > 0.0 ? row.lhs / denom : 0.0;
    row.leading_ratio = spec_sup > 0.0 ? std::sqrt(t) * row.lhs / spec_sup : 0.0;
    rep.rows.push_back(row);
    if (t >= 2.0) any_late = true;
  }
  for (const auto& row : rep.rows) {
    if (any_late && row.t < 2.0) continue;
    rep.constant = std::max(rep.constant, row.ratio);
    rep.leading_constant = std::max(rep.leading_constant, row.leading_ratio);
  }
  return rep;
}

}  // namespace hfscat
