// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "hfscat/app.hpp"
#include "hfscat/config.hpp"
#include "hfscat/diagnostics.hpp"
#include "hfscat/integrator.hpp"
#include "hfscat/nonlinearity.hpp"

using namespace hfscat;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

RunConfig preset(const std::string& name) { return load_config(fs::path(HFSCAT_PRESET_DIR) / (name + ".toml")); }

double max_diff(const OrbitalEnsemble& a, const OrbitalEnsemble& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.rank(); ++n)
    for (std::size_t j = 0; j < a.orbital(n).size(); ++j) m = std::max(m, std::abs(a.orbital(n)[j] - b.orbital(n)[j]));
  return m;
}

double max_abs(const std::vector<ComplexField>& fs) {
  double m = 0.0;
  for (const auto& f : fs) m = std::max(m, sup_norm(f));
  return m;
}

// Localized orbitals with a fixed seed, used where a preset is too large for an O(N^2) oracle.
OrbitalEnsemble localized(const GridPtr& g, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w;
  std::vector<ComplexField> orb;
  for (std::size_t n = 0; n < k; ++n) {
    ComplexField f(g);
    for (int b = 0; b < 3; ++b) {
      const cplx c(u(rng), u(rng));
      const double x0 = 2.0 * u(rng), xi0 = 1.5 * u(rng), width = 1.0 + 0.3 * u(rng);
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double z = (g->x(j) - x0) / width;
        f[j] += c * std::exp(-0.5 * z * z) * std::polar(1.0, xi0 * g->x(j));
      }
    }
    w.push_back(1.0 / static_cast<double>(n + 1));
    orb.push_back(std::move(f));
  }
  return OrbitalEnsemble(std::move(w), std::move(orb), 0.0);
}

const CheckResult& find_check(const std::vector<CheckResult>& all, const std::string& name) {
  for (const auto& c : all)
    if (c.name == name) return c;
  throw std::runtime_error("no verify check named " + name);
}

double fit_exponent(const ordered_json& j) {
  if (!j.is_object() || j.contains("error")) throw std::runtime_error("fit unavailable: " + j.dump());
  return j["exponent"].get<double>();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Shared runs, computed once.
struct Runs {
  std::optional<RunOutput> hf_default;
  const RunOutput& default_run() {
    if (!hf_default) hf_default = simulate(preset("preset-hf-default"));
    return *hf_default;
  }
} runs;

Outcome ac1() {
  const GridPtr g = Grid::make(256, 64.0);
  const std::vector<Potential> ws = {Potential::dirac(1.0), Potential::gaussian(1.0, 1.0), Potential::box(0.8, 1.5),
                                     Potential::sum_of_diracs({{1.0, 0.0}, {0.5, 2.0}})};
  double worst = 0.0;
  bool ok = true;
  for (double amp : {0.1, 1.0, 3.0}) {
    const double xi = g->xi(g->mode_index(7));
    std::vector<ComplexField> orb;
    for (const cplx c : {cplx(amp, 0.0), cplx(0.0, 0.5 * amp), cplx(-0.3 * amp, 0.4 * amp)}) {
      ComplexField f(g);
      for (std::size_t j = 0; j < f.size(); ++j) f[j] = c * std::polar(1.0, xi * g->x(j));
      orb.push_back(std::move(f));
    }
    const OrbitalEnsemble e({1.0, 0.5, 0.25}, orb, 0.0);
    for (const auto& w : ws) {
      const double r = max_abs(rhs(e, w, RhsMode::HartreeFock)) / (amp * amp * amp);
      worst = std::max(worst, r);
      ok = ok && r <= 1e-12;
    }
  }
  return {ok, "max sup|rhs|/amp^3 = " + num(worst) + " over 4 potentials x 3 amplitudes (tol 1e-12)"};
}

Outcome ac2() {
  RunConfig hf = preset("preset-rank1");
  RunConfig lin = hf;
  lin.mode = RhsMode::Linear;
  const GridPtr g = Grid::make(hf.grid.n, hf.grid.L);
  const OrbitalEnsemble x0 = prepare_initial(hf.packets, g, hf.integrator.t_start);
  const Trajectory a = evolve(hf.integrator, x0, hf.potential, RhsMode::HartreeFock);
  const Trajectory b = evolve(lin.integrator, x0, lin.potential, RhsMode::Linear);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) worst = std::max(worst, max_diff(a.snapshots[i], b.snapshots[i]));
  return {worst <= 1e-8, "sup |X_HF - X_lin| over t in [1, " + num(a.snapshots.back().time()) + "] = " + num(worst) +
                             " (tol 1e-8)"};
}

Outcome ac3() {
  const auto& r = runs.default_run().report;
  const double m = r["mass_drift"].get<double>(), gd = r["gram_drift"].get<double>();
  return {m <= 1e-8 && gd <= 1e-7, "relative mass drift " + num(m) + " (tol 1e-8), gram drift " + num(gd) + " (tol 1e-7)"};
}

Outcome ac4() {
  const GridPtr g = Grid::make(256, 32.0);
  const OrbitalEnsemble e = localized(g, 4, 2024);
  const Potential w = Potential::gaussian(1.0, 1.0);
  const auto fast = exchange_term(e, w);
  const auto dense = exchange_dense_oracle(e, w);
  double diff = 0.0;
  for (std::size_t n = 0; n < fast.size(); ++n)
    for (std::size_t j = 0; j < g->size(); ++j) diff = std::max(diff, std::abs(fast[n][j] - dense[n][j]));
  const double rel = diff / max_abs(dense);
  return {rel <= 1e-10, "N=256 K=4 relative sup error " + num(rel) + " (tol 1e-10)"};
}

Outcome ac5(const std::vector<CheckResult>& full) {
  const auto& order = find_check(full, "ifrk4_order");
  const auto& duh = find_check(full, "duhamel_refinement");
  return {order.passed && duh.passed, "ifrk4 " + order.detail + " (need 4.0 +- 0.3); duhamel fine/coarse " +
                                          num(duh.value) + " (need <= 0.125)"};
}

Outcome ac6() {
  RunConfig cfg = preset("preset-hf-default");
  cfg.mode = RhsMode::Linear;
  cfg.probes.remainder_times.clear();
  const RunOutput run = simulate(cfg);
  const double p = fit_exponent(run.report["sup_decay_exponent"]);

  const GridPtr g = Grid::make(16384, 4096.0);
  std::vector<double> times;
  for (double t = 1.0; t <= 64.0 + 1e-9; t *= std::numbers::sqrt2) times.push_back(t);
  double worst = 0.0;
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    ComplexField f(g);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = std::exp(-a * g->x(j) * g->x(j));
    worst = std::max(worst, dispersive_estimate_check(f, times, cfg.fit.beta, 1.0).constant);
  }
  return {std::abs(p + 0.5) <= 0.05 && worst <= 2.0,
          "linear sup exponent " + num(p) + " on [4, 64] (need -0.5 +- 0.05); dispersive constant " + num(worst) +
              " (need <= 2)"};
}

Outcome ac7() {
  const double p = fit_exponent(runs.default_run().report["sup_decay_exponent"]);
  return {p >= -0.65 && p <= -0.35, "hartree-fock sup exponent " + num(p) + " on [4, 64] (need [-0.65, -0.35])"};
}

Outcome ac8() {
  const auto& r = runs.default_run().report;
  std::vector<std::array<double, 3>> rows;
  for (const auto& row : r["cauchy"]) {
    const double t = row["t"].get<double>();
    for (double want : {4.0, 8.0, 16.0, 32.0})
      if (std::abs(t - want) <= 1e-9 * want)
        rows.push_back({row["d_inf"].get<double>(), row["d_theta0"].get<double>(), row["d_0theta"].get<double>()});
  }
  if (rows.size() != 4) return {false, "cauchy pairs for t in {4, 8, 16, 32} missing"};
  bool dec[3] = {true, true, true};
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (int c = 0; c < 3; ++c) dec[c] = dec[c] && rows[i][c] < rows[i - 1][c];
  const double p = fit_exponent(r["cauchy_exponent"]);
  std::string d = "d_inf " + num(rows[0][0]) + " -> " + num(rows[3][0]) + (dec[0] ? " decreasing" : " NOT decreasing") +
                  ", exponent " + num(p) + " (need < -0.05); theta distances " +
                  (dec[1] && dec[2] ? "decreasing" : "NOT decreasing");
  return {dec[0] && dec[1] && dec[2] && p < -0.05, d};
}

Outcome ac9() {
  const auto& r = runs.default_run().report;
  std::vector<std::pair<double, double>> s;
  for (const auto& row : r["s1_distances"]) {
    const double t = row["t"].get<double>();
    if (t >= 8.0 * (1 - 1e-9) && t <= 64.0 * (1 + 1e-9)) s.emplace_back(t, row["distance"].get<double>());
  }
  bool dec = s.size() >= 5;
  for (std::size_t i = 1; i < s.size(); ++i) dec = dec && s[i].second < s[i - 1].second;
  const FitResult f = decay_fit(s, 8.0, 64.0);
  return {dec && f.exponent < 0.0, "S1 distance " + num(s.front().second) + " -> " + num(s.back().second) +
                                       (dec ? " decreasing" : " NOT decreasing") + ", exponent " + num(f.exponent) +
                                       " on [8, 64] (need < 0)"};
}

Outcome ac10() {
  const RunConfig cfg = preset("preset-contrast");
  RunConfig a = cfg, b = cfg;
  a.mode = cfg.compare.first;
  b.mode = cfg.compare.second;
  if (a.mode != RhsMode::HartreeFock || b.mode != RhsMode::ReducedHartree) return {false, "contrast preset modes"};
  const RunOutput ra = simulate(a), rb = simulate(b);
  const auto rep = compare_report(cfg, ra, rb);
  const auto& pa = rep["first"]["phase_drift"];
  const auto& pb = rep["second"]["phase_drift"];
  if (pa.contains("error") || pb.contains("error")) return {false, "phase drift unavailable: " + rep["warnings"].dump()};
  const double sh = pa["slope"].get<double>(), sr = pb["slope"].get<double>(), er = pb["stderr"].get<double>();
  const bool significant = std::abs(sr) >= 5.0 * er;
  const bool small = std::abs(sh) <= 0.1 * std::abs(sr);
  return {significant && small, "RH slope " + num(sr) + " +- " + num(er) + ", HF slope " + num(sh) + ", ratio " +
                                    num(std::abs(sh) / std::abs(sr)) + " (need RH >= 5 stderr, ratio <= 0.1)"};
}

Outcome ac11(const std::vector<CheckResult>& full) {
  const RunOutput& run = runs.default_run();
  const ProfileSnapshot p = profile(run.trajectory.at(4.0));
  const FIdentityReport f = f_identity_check(p, run.config.potential, 2000);
  const bool f_ok = f.max_f_at_origin <= 1e-14 * f.scale_cubed;
  const auto& cross = find_check(full, "remainder_cross_check");
  const double p_rem = fit_exponent(run.report["remainder_exponent"]);
  return {f_ok && cross.passed && p_rem <= -1.0,
          "max|F(s,0,0,xi)| " + num(f.max_f_at_origin) + " vs 1e-14 scale^3 = " + num(1e-14 * f.scale_cubed) +
              "; R_fd vs R_q diff " + num(cross.value) + " (tol " + num(cross.tolerance) + "); remainder exponent " +
              num(p_rem) + " (need <= -1)"};
}

Outcome ac12() {
  const fs::path base = fs::temp_directory_path() / ("hfscat-acceptance-" + std::to_string(::getpid()));
  std::string detail;
  bool ok = true;
  for (const char* name : {"preset-rank1", "preset-planewave"}) {
    std::string bytes[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path root = base / std::to_string(rep);
      ::setenv(output_root_env, root.c_str(), 1);
      std::ostringstream out, err;
      const int code = cmd_run(fs::path(HFSCAT_PRESET_DIR) / (std::string(name) + ".toml"), out, err);
      if (code != exit_ok) {
        ::unsetenv(output_root_env);
        fs::remove_all(base);
        return {false, std::string(name) + " run failed: " + err.str()};
      }
      const fs::path dir = root / name;
      for (const char* f : {"checkpoint.hfsc", "diagnostics.ndjson", "diagnostics.csv", "report.json"})
        bytes[rep] += slurp(dir / f);
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    ok = ok && same;
    detail += std::string(name) + (same ? " identical (" + std::to_string(bytes[0].size()) + " bytes); " : " DIFFERS; ");
  }
  ::unsetenv(output_root_env);
  fs::remove_all(base);
  return {ok, detail};
}

}  // namespace

int main() {
  int failures = 0;
  const std::vector<CheckResult> full = verify_checks(VerifyLevel::Full);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 plane-wave cancellation", ac1},
      {"AC2 rank-one freeness", ac2},
      {"AC3 mass conservation", ac3},
      {"AC4 exchange oracle equivalence", ac4},
      {"AC5 integrator order", [&] { return ac5(full); }},
      {"AC6 linear dispersive decay", ac6},
      {"AC7 nonlinear decay", ac7},
      {"AC8 profile scattering", ac8},
      {"AC9 operator scattering", ac9},
      {"AC10 hartree-fock vs reduced hartree contrast", ac10},
      {"AC11 stationary-phase algebra", [&] { return ac11(full); }},
      {"AC12 determinism", ac12},
  };
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << num(secs) << " s]" << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
