#include "hfscat/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>

#include "hfscat/io.hpp"

namespace hfscat {

namespace {

using json = nlohmann::ordered_json;

json error_json(const std::string& kind, const std::string& message, const std::string& field = {}) {
  json j;
  j["error"] = kind;
  if (!field.empty()) j["field"] = field;
  j["message"] = message;
  return j;
}

// Fits that may legitimately fail (too few points, zero series) become
// {"error": ...} entries instead of aborting the report.
json try_fit(const std::vector<std::pair<double, double>>& series, double lo, double hi) {
  try {
    return fit_json(decay_fit(series, lo, hi));
  } catch (const std::exception& e) {
    return json{{"error", e.what()}};
  }
}

bool in_window(double t, double lo, double hi) { return t >= lo * (1.0 - 1e-9) && t <= hi * (1.0 + 1e-9); }

std::size_t index_of(const Trajectory& traj, double t) {
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    if (std::abs(traj.snapshots[i].time() - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  }
  throw std::out_of_range("no snapshot at t=" + std::to_string(t));
}

json phase_json(const std::vector<ProfileSnapshot>& series, double xi_probe) {
  try {
    const PhaseDrift d = phase_drift(series, xi_probe);
    json j;
    j["slope"] = d.slope;
    j["stderr"] = d.std_error;
    j["orbital"] = d.orbital;
    j["xi"] = d.xi;
    j["n_points"] = d.n_points;
    return j;
  } catch (const std::exception& e) {
    return json{{"error", e.what()}};
  }
}

struct Analysis {
  std::vector<std::size_t> main_index;  // snapshot indices of the geometric times
  std::vector<ProfileSnapshot> profiles;
};

Analysis index_snapshots(const RunConfig& cfg, const Trajectory& traj) {
  Analysis a;
  for (double t : cfg.integrator.snapshot_times()) a.main_index.push_back(index_of(traj, t));
  a.profiles.resize(traj.snapshots.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) a.profiles[i] = profile(traj.snapshots[i]);
  return a;
}

json cauchy_section(const RunConfig& cfg, const Trajectory& traj, const Analysis& a) {
  json rows = json::array();
  std::vector<std::pair<double, double>> d_inf, d_theta0, d_0theta;
  for (std::size_t i : a.main_index) {
    const double t = traj.snapshots[i].time();
    if (!traj.has(2.0 * t)) continue;
    const CauchyDistance d = scattering_cauchy(a.profiles[i], a.profiles[index_of(traj, 2.0 * t)], cfg.fit);
    rows.push_back({{"t", t}, {"d_inf", d.d_inf}, {"d_theta0", d.d_theta0}, {"d_0theta", d.d_0theta}});
    d_inf.emplace_back(t, d.d_inf);
    d_theta0.emplace_back(t, d.d_theta0);
    d_0theta.emplace_back(t, d.d_0theta);
  }
  // Both ends of every pair inside the fit window.
  const double lo = cfg.fit.t_lo, hi = 0.5 * cfg.fit.t_hi;
  json j;
  j["pairs"] = rows;
  j["d_inf_exponent"] = try_fit(d_inf, lo, hi);
  j["d_theta0_exponent"] = try_fit(d_theta0, lo, hi);
  j["d_0theta_exponent"] = try_fit(d_0theta, lo, hi);
  return j;
}

}  // namespace

json fit_json(const FitResult& f) {
  json j;
  j["exponent"] = f.exponent;
  j["stderr"] = f.std_error;
  j["window"] = {f.t_lo, f.t_hi};
  j["n_points"] = f.n_points;
  return j;
}

std::filesystem::path output_root() {
  const char* env = std::getenv(output_root_env);
  return (env && *env) ? std::filesystem::path(env) : std::filesystem::path("runs");
}

std::filesystem::path run_directory(const RunConfig& cfg) {
  const std::filesystem::path p(cfg.output);
  return p.is_absolute() ? p : output_root() / p;
}

RunOutput simulate(const RunConfig& cfg) {
  RunOutput run;
  run.config = cfg;
  const GridPtr grid = Grid::make(cfg.grid.n, cfg.grid.L);
  const OrbitalEnsemble initial = prepare_initial(cfg.packets, grid, cfg.integrator.t_start);
  run.trajectory = evolve(cfg.integrator_with_probes(), initial, cfg.potential, cfg.mode);
  Trajectory& traj = run.trajectory;
  traj.config_hash = config_hash(cfg);

  const Analysis a = index_snapshots(cfg, traj);
  const Eigen::MatrixXcd g0 = traj.snapshots.front().gram();
  run.records.resize(a.main_index.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < a.main_index.size(); ++i) {
    run.records[i] = diagnostics_record(traj.snapshots[a.main_index[i]], g0);
  }

  json& rep = run.report;
  rep["header"] = artifact_header(cfg);
  rep["name"] = cfg.name;
  rep["mode"] = to_string(cfg.mode);
  rep["window"] = {cfg.fit.t_lo, cfg.fit.t_hi};

  std::vector<std::pair<double, double>> sup;
  double mass_drift = 0.0, gram_drift = 0.0;
  const double m0 = run.records.front().l2_mass;
  for (const auto& r : run.records) {
    sup.emplace_back(r.t, r.sup_norm);
    if (m0 > 0.0) mass_drift = std::max(mass_drift, std::abs(r.l2_mass - m0) / m0);
    gram_drift = std::max(gram_drift, r.gram_drift);
  }
  rep["sup_decay_exponent"] = try_fit(sup, cfg.fit.t_lo, cfg.fit.t_hi);
  rep["mass_drift"] = mass_drift;
  rep["gram_drift"] = gram_drift;

  const XtNorm xt = xt_norm(run.records, cfg.fit);
  rep["xt_norm"] = {{"sup_weighted", xt.sup_weighted}, {"h10_weighted", xt.h10_weighted},
                    {"h01_weighted", xt.h01_weighted}, {"l2", xt.l2},
                    {"combined", xt.combined()}};

  const json cauchy = cauchy_section(cfg, traj, a);
  rep["cauchy"] = cauchy["pairs"];
  rep["cauchy_exponent"] = cauchy["d_inf_exponent"];
  rep["cauchy_theta0_exponent"] = cauchy["d_theta0_exponent"];
  rep["cauchy_0theta_exponent"] = cauchy["d_0theta_exponent"];

  json s1 = json::array();
  std::vector<std::pair<double, double>> s1_series;
  if (traj.snapshots.size() >= 4) {
    const OperatorScattering op = operator_scattering(traj);
    const double anchor = traj.snapshots.back().time();
    for (std::size_t i : a.main_index) {
      const double t = traj.snapshots[i].time();
      if (t >= anchor) continue;
      const double d = op.distances[i].second;
      s1.push_back({{"t", t}, {"distance", d}});
      s1_series.emplace_back(t, d);
    }
  }
  rep["s1_distances"] = s1;
  rep["s1_exponent"] = try_fit(s1_series, cfg.fit.t_lo, cfg.fit.t_hi);

  std::vector<ProfileSnapshot> window_profiles;
  for (std::size_t i : a.main_index) {
    if (in_window(traj.snapshots[i].time(), cfg.fit.t_lo, cfg.fit.t_hi)) window_profiles.push_back(a.profiles[i]);
  }
  rep["phase_drift"] = phase_json(window_profiles, cfg.probes.xi_probe);

  json rem = json::array();
  std::vector<std::pair<double, double>> rem_series;
  for (double s : cfg.probes.remainder_times) {
    const double h = cfg.probes.remainder_rel_h;
    const RemainderField r = remainder_fd(a.profiles[index_of(traj, s * (1.0 - h))], a.profiles[index_of(traj, s * (1.0 + h))]);
    rem.push_back({{"s", s}, {"sup", r.sup_norm()}});
    rem_series.emplace_back(s, r.sup_norm());
  }
  rep["remainder"] = rem;
  if (!rem_series.empty()) {
    rep["remainder_exponent"] = try_fit(rem_series, rem_series.front().first, rem_series.back().first);
  } else {
    rep["remainder_exponent"] = nullptr;
  }
  rep["warnings"] = traj.warnings;
  return run;
}

void write_run(const RunOutput& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const json header = artifact_header(run.config);
  write_checkpoint(dir / "checkpoint.hfsc", header, run.trajectory.snapshots);
  write_diagnostics_ndjson(dir / "diagnostics.ndjson", header, run.records);
  write_diagnostics_csv(dir / "diagnostics.csv", header, run.records);
  write_json(dir / "report.json", run.report);
}

json compare_report(const RunConfig& cfg, const RunOutput& first, const RunOutput& second) {
  json rep;
  rep["header"] = artifact_header(cfg);
  json warnings = json::array();
  auto side = [](const RunOutput& r) {
    json j;
    j["mode"] = r.report["mode"];
    j["phase_drift"] = r.report["phase_drift"];
    j["cauchy"] = r.report["cauchy"];
    j["cauchy_exponent"] = r.report["cauchy_exponent"];
    j["sup_decay_exponent"] = r.report["sup_decay_exponent"];
    return j;
  };
  rep["first"] = side(first);
  rep["second"] = side(second);

  json ratio = nullptr;
  const json& pa = first.report["phase_drift"];
  const json& pb = second.report["phase_drift"];
  if (first.config.mode == second.config.mode) {
    warnings.push_back("degenerate comparison: both runs use mode " + to_string(first.config.mode));
  } else if (pa.contains("error") || pb.contains("error")) {
    warnings.push_back("phase drift unavailable for at least one run");
  } else {
    const double sa = std::abs(pa["slope"].get<double>());
    const double sb = std::abs(pb["slope"].get<double>());
    const double eb = pb["stderr"].get<double>();
    // A slope lost in roundoff or in its own fit error makes the ratio noise.
    if (sb > 1e-12 && sb > 2.0 * eb && std::isfinite(sa / sb)) {
      ratio = sa / sb;
    } else {
      warnings.push_back("second run has no significant phase drift; ratio undefined");
    }
  }
  rep["slope_ratio"] = ratio;
  for (const auto& w : first.trajectory.warnings) warnings.push_back(to_string(first.config.mode) + ": " + w);
  for (const auto& w : second.trajectory.warnings) warnings.push_back(to_string(second.config.mode) + ": " + w);
  rep["warnings"] = warnings;
  return rep;
}

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << error_json("config", e.what(), e.field()).dump() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    err << error_json("numerical_abort", e.what()).dump() << '\n';
    return exit_numerical;
  }
}

}  // namespace

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config_path);
    const RunOutput run = simulate(cfg);
    const auto dir = run_directory(cfg);
    write_run(run, dir);
    json summary;
    summary["run_dir"] = dir.string();
    summary["config_hash"] = run.report["header"]["config_hash"];
    summary["sup_decay_exponent"] = run.report["sup_decay_exponent"];
    summary["mass_drift"] = run.report["mass_drift"];
    summary["warnings"] = run.report["warnings"];
    out << summary.dump() << '\n';
    return static_cast<int>(exit_ok);
  });
}

int cmd_compare(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config_path);
    RunConfig a = cfg, b = cfg;
    a.mode = cfg.compare.first;
    b.mode = cfg.compare.second;
    const auto dir = run_directory(cfg);
    const RunOutput ra = simulate(a);
    write_run(ra, dir / to_string(a.mode));
    const RunOutput rb = simulate(b);
    write_run(rb, dir / (b.mode == a.mode ? to_string(b.mode) + "-2" : to_string(b.mode)));
    const json rep = compare_report(cfg, ra, rb);
    write_json(dir / "compare.json", rep);
    out << json{{"run_dir", dir.string()}, {"slope_ratio", rep["slope_ratio"]}, {"warnings", rep["warnings"]}}.dump()
        << '\n';
    return static_cast<int>(exit_ok);
  });
}

namespace {

std::pair<double, double> parse_window(const std::string& w) {
  const auto colon = w.find(':');
  if (colon == std::string::npos) throw ConfigError("window", "expected t_lo:t_hi");
  try {
    std::size_t used = 0;
    const double lo = std::stod(w.substr(0, colon), &used);
    const std::string hs = w.substr(colon + 1);
    std::size_t used_hi = 0;
    const double hi = std::stod(hs, &used_hi);
    if (used != colon || used_hi != hs.size() || !(hi >= lo)) throw std::invalid_argument("window");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ConfigError("window", "expected t_lo:t_hi with t_lo <= t_hi, got '" + w + "'");
  }
}

std::vector<std::pair<double, double>> series_from_run(const std::filesystem::path& dir, const std::string& q) {
  std::vector<std::pair<double, double>> series;
  const auto ndjson = dir / "diagnostics.ndjson";
  if (!std::filesystem::exists(ndjson)) throw ConfigError("run_dir", "no diagnostics.ndjson in " + dir.string());
  const auto lines = read_ndjson(ndjson);
  if (!lines.empty() && lines.front().contains("header") && lines.size() > 1 && lines[1].contains(q)) {
    for (std::size_t i = 1; i < lines.size(); ++i) series.emplace_back(lines[i]["t"].get<double>(), lines[i][q].get<double>());
    return series;
  }
  // Series stored in the report.
  const auto report_path = dir / "report.json";
  if (!std::filesystem::exists(report_path)) throw ConfigError("quantity", "unknown quantity '" + q + "'");
  const json rep = read_json(report_path);
  auto pull = [&](const char* key, const char* tkey, const char* vkey) {
    for (const auto& row : rep.at(key)) series.emplace_back(row[tkey].get<double>(), row[vkey].get<double>());
  };
  if (q == "d_inf" || q == "d_theta0" || q == "d_0theta") {
    pull("cauchy", "t", q.c_str());
  } else if (q == "s1_distance") {
    pull("s1_distances", "t", "distance");
  } else if (q == "remainder_sup") {
    pull("remainder", "s", "sup");
  } else {
    throw ConfigError("quantity", "unknown quantity '" + q + "'");
  }
  return series;
}

}  // namespace

int cmd_fit(const std::filesystem::path& run_dir, const std::string& quantity, const std::string& window,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto [lo, hi] = parse_window(window);
    const auto series = series_from_run(run_dir, quantity);
    FitResult f;
    try {
      f = decay_fit(series, lo, hi);
    } catch (const std::exception& e) {
      throw ConfigError("window", e.what());
    }
    json j;
    j["quantity"] = quantity;
    j["exponent"] = f.exponent;
    j["stderr"] = f.std_error;
    j["window"] = {lo, hi};
    j["n_points"] = f.n_points;
    out << j.dump() << '\n';
    return exit_ok;
  });
}

json to_json(const CheckResult& c) {
  json j;
  j["check"] = c.name;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["tolerance"] = c.tolerance;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

int cmd_verify(VerifyLevel level, Fault fault, std::ostream& out, std::ostream& err) {
  const auto checks = verify_checks(level, fault);
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    out << to_json(c).dump() << '\n';
    if (!c.passed) failed.push_back(c.name);
  }
  if (!failed.empty()) {
    err << json{{"error", "verify_failed"}, {"failed", failed}}.dump() << '\n';
    return exit_check_failed;
  }
  return exit_ok;
}

}  // namespace hfscat
