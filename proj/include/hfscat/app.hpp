#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfscat/config.hpp"
#include "hfscat/diagnostics.hpp"
#include "hfscat/integrator.hpp"

namespace hfscat {

/// Exit codes shared by every subcommand.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_numerical = 3 };

/// Name of the environment variable holding the output root (default "runs").
inline constexpr const char* output_root_env = "HFSCAT_OUTPUT_ROOT";

std::filesystem::path output_root();
std::filesystem::path run_directory(const RunConfig& cfg);

struct RunOutput {
  RunConfig config;
  Trajectory trajectory;
  /// One record per geometric snapshot time (remainder stencil snapshots excluded).
  std::vector<DiagnosticsRecord> records;
  nlohmann::ordered_json report;
};

/// Integrates the configured run and evaluates every diagnostic; writes nothing.
/// Throws NumericalError if the evolution blows up.
RunOutput simulate(const RunConfig& cfg);

/// checkpoint.hfsc, diagnostics.ndjson, diagnostics.csv and report.json under dir.
void write_run(const RunOutput& run, const std::filesystem::path& dir);

/// Paired phase-drift and scattering summary of two runs of the same data.
nlohmann::ordered_json compare_report(const RunConfig& cfg, const RunOutput& first, const RunOutput& second);

nlohmann::ordered_json fit_json(const FitResult& f);

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_fit(const std::filesystem::path& run_dir, const std::string& quantity, const std::string& window,
            std::ostream& out, std::ostream& err);

enum class VerifyLevel { Fast, Full };
enum class Fault { None, ExchangeSign };

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Self-contained invariant suite on small grids. Fast covers cancellation,
/// identities and oracle equivalence; Full adds the integrator order, the
/// Duhamel residual and the remainder cross-check.
std::vector<CheckResult> verify_checks(VerifyLevel level, Fault fault = Fault::None);
nlohmann::ordered_json to_json(const CheckResult& c);

int cmd_verify(VerifyLevel level, Fault fault, std::ostream& out, std::ostream& err);

}  // namespace hfscat
