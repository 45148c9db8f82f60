#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfscat/diagnostics.hpp"
#include "hfscat/integrator.hpp"
#include "hfscat/nonlinearity.hpp"
#include "hfscat/potential.hpp"

namespace hfscat {

inline constexpr const char* artifact_version = "0.1.0";

/// A rejected configuration; field() is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GridSpec {
  std::size_t n = 4096;
  double L = 1024.0;
};

struct ProbeConfig {
  double xi_probe = 0.0;
  /// Times s at which the remainder is measured from snapshots at s(1 -+ remainder_rel_h).
  std::vector<double> remainder_times;
  double remainder_rel_h = 0.05;
};

struct CompareConfig {
  RhsMode first = RhsMode::HartreeFock;
  RhsMode second = RhsMode::ReducedHartree;
};

struct RunConfig {
  std::string name = "run";
  GridSpec grid;
  Potential potential;
  RhsMode mode = RhsMode::HartreeFock;
  std::vector<WavePacket> packets;
  IntegratorConfig integrator;
  FitConfig fit;
  ProbeConfig probes;
  CompareConfig compare;
  std::uint64_t seed = 0;
  /// Run directory, relative to the output root unless absolute.
  std::string output;

  /// Snapshot times requested from the integrator, remainder stencils included.
  [[nodiscard]] IntegratorConfig integrator_with_probes() const;
};

RunConfig parse_config(const std::string& toml_text);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json potential_json(const Potential& w);
/// Everything that determines the numbers, in a fixed key order.
nlohmann::ordered_json canonical_json(const RunConfig& cfg);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
/// {config_hash, artifact_version, grid, potential}.
nlohmann::ordered_json artifact_header(const RunConfig& cfg);

}  // namespace hfscat
