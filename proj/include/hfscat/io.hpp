#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfscat/diagnostics.hpp"
#include "hfscat/ensemble.hpp"

namespace hfscat {

inline constexpr std::uint32_t checkpoint_version = 1;

/// Binary trajectory file, little-endian:
///   "HFSC" | u32 version | u32 header length | header JSON bytes |
///   per snapshot: f64 t | u32 K | K x f64 weight | K x n x (f64 re, f64 im)
/// The grid size n is read from the header's grid.n.
void write_checkpoint(const std::filesystem::path& path, const nlohmann::ordered_json& header,
                      const std::vector<OrbitalEnsemble>& snapshots);

struct Checkpoint {
  nlohmann::ordered_json header;
  std::vector<OrbitalEnsemble> snapshots;
};

/// Throws std::runtime_error on a bad magic, version or truncated file.
Checkpoint read_checkpoint(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const DiagnosticsRecord& r);

/// First line {"header": ...}, then one record per line.
void write_diagnostics_ndjson(const std::filesystem::path& path, const nlohmann::ordered_json& header,
                              const std::vector<DiagnosticsRecord>& records);
/// Header as "# key: value" comment lines, then a CSV table of the same records.
void write_diagnostics_csv(const std::filesystem::path& path, const nlohmann::ordered_json& header,
                           const std::vector<DiagnosticsRecord>& records);
std::vector<nlohmann::ordered_json> read_ndjson(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

/// Shortest round-trip decimal form, used for CSV cells.
std::string format_double(double v);

}  // namespace hfscat
