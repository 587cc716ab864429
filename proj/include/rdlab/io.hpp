#pragma once
// Deterministic artifact I/O: CSV tables with fixed 17-significant-digit
// floats, FNV-1a content hashes, experiment manifests, and the trajectory /
// front-trace / diagnostics-ledger file formats shared by the CLI tools.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdlab/front.hpp"
#include "rdlab/solver.hpp"

namespace rdlab {

inline constexpr const char* kToolName = "rdlab";
inline constexpr const char* kToolVersion = "0.1.0";

// Shortest-faithful decimal: %.17g, locale-independent.
std::string format_g17(double v);

// Whole-file text IO (binary mode; ConfigError on failure).
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit over raw bytes; the file variant hashes the whole file.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);  // 16 lowercase hex digits

// Numeric CSV. write_csv emits header + rows with %.17g cells; read_csv
// parses it back (throws ConfigError on malformed input). Cells are doubles
// only; name-bearing tables (the ledger) have their own functions.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
CsvTable read_csv(const std::string& path);

// Long-format field snapshots: columns (t, x, u), one row per node per
// snapshot, plot-ready.
void write_snapshots_csv(const std::string& path, const Trajectory& traj);

// Front trace with its smoothed speed and the delay against a reference
// speed: columns (t, m, mdot, delay).
void write_front_trace_csv(const std::string& path, const FrontTrace& trace,
                           double c_reference);
FrontTrace read_front_trace_csv(const std::string& path);

// Diagnostics ledger rows: (t, name, value, tolerance, pass).
struct LedgerRow {
  double t = 0.0;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};
void write_ledger_csv(const std::string& path,
                      const std::vector<LedgerRow>& rows);
std::vector<LedgerRow> read_ledger_csv(const std::string& path);

// Experiment manifest: what ran, with which effective config, and which
// files it produced. CSV outputs replay byte-identically for a fixed
// config; wall_ms and the manifest itself are the only run-dependent parts.
struct ManifestOutput {
  std::string path;  // relative to the manifest's directory
  std::uint64_t bytes = 0;
  std::string fnv64;
};
struct ExperimentManifest {
  std::string subcommand;
  std::string config_hash;   // over the canonical config echo, physics only
  std::string config_echo;   // canonical JSON text of the effective config
  std::vector<ManifestOutput> outputs;
  double wall_ms = 0.0;
  long long steps = 0;
};
void write_manifest_json(const std::string& path,
                         const ExperimentManifest& manifest);
ExperimentManifest read_manifest_json(const std::string& path);

// Hash + size of an already-written artifact, path-relative bookkeeping for
// manifests.
ManifestOutput describe_output(const std::string& dir,
                               const std::string& relative_path);

}  // namespace rdlab
