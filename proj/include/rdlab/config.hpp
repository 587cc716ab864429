#pragma once
// Experiment configuration: plain structs the CLI binds its options to,
// conversions into solver/nonlinearity types, canonical JSON echoes (for
// manifests and config hashing), and the JSON -> TOML bridge that lets
// --config accept either format with identical semantics.

#include <cstdint>
#include <string>
#include <vector>

#include "rdlab/nonlinearity.hpp"
#include "rdlab/solver.hpp"

namespace rdlab {

struct ModelConfig {
  int n = 2;
  double chi = 1.0;
  double lambda = 1.0;
};

// Shared by simulate, diagnose, and sweep.
struct SimConfig {
  ModelConfig model;
  std::string equation = "rde";  // rde | rcl
  double dx = 0.05;
  double cfl = 0.2;  // dt = cfl * dx^2
  double window_left = 60.0;
  double window_right = 120.0;
  // sharp-step | steep-step | scaled-wave | exact-wave
  std::string init = "steep-step";
  double init_x0 = 0.0;
  double init_width = 5.0;
  double init_gamma = 1.2;
  double init_a = 2.0;
  double t_end = 2000.0;
  std::vector<double> snapshot_times = {250.0, 500.0, 1000.0, 2000.0};
  double front_sample_dt = 0.5;
  double front_level = 0.5;
};

struct SpeedConfig {
  int n = 2;
  double lambda = 1.0;
  std::vector<double> chis = {0.0, 0.5, 1.0, 4.0};
};

struct WaveConfig {
  ModelConfig model;
  double c = 0.0;  // 0 selects the model's minimal-speed prediction
  double left = -20.0;
  double right = 40.0;
  double dx = 0.01;
};

struct FrontFitConfig {
  std::string traj;  // directory holding a simulate run's front_trace.csv
  double window_lo = 250.0;
  double window_hi = 2000.0;
};

struct VotingConfig {
  int n = 2;
  double gamma = 1.0;
  double beta = 1.0;
  double t = 1.0;
  std::vector<double> xs = {-2.0, -1.0, 0.0, 1.0, 2.0};
  std::uint64_t n_paths = 100000;
  double g_step_x0 = 0.0;  // leaves vote 1 iff position <= this threshold
  bool compare = true;     // also solve the PDE and report z-scores
  double pde_dx = 0.02;
};

struct SweepConfig {
  SimConfig base;
  std::vector<double> chis = {0.5, 1.0};
  double fit_lo = 250.0;
  double fit_hi = 2000.0;
};

// Execution context from the top-level flags; out/workers never affect
// artifact contents, and seed only matters to Monte Carlo commands.
struct CliContext {
  std::string out = ".";
  std::uint64_t seed = 0;
  int workers = 1;
};

// --- conversions -------------------------------------------------------------
NonlinearityModel build_model(const ModelConfig& m);
Equation parse_equation(const std::string& name);
InitialSpec parse_initial(const SimConfig& cfg);
RunConfig to_run_config(const SimConfig& cfg);

// --- canonical echoes ----------------------------------------------------------
// echo: full effective configuration (including out/workers/seed) as
// canonical JSON text. hash_source: the physics-relevant subset whose FNV
// hash identifies the experiment; seed is included only where it changes
// results (voting).
struct ConfigEcho {
  std::string echo;
  std::string hash_source;
};
ConfigEcho echo_config(const SpeedConfig& cfg, const CliContext& ctx);
ConfigEcho echo_config(const WaveConfig& cfg, const CliContext& ctx);
ConfigEcho echo_config(const SimConfig& cfg, const CliContext& ctx,
                       const std::string& subcommand);
ConfigEcho echo_config(const FrontFitConfig& cfg, const CliContext& ctx);
ConfigEcho echo_config(const VotingConfig& cfg, const CliContext& ctx);
ConfigEcho echo_config(const SweepConfig& cfg, const CliContext& ctx);

std::string config_hash(const std::string& hash_source);  // "fnv64:<hex>"

// --- JSON mirror ---------------------------------------------------------------
// Translate a JSON config document ({"section": {key: value|[...]}, ...},
// top-level scalars allowed) into TOML text understood by the CLI's config
// parser. Throws ConfigError on structures with no TOML counterpart.
std::string json_config_to_toml(const std::string& json_text);

}  // namespace rdlab
