#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "rdlab/nonlinearity.hpp"
#include "rdlab/wave.hpp"

namespace rdlab {

// Which evolution the time stepper integrates:
//   RDE: u_t = u_xx + f(u)
//   RCL: u_t + (A(u))_x = u_xx + u - A(u)
enum class Equation { RDE, RCL };

std::string equation_name(Equation eq);

// One spatial field on a uniform moving window. Node i sits at lab position
// frame_offset + i*dx; the window is shifted by whole cells as the front
// advances, so lab positions of nodes always stay on the same global lattice.
struct FieldState {
  Equation equation = Equation::RDE;
  double t = 0.0;
  double frame_offset = 0.0;  // lab-frame position of node 0
  double dx = 0.05;
  std::vector<double> u;

  std::size_t size() const { return u.size(); }
  double x_lab(std::size_t i) const {
    return frame_offset + static_cast<double>(i) * dx;
  }
};

// Window extent around the initial front position: [x_front - left,
// x_front + right]. The asymmetry leaves room for the tail probes ahead of
// the front; `right` must be at least 40.
struct WindowSpec {
  double left = 60.0;
  double right = 120.0;
};

// Initial data recipes.
struct InitialSpec {
  enum class Kind {
    SharpStep,   // u = 1 for x < x0, 0 for x >= x0
    SteepStep,   // step smoothed over `width` by a compressed minimal wave
    ScaledWave,  // U_*(gamma (x - a)) for x <= 0, 0 for x > 0
    ExactWave,   // traveling wave sampled on the grid (front at x = 0)
  };
  Kind kind = Kind::SteepStep;
  double x0 = 0.0;     // step location (SharpStep / SteepStep)
  double width = 5.0;  // smoothing width (SteepStep)
  double gamma = 1.2;  // compression factor (ScaledWave), must be > 1
  double a = 2.0;      // wave shift (ScaledWave)
};

struct RunConfig {
  Equation equation = Equation::RDE;
  double dx = 0.05;
  double cfl = 0.2;  // dt = cfl * dx^2
  WindowSpec window;
  InitialSpec init;
  double t_end = 0.0;
  // Times at which full field snapshots are kept. Every entry (and t_end)
  // must be an exact multiple of dt up to rounding; otherwise run() refuses.
  std::vector<double> snapshot_times;
  double front_sample_dt = 0.5;  // spacing of front-position samples
  double front_level = 0.5;      // u-level tracked (also used to recenter)
  bool use_omp = true;
};

struct RunStats {
  long long steps = 0;
  long long recenters = 0;
  double wall_seconds = 0.0;
};

struct Trajectory {
  std::vector<FieldState> snapshots;
  std::vector<double> trace_t;  // front-position sample times
  std::vector<double> trace_m;  // lab-frame front positions at those times
  RunStats stats;
};

// --- initial data -----------------------------------------------------------

// Sharp or smoothed step. width == 0 gives the indicator of {x < x0};
// width > 0 replaces the jump on [x0-width, x0] by this model's own minimal
// traveling wave compressed by a factor 2 (steeper than any admissible
// decay), truncated to 1 on the left of the band and 0 on the right.
// Throws ConfigError if x0 (with its smoothing band) does not fit in the
// window interior.
FieldState make_initial_step(const NonlinearityModel& model, double x0,
                             double width, Equation eq, double dx,
                             const WindowSpec& window);

// Compressed minimal wave with the jump at x = 0:
//   u(x) = U_*(gamma (x - a)) for x <= 0, and 0 for x > 0.
// Requires gamma > 1 so the data sits strictly below the wave it is compared
// against. ConfigError otherwise.
FieldState make_initial_scaled_wave(const NonlinearityModel& model,
                                    double gamma, double a, Equation eq,
                                    double dx, const WindowSpec& window);

// Samples an already-integrated traveling wave on the grid (no truncation
// beyond the wave's own stored extent).
FieldState make_initial_from_wave(const TravelingWave& wave, Equation eq,
                                  double dx, const WindowSpec& window);

FieldState make_initial_state(const NonlinearityModel& model,
                              const InitialSpec& init, Equation eq, double dx,
                              const WindowSpec& window);

// --- stepping ---------------------------------------------------------------

// One Heun (explicit trapezoid) step with pinned Dirichlet values u=1 / u=0.
// The update is a convex combination of forward-Euler substeps, so under the
// default time step the values stay inside [0,1] except for rounding; any
// excursion beyond 1e-12 aborts with NumericError, smaller ones are clamped.
// When `window` is given, the window is re-centered by whole cells whenever
// the `level` crossing drifts more than one cell from the design center.
// Convenience wrapper (allocates work arrays per call); the hot path in
// run() reuses buffers internally.
void step(FieldState& state, const NonlinearityModel& model, double dt,
          const WindowSpec* window = nullptr, double level = 0.5,
          bool use_omp = false);

// Shift the window by whole cells so the `level` crossing sits within one
// cell of the design center (window.left from the left edge). Vacated nodes
// are filled with the Dirichlet values. Returns the applied cell shift
// (positive = window moved right).
long long recenter(FieldState& state, const WindowSpec& window, double level);

// Lab-frame position where u crosses `level` (linear interpolation between
// the bracketing nodes; u is scanned for u_i >= level > u_{i+1}).
// NumericError if the level is not bracketed.
double locate_level_crossing(const FieldState& state, double level);

// True if the window still comfortably contains the transition layer:
// u >= 1 - 1e-6 at the first interior node and u <= 1e-10 at the last one.
bool window_healthy(const FieldState& state);

// Full time integration: builds the initial state, advances to t_end with
// dt = cfl*dx^2, recenters the window by whole cells whenever the tracked
// level crossing drifts more than one cell from the window's design center,
// records snapshots at the requested times and front positions every
// front_sample_dt. Deterministic: reruns produce identical bytes.
Trajectory run(const RunConfig& config, const NonlinearityModel& model);

// Same integration loop, but starting from a caller-built state (its
// equation, dx, and size must match the config; t must be 0). Lets callers
// adjust the sampled data before the run — e.g. cell-average values at a
// jump — or start from states no InitialSpec produces.
Trajectory run_from(const RunConfig& config, const NonlinearityModel& model,
                    FieldState state);

// Expands each time in `times` into the triple {t-offset, t, t+offset}
// (clipped at 0), sorted and deduplicated — convenient for the diagnostics
// that need centered differences in time.
std::vector<double> with_time_triples(const std::vector<double>& times,
                                      double offset);

}  // namespace rdlab
