#pragma once
// Front-position extraction and asymptotics: level-crossing locations,
// logarithmic-correction fits m(t) ~ c t - r log t + x0, tail-amplitude
// probes ahead of the front, shape-convergence distances against a
// traveling wave, and delay curves m(t) - c t.

#include <cstddef>
#include <vector>

#include "rdlab/nonlinearity.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/wave.hpp"

namespace rdlab {

// Which level crossing defines "the front position". Both options reduce to
// a target value of u itself: alpha_level resolves alpha(u) = a through the
// model's alpha inverse once, at construction time.
struct LevelSpec {
  double u_target = 0.5;

  static LevelSpec u_level(double u);
  static LevelSpec alpha_level(const NonlinearityModel& model, double a);
};

// Lab-frame position where the state crosses the level, by linear
// interpolation between the bracketing nodes (O(dx^2) in a smooth front).
// The state must be monotone through the level: exactly one downcrossing.
// Throws NumericError if the level is not attained or is crossed more than
// once.
double locate_front(const FieldState& state, LevelSpec level);

// Derivative of `values` with respect to `times` by local quadratic
// regression over a centered window of up to 21 samples. The window shrinks
// symmetrically near the ends; the first and last samples fall back to
// one-sided differences. Times must be strictly increasing (any spacing).
std::vector<double> smoothed_rate(const std::vector<double>& times,
                                  const std::vector<double>& values);

// Front positions over time plus the smoothed speed estimate.
struct FrontTrace {
  std::vector<double> times;
  std::vector<double> m;     // lab-frame positions of the level crossing
  std::vector<double> mdot;  // smoothed_rate(times, m)
  LevelSpec level;
};

// Trace built by locating `level` in every stored snapshot.
FrontTrace front_trace(const Trajectory& traj, LevelSpec level);

// Trace adopting the solver's own dense front samples (recorded every
// front_sample_dt at the run's front_level, a u-level).
FrontTrace builtin_front_trace(const Trajectory& traj, double front_level);

struct AsymptoticEstimate {
  double c_fit = 0.0;
  double r_fit = 0.0;  // m(t) ~ c_fit * t - r_fit * log t + x0_fit
  double x0_fit = 0.0;
  double tail_amplitude;  // NaN unless the caller fills it from a probe
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual_norm = 0.0;  // RMS of mdot - (c - r/t) over the window
  std::size_t n_samples = 0;

  AsymptoticEstimate();
};

// Least-squares fit of mdot(t) = c - r/t over trace samples with
// window_lo <= t <= window_hi, then x0 as the mean of m - c t + r log t over
// the window's upper half. The window must lie inside the trace, span at
// least one dyadic octave (window_hi >= 2 * window_lo), and start past the
// initial transient (t >= 50 is a sound default). Deterministic: the same
// trace and window reproduce the estimate bit for bit.
AsymptoticEstimate fit_log_correction(const FrontTrace& trace,
                                      double window_lo, double window_hi);

// Tail amplitude ahead of the front: with m the state's own level crossing
// and s = t^gamma, returns e^s u(t, m + s) for a pushmi-pullyu model and
// e^s u(t, m + s) / s for a pulled (FKPP or semi-FKPP) one; pushed models
// are rejected.
// The probe value is interpolated log-linearly, matching the exponential
// tail. gamma must lie in (0, 1/2); a sweep over t exposes the limit.
// Throws NumericError if the probe point leaves the window.
double tail_amplitude(const FieldState& state, double gamma,
                      const RegimeClassification& regime, LevelSpec level);

// Translate a stabilized tail amplitude into the front's asymptotic shift
// using the wave's decay data: amplitude = B e^{-shift} for a
// pushmi-pullyu (pure-exponential) tail and amplitude = D e^{-shift} for a
// semi-FKPP (linear-prefactor) tail. A numerical estimate only.
double tail_shift_estimate(double amplitude, const DecayFit& decay,
                           const RegimeClassification& regime);

struct ShapeDistance {
  double shift = 0.0;     // state half-level minus wave half-level
  double distance = 0.0;  // sup |u(x + shift) - U(x)| over the overlap
  std::size_t n_points = 0;
};

// Sup-norm distance between the state and the wave after matching their
// u = 1/2 levels. The state is sampled at its own nodes; the wave is
// evaluated through its interpolant. Throws NumericError when the shifted
// windows do not overlap.
ShapeDistance shape_convergence(const FieldState& state,
                                const TravelingWave& wave);

// The delay series m(t) - c t, aligned with trace.times.
std::vector<double> delay_curve(const FrontTrace& trace, double c);

}  // namespace rdlab
