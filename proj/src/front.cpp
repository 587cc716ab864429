#include "rdlab/front.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Position of the unique downcrossing of `target` in `y`, linearly
// interpolated; abscissa of node i is x0 + i * h. Throws NumericError when
// the level is missed or crossed more than once.
double downcrossing(const std::vector<double>& y, double x0, double h,
                    double target, const char* what) {
  const std::size_t n = y.size();
  if (n < 2) throw NumericError(std::string(what) + ": fewer than two nodes");
  std::size_t down = 0, up = 0, cell = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = y[i] - target, b = y[i + 1] - target;
    if (a >= 0.0 && b < 0.0) {
      ++down;
      cell = i;
    } else if (a < 0.0 && b >= 0.0) {
      ++up;
    }
  }
  if (down == 0)
    throw NumericError(std::string(what) + ": level not attained");
  if (down > 1 || up > 0)
    throw NumericError(std::string(what) +
                       ": state is not monotone through the level");
  const double a = y[cell] - target, b = y[cell + 1] - target;
  return x0 + (static_cast<double>(cell) + a / (a - b)) * h;
}

// Quadratic least-squares fit over values[lo..hi] centered on index j;
// returns the fitted derivative at times[j]. Falls back to the exact
// parabola for three points and is exact for quadratic data.
double quadratic_slope(const std::vector<double>& t,
                       const std::vector<double>& v, std::size_t lo,
                       std::size_t hi, std::size_t j) {
  double scale = 0.0;
  for (std::size_t k = lo; k <= hi; ++k)
    scale = std::max(scale, std::abs(t[k] - t[j]));
  if (scale == 0.0)
    throw ConfigError("smoothed_rate: times must be strictly increasing");
  double m0 = 0, m1 = 0, m2 = 0, m3 = 0, m4 = 0, r0 = 0, r1 = 0, r2 = 0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const double z = (t[k] - t[j]) / scale;
    const double z2 = z * z;
    m0 += 1.0;
    m1 += z;
    m2 += z2;
    m3 += z2 * z;
    m4 += z2 * z2;
    r0 += v[k];
    r1 += z * v[k];
    r2 += z2 * v[k];
  }
  // Solve the symmetric 3x3 normal equations for (a, b, c) in
  // v ~ a + b z + c z^2 by Cramer's rule; the slope at z = 0 is b / scale.
  const double det = m0 * (m2 * m4 - m3 * m3) - m1 * (m1 * m4 - m2 * m3) +
                     m2 * (m1 * m3 - m2 * m2);
  if (det == 0.0)
    throw ConfigError("smoothed_rate: degenerate regression window");
  const double det_b = m0 * (r1 * m4 - r2 * m3) - r0 * (m1 * m4 - m2 * m3) +
                       m2 * (m1 * r2 - m2 * r1);
  return det_b / det / scale;
}

}  // namespace

LevelSpec LevelSpec::u_level(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw ConfigError("LevelSpec: u-level must lie in (0, 1)");
  return LevelSpec{u};
}

LevelSpec LevelSpec::alpha_level(const NonlinearityModel& model, double a) {
  if (!(a > 0.0 && a < 1.0))
    throw ConfigError("LevelSpec: alpha-level must lie in (0, 1)");
  return LevelSpec{alpha_inverse(model, a)};
}

double locate_front(const FieldState& state, LevelSpec level) {
  return downcrossing(state.u, state.frame_offset, state.dx, level.u_target,
                      "locate_front");
}

std::vector<double> smoothed_rate(const std::vector<double>& times,
                                  const std::vector<double>& values) {
  const std::size_t n = times.size();
  if (values.size() != n)
    throw ConfigError("smoothed_rate: times/values size mismatch");
  if (n < 2) throw ConfigError("smoothed_rate: need at least two samples");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(times[i + 1] > times[i]))
      throw ConfigError("smoothed_rate: times must be strictly increasing");

  std::vector<double> rate(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t hw = std::min<std::size_t>({10, j, n - 1 - j});
    if (hw == 0) {
      const std::size_t a = (j == 0) ? 0 : n - 2;
      rate[j] = (values[a + 1] - values[a]) / (times[a + 1] - times[a]);
    } else {
      rate[j] = quadratic_slope(times, values, j - hw, j + hw, j);
    }
  }
  return rate;
}

FrontTrace front_trace(const Trajectory& traj, LevelSpec level) {
  if (traj.snapshots.empty())
    throw ConfigError("front_trace: trajectory holds no snapshots");
  FrontTrace tr;
  tr.level = level;
  tr.times.reserve(traj.snapshots.size());
  tr.m.reserve(traj.snapshots.size());
  for (const FieldState& s : traj.snapshots) {
    tr.times.push_back(s.t);
    tr.m.push_back(locate_front(s, level));
  }
  tr.mdot = tr.times.size() >= 2
                ? smoothed_rate(tr.times, tr.m)
                : std::vector<double>(
                      1, std::numeric_limits<double>::quiet_NaN());
  return tr;
}

FrontTrace builtin_front_trace(const Trajectory& traj, double front_level) {
  if (traj.trace_t.empty())
    throw ConfigError("builtin_front_trace: trajectory holds no front samples");
  FrontTrace tr;
  tr.level = LevelSpec::u_level(front_level);
  tr.times = traj.trace_t;
  tr.m = traj.trace_m;
  tr.mdot = tr.times.size() >= 2
                ? smoothed_rate(tr.times, tr.m)
                : std::vector<double>(
                      1, std::numeric_limits<double>::quiet_NaN());
  return tr;
}

AsymptoticEstimate::AsymptoticEstimate()
    : tail_amplitude(std::numeric_limits<double>::quiet_NaN()) {}

AsymptoticEstimate fit_log_correction(const FrontTrace& trace,
                                      double window_lo, double window_hi) {
  if (trace.times.empty() || trace.mdot.size() != trace.times.size())
    throw ConfigError("fit_log_correction: trace lacks a speed series");
  if (!(window_lo > 0.0))
    throw ConfigError("fit_log_correction: window must start at t > 0");
  const double slack = 1e-9 * std::max(1.0, std::abs(window_hi));
  if (window_lo < trace.times.front() - slack ||
      window_hi > trace.times.back() + slack)
    throw ConfigError("fit_log_correction: window extends outside the trace");
  if (window_hi < 2.0 * window_lo - slack)
    throw ConfigError(
        "fit_log_correction: window spans less than one dyadic octave");

  // Least squares for mdot = c - r/t: unknowns (c, r), regressors (1, -1/t).
  double n = 0, s1 = 0, s2 = 0, b0 = 0, b1 = 0;
  const std::size_t count = trace.times.size();
  std::size_t first = count, last = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = trace.times[k];
    if (t < window_lo - slack || t > window_hi + slack) continue;
    first = std::min(first, k);
    last = k;
    const double q = 1.0 / t;
    n += 1.0;
    s1 += q;
    s2 += q * q;
    b0 += trace.mdot[k];
    b1 += trace.mdot[k] * q;
  }
  if (n < 5.0)
    throw ConfigError("fit_log_correction: fewer than five samples in window");
  const double det = n * s2 - s1 * s1;
  if (det <= 0.0)
    throw ConfigError("fit_log_correction: degenerate sample times");
  AsymptoticEstimate est;
  est.c_fit = (b0 * s2 - b1 * s1) / det;
  est.r_fit = (b0 * s1 - b1 * n) / det;
  est.window_lo = window_lo;
  est.window_hi = window_hi;
  est.n_samples = static_cast<std::size_t>(n);

  double rss = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double t = trace.times[k];
    if (t < window_lo - slack || t > window_hi + slack) continue;
    const double res = trace.mdot[k] - (est.c_fit - est.r_fit / t);
    rss += res * res;
  }
  est.residual_norm = std::sqrt(rss / n);

  const double mid = 0.5 * (window_lo + window_hi);
  double x0 = 0.0, nx = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double t = trace.times[k];
    if (t < mid - slack || t > window_hi + slack) continue;
    x0 += trace.m[k] - est.c_fit * t + est.r_fit * std::log(t);
    nx += 1.0;
  }
  est.x0_fit = nx > 0.0 ? x0 / nx : std::numeric_limits<double>::quiet_NaN();
  return est;
}

double tail_amplitude(const FieldState& state, double gamma,
                      const RegimeClassification& regime, LevelSpec level) {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw ConfigError("tail_amplitude: gamma must lie in (0, 1/2)");
  const bool pulled = regime.regime == Regime::SemiFKPP ||
                      regime.regime == Regime::FKPP;
  if (!pulled && regime.regime != Regime::PushmiPullyu)
    throw ConfigError(
        "tail_amplitude: defined for pulled and pushmi-pullyu models only");
  if (!(state.t > 0.0))
    throw ConfigError("tail_amplitude: state must be at positive time");

  const double s = std::pow(state.t, gamma);
  const double m = locate_front(state, level);
  const double pos = (m + s - state.frame_offset) / state.dx;
  const double idx = std::floor(pos);
  if (!(idx >= 0.0) || idx + 1.0 > static_cast<double>(state.u.size() - 1))
    throw NumericError("tail_amplitude: probe point outside the window");
  const std::size_t i = static_cast<std::size_t>(idx);
  const double theta = pos - idx;
  const double ua = state.u[i], ub = state.u[i + 1];

  double log_u;
  if (ua > 0.0 && ub > 0.0) {
    log_u = (1.0 - theta) * std::log(ua) + theta * std::log(ub);
  } else {
    const double lin = (1.0 - theta) * ua + theta * ub;
    if (lin <= 0.0) return 0.0;
    log_u = std::log(lin);
  }
  const double log_norm = pulled ? gamma * std::log(state.t) : 0.0;
  return std::exp(s + log_u - log_norm);
}

double tail_shift_estimate(double amplitude, const DecayFit& decay,
                           const RegimeClassification& regime) {
  if (!(amplitude > 0.0))
    throw ConfigError("tail_shift_estimate: amplitude must be positive");
  if (regime.regime == Regime::PushmiPullyu) {
    if (!(decay.B > 0.0))
      throw ConfigError(
          "tail_shift_estimate: wave tail lacks a pure-exponential amplitude");
    return std::log(decay.B / amplitude);
  }
  if (regime.regime == Regime::SemiFKPP || regime.regime == Regime::FKPP) {
    if (!(decay.D > 0.0))
      throw ConfigError(
          "tail_shift_estimate: wave tail lacks a linear-prefactor amplitude");
    return std::log(decay.D / amplitude);
  }
  throw ConfigError(
      "tail_shift_estimate: defined for pulled and pushmi-pullyu models only");
}

ShapeDistance shape_convergence(const FieldState& state,
                                const TravelingWave& wave) {
  const double m_state =
      downcrossing(state.u, state.frame_offset, state.dx, 0.5,
                   "shape_convergence (state)");
  const double m_wave = downcrossing(wave.U, wave.x_grid.front(), wave.dx(),
                                     0.5, "shape_convergence (wave)");
  ShapeDistance out;
  out.shift = m_state - m_wave;
  const double lo = wave.x_grid.front(), hi = wave.x_grid.back();
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    const double x = state.x_lab(i) - out.shift;
    if (x < lo || x > hi) continue;
    out.distance = std::max(out.distance,
                            std::abs(state.u[i] - wave.value_at(x)));
    ++out.n_points;
  }
  if (out.n_points == 0)
    throw NumericError("shape_convergence: shifted windows do not overlap");
  return out;
}

std::vector<double> delay_curve(const FrontTrace& trace, double c) {
  std::vector<double> d(trace.times.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = trace.m[k] - c * trace.times[k];
  return d;
}

}  // namespace rdlab
