#include "rdlab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include "rdlab/errors.hpp"
#include "rdlab/solver_kernels.hpp"

namespace rdlab {

namespace {

constexpr double kExcursionTol = 1e-12;

struct ModelCache {
  const NonlinearityModel* model = nullptr;
  bool is_poly = false;
  std::vector<double> fc;  // f coefficients, lowest degree first
  std::vector<double> ac;  // A coefficients, lowest degree first

  explicit ModelCache(const NonlinearityModel& m) : model(&m) {
    is_poly = m.is_poly;
    if (is_poly) {
      fc = m.f_poly.coeffs();
      ac = m.A_poly.coeffs();
      if (fc.empty()) fc.push_back(0.0);
      if (ac.empty()) ac.push_back(0.0);
    }
  }
};

struct Workspace {
  std::vector<double> k1, k2, us, scratch;
  void resize(std::size_t n) {
    k1.resize(n);
    k2.resize(n);
    us.resize(n);
    scratch.resize(n);
  }
};

void rhs_generic(const double* u, double* scratch, double* out, int n,
                 double inv_dx2, double inv_dx, Equation eq,
                 const NonlinearityModel& m) {
  out[0] = 0.0;
  out[n - 1] = 0.0;
  if (eq == Equation::RDE) {
    for (int i = 1; i < n - 1; ++i) {
      const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
      out[i] = lap + m.f(u[i]);
    }
  } else {
    for (int i = 0; i < n; ++i) scratch[i] = m.A(u[i]);
    for (int i = 1; i < n - 1; ++i) {
      const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
      const double flux = (scratch[i] - scratch[i - 1]) * inv_dx;
      out[i] = lap - flux + (u[i] - scratch[i]);
    }
  }
}

void eval_rhs(const double* u, double* scratch, double* out, int n,
              const FieldState& state, const ModelCache& mc, bool omp) {
  const double inv_dx2 = 1.0 / (state.dx * state.dx);
  const double inv_dx = 1.0 / state.dx;
  if (!mc.is_poly) {
    rhs_generic(u, scratch, out, n, inv_dx2, inv_dx, state.equation, *mc.model);
    return;
  }
  if (state.equation == Equation::RDE) {
    if (omp) {
      kernels::rhs_rde_omp(u, out, n, inv_dx2, mc.fc.data(),
                           static_cast<int>(mc.fc.size()) - 1);
    } else {
      kernels::rhs_rde_serial(u, out, n, inv_dx2, mc.fc.data(),
                              static_cast<int>(mc.fc.size()) - 1);
    }
  } else {
    if (omp) {
      kernels::rhs_rcl_omp(u, scratch, out, n, inv_dx2, inv_dx, mc.ac.data(),
                           static_cast<int>(mc.ac.size()) - 1);
    } else {
      kernels::rhs_rcl_serial(u, scratch, out, n, inv_dx2, inv_dx,
                              mc.ac.data(),
                              static_cast<int>(mc.ac.size()) - 1);
    }
  }
}

// One Heun step in place. Throws NumericError if any updated value leaves
// [0,1] by more than the clamping tolerance (NaN included).
void step_once(FieldState& state, Workspace& ws, const ModelCache& mc,
               double dt, bool use_omp) {
  const int n = static_cast<int>(state.u.size());
  if (n < 3) throw ConfigError("field has fewer than 3 nodes");
  ws.resize(state.u.size());
  const bool omp = use_omp && kernels::omp_enabled() && n >= 256;
  double* u = state.u.data();

  eval_rhs(u, ws.scratch.data(), ws.k1.data(), n, state, mc, omp);
  if (omp) {
    kernels::euler_stage_omp(u, ws.k1.data(), ws.us.data(), n, dt);
  } else {
    kernels::euler_stage_serial(u, ws.k1.data(), ws.us.data(), n, dt);
  }
  eval_rhs(ws.us.data(), ws.scratch.data(), ws.k2.data(), n, state, mc, omp);

  const kernels::CombineRange r =
      omp ? kernels::heun_combine_omp(u, ws.k1.data(), ws.k2.data(), u, n, dt)
          : kernels::heun_combine_serial(u, ws.k1.data(), ws.k2.data(), u, n,
                                         dt);
  if (!(r.min_before >= -kExcursionTol && r.max_before <= 1.0 + kExcursionTol)) {
    std::ostringstream os;
    os << "solution left [0,1] beyond clamping tolerance at t=" << state.t
       << " (min=" << r.min_before << ", max=" << r.max_before << ")";
    throw NumericError(os.str());
  }
}

struct GridSpec {
  long long n = 0;
  double frame_offset = 0.0;
};

GridSpec grid_for_window(double dx, const WindowSpec& window) {
  if (!(dx > 0.0)) throw ConfigError("dx must be positive");
  if (!(window.left > 0.0)) throw ConfigError("window.left must be positive");
  if (!(window.right >= 40.0))
    throw ConfigError("window.right must be at least 40 to leave room ahead of the front");
  const double cells = (window.left + window.right) / dx;
  const long long nc = std::llround(cells);
  if (std::abs(cells - static_cast<double>(nc)) > 1e-6)
    throw ConfigError("window extent must be an integer number of cells");
  const double lcells = window.left / dx;
  const long long lc = std::llround(lcells);
  if (std::abs(lcells - static_cast<double>(lc)) > 1e-6)
    throw ConfigError("window.left must be an integer number of cells");
  GridSpec g;
  g.n = nc + 1;
  g.frame_offset = -static_cast<double>(lc) * dx;
  return g;
}

// Integrates this model's own minimal wave with enough extent on both sides
// to be sampled on [arg_lo, arg_hi]; the right extent always reaches the
// region where the wave is below the tail threshold used by the integrator.
TravelingWave minimal_wave_for_sampling(const NonlinearityModel& model,
                                        double arg_lo, double arg_hi,
                                        double dx_wave) {
  const RegimeClassification cls = classify(model);
  const double c = cls.minimal_speed_prediction;
  ProfileResult pr = solve_profile_ode(model, c);
  const WaveProfile* prof = std::get_if<WaveProfile>(&pr);
  if (prof == nullptr)
    throw NumericError("minimal wave profile did not connect while building initial data");
  const double right = std::max(arg_hi + 1.0, 40.0 / model.lambda);
  const double left = std::min(arg_lo - 1.0, -1.0);
  return integrate_wave(*prof, model, left, right, dx_wave);
}

}  // namespace

std::string equation_name(Equation eq) {
  return eq == Equation::RDE ? "rde" : "rcl";
}

FieldState make_initial_step(const NonlinearityModel& model, double x0,
                             double width, Equation eq, double dx,
                             const WindowSpec& window) {
  if (!(width >= 0.0)) throw ConfigError("smoothing width must be >= 0");
  const GridSpec g = grid_for_window(dx, window);
  const double x_left = g.frame_offset;
  const double x_right = g.frame_offset + static_cast<double>(g.n - 1) * dx;
  if (!(x0 - width > x_left + dx && x0 < x_right - dx))
    throw ConfigError("step location (with its smoothing band) lies outside the window");

  FieldState s;
  s.equation = eq;
  s.dx = dx;
  s.frame_offset = g.frame_offset;
  s.u.resize(static_cast<std::size_t>(g.n));

  if (width == 0.0) {
    for (long long i = 0; i < g.n; ++i)
      s.u[static_cast<std::size_t>(i)] =
          (s.x_lab(static_cast<std::size_t>(i)) < x0 - 1e-12) ? 1.0 : 0.0;
    return s;
  }

  const double gamma = 2.0;
  const double shift = x0 - 0.5 * width;  // wave centered mid-band
  const double arg_max = gamma * (x0 - shift);
  const TravelingWave wave =
      minimal_wave_for_sampling(model, -arg_max, arg_max, std::min(dx, 0.05) / 4.0);
  for (long long i = 0; i < g.n; ++i) {
    const double x = s.x_lab(static_cast<std::size_t>(i));
    double v;
    if (x <= x0 - width)
      v = 1.0;
    else if (x >= x0 - 1e-12)
      v = 0.0;
    else
      v = wave.value_at(gamma * (x - shift));
    s.u[static_cast<std::size_t>(i)] = std::min(1.0, std::max(0.0, v));
  }
  return s;
}

FieldState make_initial_scaled_wave(const NonlinearityModel& model,
                                    double gamma, double a, Equation eq,
                                    double dx, const WindowSpec& window) {
  if (!(gamma > 1.0))
    throw ConfigError("scaled-wave compression factor must exceed 1");
  if (!(a >= 0.0)) throw ConfigError("scaled-wave shift must be >= 0");
  const GridSpec g = grid_for_window(dx, window);

  FieldState s;
  s.equation = eq;
  s.dx = dx;
  s.frame_offset = g.frame_offset;
  s.u.resize(static_cast<std::size_t>(g.n));

  const double arg_lo = gamma * (g.frame_offset - a);
  const TravelingWave wave =
      minimal_wave_for_sampling(model, arg_lo, 1.0, std::min(dx, 0.05) / 4.0);
  for (long long i = 0; i < g.n; ++i) {
    const double x = s.x_lab(static_cast<std::size_t>(i));
    double v = (x <= 1e-12) ? wave.value_at(gamma * (x - a)) : 0.0;
    s.u[static_cast<std::size_t>(i)] = std::min(1.0, std::max(0.0, v));
  }
  return s;
}

FieldState make_initial_from_wave(const TravelingWave& wave, Equation eq,
                                  double dx, const WindowSpec& window) {
  const GridSpec g = grid_for_window(dx, window);
  FieldState s;
  s.equation = eq;
  s.dx = dx;
  s.frame_offset = g.frame_offset;
  s.u.resize(static_cast<std::size_t>(g.n));
  for (long long i = 0; i < g.n; ++i) {
    const double v = wave.value_at(s.x_lab(static_cast<std::size_t>(i)));
    s.u[static_cast<std::size_t>(i)] = std::min(1.0, std::max(0.0, v));
  }
  return s;
}

FieldState make_initial_state(const NonlinearityModel& model,
                              const InitialSpec& init, Equation eq, double dx,
                              const WindowSpec& window) {
  switch (init.kind) {
    case InitialSpec::Kind::SharpStep:
      return make_initial_step(model, init.x0, 0.0, eq, dx, window);
    case InitialSpec::Kind::SteepStep:
      return make_initial_step(model, init.x0, init.width, eq, dx, window);
    case InitialSpec::Kind::ScaledWave:
      return make_initial_scaled_wave(model, init.gamma, init.a, eq, dx,
                                      window);
    case InitialSpec::Kind::ExactWave: {
      const TravelingWave wave = minimal_wave_for_sampling(
          model, -(window.left + 1.0), window.right + 1.0,
          std::min(dx, 0.05) / 4.0);
      return make_initial_from_wave(wave, eq, dx, window);
    }
  }
  throw ConfigError("unknown initial data kind");
}

namespace {

// Shift the window contents by k whole cells (positive: window moves right,
// dropping left nodes). Vacated nodes get the Dirichlet values.
void shift_window(FieldState& state, long long k) {
  const long long n = static_cast<long long>(state.u.size());
  if (k == 0) return;
  if (std::abs(k) >= n - 2)
    throw NumericError("window shift larger than the window itself");
  double* u = state.u.data();
  if (k > 0) {
    std::memmove(u, u + k, static_cast<std::size_t>(n - k) * sizeof(double));
    std::fill(state.u.end() - static_cast<std::ptrdiff_t>(k), state.u.end(),
              0.0);
    u[0] = 1.0;
    state.frame_offset += static_cast<double>(k) * state.dx;
  } else {
    std::memmove(u - k, u, static_cast<std::size_t>(n + k) * sizeof(double));
    std::fill(state.u.begin(), state.u.begin() + static_cast<std::ptrdiff_t>(-k),
              1.0);
    u[n - 1] = 0.0;
    state.frame_offset += static_cast<double>(k) * state.dx;
  }
}

}  // namespace

long long recenter(FieldState& state, const WindowSpec& window, double level) {
  const double m_x = locate_level_crossing(state, level);
  const long long i_center = std::llround(window.left / state.dx);
  const double center_x =
      state.frame_offset + static_cast<double>(i_center) * state.dx;
  const double drift = m_x - center_x;
  long long k = 0;
  if (drift > state.dx) {
    k = static_cast<long long>(std::floor(drift / state.dx));
  } else if (drift < -state.dx) {
    k = -static_cast<long long>(std::floor(-drift / state.dx));
  }
  shift_window(state, k);
  return k;
}

void step(FieldState& state, const NonlinearityModel& model, double dt,
          const WindowSpec* window, double level, bool use_omp) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  ModelCache mc(model);
  Workspace ws;
  step_once(state, ws, mc, dt, use_omp);
  state.t += dt;
  if (window != nullptr) recenter(state, *window, level);
}

double locate_level_crossing(const FieldState& state, double level) {
  const std::size_t n = state.u.size();
  if (n < 2) throw ConfigError("field has fewer than 2 nodes");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("crossing level must lie in (0,1)");
  if (!(state.u[0] >= level))
    throw NumericError("crossing level is not attained at the left edge");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (state.u[i] >= level && state.u[i + 1] < level) {
      const double frac = (state.u[i] - level) / (state.u[i] - state.u[i + 1]);
      return state.x_lab(i) + frac * state.dx;
    }
  }
  throw NumericError("crossing level is not attained inside the window");
}

bool window_healthy(const FieldState& state) {
  const std::size_t n = state.u.size();
  if (n < 4) return false;
  return state.u[1] >= 1.0 - 1e-6 && state.u[n - 2] <= 1e-10;
}

std::vector<double> with_time_triples(const std::vector<double>& times,
                                      double offset) {
  std::vector<double> out;
  out.reserve(times.size() * 3);
  for (double t : times) {
    if (offset > 0.0) {
      if (t - offset > 0.0) out.push_back(t - offset);
      out.push_back(t);
      out.push_back(t + offset);
    } else {
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Trajectory run(const RunConfig& config, const NonlinearityModel& model) {
  return run_from(config, model,
                  make_initial_state(model, config.init, config.equation,
                                     config.dx, config.window));
}

Trajectory run_from(const RunConfig& config, const NonlinearityModel& model,
                    FieldState state) {
  if (!(config.cfl > 0.0 && config.cfl <= 0.25))
    throw ConfigError("cfl must lie in (0, 0.25]");
  if (!(config.front_level > 0.0 && config.front_level < 1.0))
    throw ConfigError("front_level must lie in (0,1)");
  if (!(config.front_sample_dt > 0.0))
    throw ConfigError("front_sample_dt must be positive");
  if (!(config.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (state.equation != config.equation)
    throw ConfigError("initial state equation does not match the run config");
  if (!(state.dx == config.dx))
    throw ConfigError("initial state dx does not match the run config");
  if (static_cast<long long>(state.u.size()) !=
      grid_for_window(config.dx, config.window).n)
    throw ConfigError("initial state size does not match the window");
  if (state.t != 0.0)
    throw ConfigError("initial state must start at t = 0");

  const double dt = config.cfl * config.dx * config.dx;
  const long long steps_total = std::llround(config.t_end / dt);
  if (std::abs(static_cast<double>(steps_total) * dt - config.t_end) >
      1e-9 * std::max(1.0, config.t_end))
    throw ConfigError("t_end must be an integer number of time steps");

  std::vector<long long> snap_steps;
  snap_steps.reserve(config.snapshot_times.size());
  for (double tau : config.snapshot_times) {
    if (!(tau >= 0.0 && tau <= config.t_end + 1e-12))
      throw ConfigError("snapshot times must lie in [0, t_end]");
    const long long k = std::llround(tau / dt);
    if (std::abs(static_cast<double>(k) * dt - tau) >
        1e-9 * std::max(1.0, tau))
      throw ConfigError("snapshot times must be integer multiples of dt");
    snap_steps.push_back(k);
  }
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()),
                   snap_steps.end());

  const long long stride =
      std::max<long long>(1, std::llround(config.front_sample_dt / dt));

  const auto wall0 = std::chrono::steady_clock::now();

  Trajectory traj;
  ModelCache mc(model);
  Workspace ws;
  const long long n = static_cast<long long>(state.u.size());
  const long long i_center = std::llround(config.window.left / config.dx);

  // Incrementally tracked bracketing index of the front-level crossing.
  long long hint = -1;
  auto refresh_hint = [&]() {
    hint = -1;
    for (long long i = 0; i + 1 < n; ++i) {
      if (state.u[static_cast<std::size_t>(i)] >= config.front_level &&
          state.u[static_cast<std::size_t>(i + 1)] < config.front_level) {
        hint = i;
        return;
      }
    }
    throw NumericError("front level crossing not found in the window");
  };
  auto front_x = [&]() {
    const double* u = state.u.data();
    while (hint + 2 < n && u[hint + 1] >= config.front_level) ++hint;
    while (hint >= 0 && u[hint] < config.front_level) --hint;
    if (hint < 0 || hint + 1 >= n) refresh_hint();
    const double ui = u[hint];
    const double uj = u[hint + 1];
    const double frac = (ui - config.front_level) / (ui - uj);
    return state.frame_offset + (static_cast<double>(hint) + frac) * state.dx;
  };
  auto recenter_if_needed = [&](double m_x) {
    const double center_x =
        state.frame_offset + static_cast<double>(i_center) * state.dx;
    const double drift = m_x - center_x;
    long long k = 0;
    if (drift > state.dx) {
      k = static_cast<long long>(std::floor(drift / state.dx));
    } else if (drift < -state.dx) {
      k = -static_cast<long long>(std::floor(-drift / state.dx));
    }
    if (k != 0) {
      shift_window(state, k);
      hint -= k;
      ++traj.stats.recenters;
    }
  };

  refresh_hint();

  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](long long step_idx) {
    while (next_snap < snap_steps.size() && snap_steps[next_snap] == step_idx) {
      traj.snapshots.push_back(state);
      ++next_snap;
    }
  };

  maybe_snapshot(0);
  {
    const double m0 = front_x();
    traj.trace_t.push_back(0.0);
    traj.trace_m.push_back(m0);
  }

  for (long long k = 1; k <= steps_total; ++k) {
    step_once(state, ws, mc, dt, config.use_omp);
    state.t = dt * static_cast<double>(k);
    const double m_x = front_x();
    recenter_if_needed(m_x);
    maybe_snapshot(k);
    if (k % stride == 0) {
      traj.trace_t.push_back(state.t);
      traj.trace_m.push_back(m_x);
    }
  }

  traj.stats.steps = steps_total;
  traj.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  return traj;
}

}  // namespace rdlab
