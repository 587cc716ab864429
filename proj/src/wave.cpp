#include "rdlab/wave.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Scalar adaptive Dormand-Prince 5(4) integrator. Steps from x toward
// x_target without overshooting; stops early (returns false) if y would cross
// the floor (event detection for the phase-plane exit eta <= 0).
struct Dopri {
  std::function<double(double, double)> f;
  double rtol = 1e-11, atol = 1e-15;
  double event_floor = -std::numeric_limits<double>::infinity();

  double x = 0.0, y = 0.0;
  double h = 0.0;  // carries sign of the march

  bool advance_to(double x_target) {
    const double dir = x_target > x ? 1.0 : -1.0;
    if (h == 0.0 || h * dir <= 0.0) h = dir * 1e-6 * std::max(1.0, std::abs(x));
    int guard = 0;
    while (dir * (x_target - x) > 1e-15 * std::max(1.0, std::abs(x))) {
      if (++guard > 2000000) throw NumericError("ODE integrator: step count blown");
      double hs = h;
      if (dir * (x + hs - x_target) > 0.0) hs = x_target - x;
      const double k1 = f(x, y);
      const double k2 = f(x + hs / 5, y + hs * (k1 / 5));
      const double k3 = f(x + 3 * hs / 10, y + hs * (3 * k1 / 40 + 9 * k2 / 40));
      const double k4 = f(x + 4 * hs / 5,
                          y + hs * (44 * k1 / 45 - 56 * k2 / 15 + 32 * k3 / 9));
      const double k5 =
          f(x + 8 * hs / 9, y + hs * (19372.0 * k1 / 6561 - 25360.0 * k2 / 2187 +
                                      64448.0 * k3 / 6561 - 212.0 * k4 / 729));
      const double k6 =
          f(x + hs, y + hs * (9017.0 * k1 / 3168 - 355.0 * k2 / 33 +
                              46732.0 * k3 / 5247 + 49.0 * k4 / 176 -
                              5103.0 * k5 / 18656));
      const double y5 = y + hs * (35.0 * k1 / 384 + 500.0 * k3 / 1113 +
                                  125.0 * k4 / 192 - 2187.0 * k5 / 6784 +
                                  11.0 * k6 / 84);
      const double k7 = f(x + hs, y5);
      const double y4 = y + hs * (5179.0 * k1 / 57600 + 7571.0 * k3 / 16695 +
                                  393.0 * k4 / 640 - 92097.0 * k5 / 339200 +
                                  187.0 * k6 / 2100 + k7 / 40);
      const double sc = atol + rtol * std::max(std::abs(y), std::abs(y5));
      const double err = std::abs(y5 - y4) / sc;
      if (err <= 1.0 && std::isfinite(y5)) {
        if (y5 <= event_floor) {
          // Try a smaller step to bracket the crossing tightly.
          if (std::abs(hs) < 1e-13 * std::max(1.0, std::abs(x))) return false;
          h = hs / 2;
          continue;
        }
        x += hs;
        y = y5;
        const double grow = err > 1e-30 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = hs * std::clamp(grow, 0.2, 5.0);
      } else {
        if (!std::isfinite(y5)) {
          h = hs / 2;
        } else {
          h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
        }
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x))) return false;
      }
    }
    return true;
  }
};

struct ProfileMarch {
  bool connected = false;
  double u_hit = 0.0;     // where eta crossed zero (if it did)
  double ratio = 0.0;     // eta(u_floor)/u_floor
  double lambda_match = 0.0;
};

constexpr double kUSwitch = 1e-3;  // switch to s = log u below this
constexpr double kUFloor = 1e-9;

// March the phase plane from u = 1-eps down to u_floor, optionally recording
// eta at requested u-nodes (descending order within (u_floor, 1-eps]).
ProfileMarch march_profile(const NonlinearityModel& m, double c,
                           const std::vector<double>* nodes,
                           std::vector<double>* eta_out) {
  ProfileMarch out;
  const double fp1 = m.f_prime(1.0);  // negative for monostable f
  const double slope1 = 0.5 * (c - std::sqrt(c * c - 4.0 * fp1));
  const double eps = 1e-6;

  Dopri ode;
  ode.event_floor = 0.0;
  ode.rtol = 1e-11;
  ode.atol = 1e-15;
  ode.f = [&](double u, double eta) { return c - m.f(u) / eta; };
  ode.x = 1.0 - eps;
  ode.y = -slope1 * eps;

  size_t ni = 0;
  auto record_until = [&](double u_low_bound) -> bool {
    // Advance through all requested nodes above u_low_bound.
    while (nodes && ni < nodes->size() && (*nodes)[ni] > u_low_bound) {
      const double target = (*nodes)[ni];
      if (target >= ode.x) {  // node above the start: linear in (1-u)
        (*eta_out)[ni] = -slope1 * (1.0 - target);
        ++ni;
        continue;
      }
      if (!ode.advance_to(target)) return false;
      (*eta_out)[ni] = ode.y;
      ++ni;
    }
    return true;
  };

  if (!record_until(kUSwitch) || !ode.advance_to(kUSwitch)) {
    out.u_hit = ode.x;
    return out;
  }

  // Log-variable phase: y(s) = eta(e^s).
  Dopri lode;
  lode.event_floor = 0.0;
  lode.rtol = 1e-11;
  lode.atol = 1e-15;
  lode.f = [&](double s, double eta) {
    const double u = std::exp(s);
    return u * (c - m.f(u) / eta);
  };
  lode.x = std::log(ode.x);
  lode.y = ode.y;
  while (nodes && ni < nodes->size() && (*nodes)[ni] > kUFloor) {
    if (!lode.advance_to(std::log((*nodes)[ni]))) {
      out.u_hit = std::exp(lode.x);
      return out;
    }
    (*eta_out)[ni] = lode.y;
    ++ni;
  }
  if (!lode.advance_to(std::log(kUFloor))) {
    out.u_hit = std::exp(lode.x);
    return out;
  }

  out.ratio = lode.y / kUFloor;
  const double disc = c * c - 4.0 * m.f_prime0();
  if (disc < -1e-12 * std::max(1.0, m.f_prime0())) return out;  // no real decay rate
  const double sq = std::sqrt(std::max(0.0, disc));
  const double lam_minus = 0.5 * (c - sq), lam_plus = 0.5 * (c + sq);
  for (double lam : {lam_minus, lam_plus}) {
    if (lam > 0.0 && out.ratio >= 0.9 * lam && out.ratio <= 1.1 * lam) {
      out.connected = true;
      if (out.lambda_match == 0.0 ||
          std::abs(out.ratio - lam) < std::abs(out.ratio - out.lambda_match))
        out.lambda_match = lam;
    }
  }
  return out;
}

}  // namespace

double WaveProfile::eta_at(double u) const {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::max(0.0, (*interp)(u));
}

ProfileResult solve_profile_ode(const NonlinearityModel& model, double c,
                                int npts) {
  if (!(c > 0.0)) throw ConfigError("solve_profile_ode: need c > 0");
  if (npts < 4097) npts = 4097;
  WaveProfile p;
  p.c = c;
  p.u_grid.resize(npts);
  p.eta.assign(npts, 0.0);
  const double du = 1.0 / (npts - 1);
  for (int k = 0; k < npts; ++k) p.u_grid[k] = k * du;

  // Interior nodes, descending, as recording targets. Below the first
  // uniform node the grid is extended by log-spaced samples: near the
  // degenerate root at u=0 the slope converges only logarithmically, and a
  // uniform grid cannot resolve eta there well enough for the far tail of
  // the wave shape (the linear prefactor would be silently lost).
  const int tail_pts = 768;
  const double tail_lo = 3e-9;
  std::vector<double> nodes;
  nodes.reserve(npts - 2 + tail_pts);
  for (int k = npts - 2; k >= 1; --k) nodes.push_back(p.u_grid[k]);
  const double u1 = p.u_grid[1];
  for (int k = 1; k <= tail_pts; ++k)
    nodes.push_back(u1 * std::pow(tail_lo / u1,
                                  static_cast<double>(k) / tail_pts));
  std::vector<double> eta_desc(nodes.size(), 0.0);

  const ProfileMarch mres = march_profile(model, c, &nodes, &eta_desc);
  if (!mres.connected) {
    return ConnectionFailure{mres.u_hit};
  }
  for (int i = 0; i < npts - 2; ++i) p.eta[npts - 2 - i] = eta_desc[i];

  const double fp1 = model.f_prime(1.0);
  p.eta_prime_1 = 0.5 * (c - std::sqrt(c * c - 4.0 * fp1));
  p.eta_prime_0 = mres.lambda_match;

  // Interpolate over the full (ascending) union of nodes incl. endpoints.
  std::vector<double> iu, ie;
  iu.reserve(nodes.size() + 2);
  ie.reserve(nodes.size() + 2);
  iu.push_back(0.0);
  ie.push_back(0.0);
  for (size_t i = nodes.size(); i-- > 0;) {
    iu.push_back(nodes[i]);
    ie.push_back(eta_desc[i]);
  }
  iu.push_back(1.0);
  ie.push_back(0.0);
  p.interp = std::make_shared<MonotoneCubic>(iu, ie, p.eta_prime_0,
                                             p.eta_prime_1);
  return p;
}

double minimal_speed(const NonlinearityModel& model, double tol) {
  const double lam = model.lambda;
  auto connects = [&](double c) {
    const double disc = c * c - 4.0 * model.f_prime0();
    if (disc < -1e-12 * std::max(1.0, model.f_prime0())) return false;
    return march_profile(model, c, nullptr, nullptr).connected;
  };
  const double chi = model.chi;
  const double predicted =
      chi <= 1.0 ? 2.0 * lam : lam * (std::sqrt(chi) + 1.0 / std::sqrt(chi));
  double lo = 2.0 * lam - std::max(tol, 1e-6);
  double hi = predicted;
  bool ok = connects(hi);
  for (double bump : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    if (ok) break;
    hi = predicted + bump * lam;
    ok = connects(hi);
  }
  if (!ok)
    throw NumericError("minimal_speed: no connecting speed found in [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (connects(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double hadeler_rothe_value(const std::vector<double>& u,
                           const std::vector<double>& p,
                           const std::vector<double>& p_prime,
                           const NonlinearityModel& model) {
  const size_t n = u.size();
  if (p.size() != n || p_prime.size() != n || n < 3)
    throw ConfigError("hadeler_rothe_value: bad tables");
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 1; i + 1 < n; ++i) {
    if (!(p[i] > 0.0))
      throw NumericError("hadeler_rothe_value: test function not positive at u=" +
                         std::to_string(u[i]));
    best = std::max(best, p_prime[i] + model.f(u[i]) / p[i]);
  }
  if (p.back() > 0.0)
    best = std::max(best, p_prime.back() + model.f(u.back()) / p.back());
  return best;
}

double alpha_inverse(const NonlinearityModel& model, double y) {
  if (y < 0.0 || y > 1.0) throw ConfigError("alpha_inverse: y outside [0,1]");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (model.alpha(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double TravelingWave::value_at(double x) const {
  if (x <= x_grid.front()) return U.front();
  if (x >= x_grid.back())
    return U.back() * std::exp(-lambda_c * (x - x_grid.back()));
  const double h = dx();
  const size_t n = x_grid.size();
  const double s = (x - x_grid.front()) / h;
  size_t i = std::min(static_cast<size_t>(s), n - 2);
  const double t = s - static_cast<double>(i);
  // Catmull-Rom on the four surrounding nodes, clamped to the bracketing
  // values so sampled data stays monotone and inside [0,1].
  const double ym = i > 0 ? U[i - 1] : 2.0 * U[0] - U[1];
  const double y0 = U[i], y1 = U[i + 1];
  const double yp = i + 2 < n ? U[i + 2] : 2.0 * U[n - 1] - U[n - 2];
  const double a0 = y0;
  const double a1 = 0.5 * (y1 - ym);
  const double a2 = ym - 2.5 * y0 + 2.0 * y1 - 0.5 * yp;
  const double a3 = 0.5 * (yp - ym) + 1.5 * (y0 - y1);
  const double v = a0 + t * (a1 + t * (a2 + t * a3));
  return std::clamp(v, std::min(y0, y1), std::max(y0, y1));
}

TravelingWave integrate_wave(const WaveProfile& profile,
                             const NonlinearityModel& model, double left,
                             double right, double dx) {
  if (!(dx > 0.0) || !(right > left))
    throw ConfigError("integrate_wave: bad extent");
  if (!(left <= 0.0 && right >= 0.0))
    throw ConfigError("integrate_wave: extent must contain x=0");
  TravelingWave w;
  w.c = profile.c;
  w.lambda_c = profile.eta_prime_0;
  const int n = static_cast<int>(std::lround((right - left) / dx)) + 1;
  w.x_grid.resize(n);
  w.U.assign(n, 0.0);
  for (int k = 0; k < n; ++k) w.x_grid[k] = left + k * dx;

  const double u0 = alpha_inverse(model, 0.5);
  auto rhs = [&](double, double u) {
    return -profile.eta_at(std::clamp(u, 0.0, 1.0));
  };

  // Split the node list at x = 0 and march outward both ways.
  int k0 = 0;
  while (k0 < n && w.x_grid[k0] < 0.0) ++k0;  // first node >= 0

  Dopri rightward;
  rightward.f = rhs;
  rightward.rtol = 1e-11;
  rightward.atol = 1e-300;  // tail decays over many orders of magnitude
  rightward.event_floor = -1.0;
  rightward.x = 0.0;
  rightward.y = u0;
  for (int k = k0; k < n; ++k) {
    if (rightward.y < 1e-305) {
      w.U[k] = 0.0;
      continue;
    }
    rightward.advance_to(w.x_grid[k]);
    w.U[k] = std::max(0.0, rightward.y);
  }

  Dopri leftward;
  leftward.f = rhs;
  leftward.rtol = 1e-11;
  leftward.atol = 1e-15;
  leftward.event_floor = -1.0;
  leftward.x = 0.0;
  leftward.y = u0;
  for (int k = k0 - 1; k >= 0; --k) {
    leftward.advance_to(w.x_grid[k]);
    w.U[k] = std::min(1.0, leftward.y);
  }

  if (!(w.U.back() < 1e-8))
    throw ConfigError("integrate_wave: right extent too small to reach U < 1e-8");
  try {
    const DecayFit fit = decay_asymptotics(w);
    w.D = fit.D;
    w.B = fit.B;
  } catch (const NumericError&) {
    w.D = std::numeric_limits<double>::quiet_NaN();
    w.B = std::numeric_limits<double>::quiet_NaN();
  }
  return w;
}

DecayFit decay_asymptotics(const TravelingWave& wave) {
  const size_t n = wave.x_grid.size();
  if (!(wave.U.back() < 1e-8))
    throw NumericError("decay_asymptotics: tail not resolved to U < 1e-8");
  // 0.1-level crossing.
  double x90 = wave.x_grid.front();
  for (size_t i = 1; i < n; ++i) {
    if (wave.U[i] <= 0.1 && wave.U[i - 1] > 0.1) {
      const double f = (wave.U[i - 1] - 0.1) / (wave.U[i - 1] - wave.U[i]);
      x90 = wave.x_grid[i - 1] + f * (wave.x_grid[i] - wave.x_grid[i - 1]);
      break;
    }
  }
  const double x_lo = x90 + 5.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t cnt = 0;
  double span_lo = 0, span_hi = 0;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < n; ++i) {
    const double x = wave.x_grid[i];
    if (x < x_lo || wave.U[i] < 1e-7) continue;
    const double y = std::exp(wave.lambda_c * x) * wave.U[i];
    xs.push_back(x);
    ys.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (cnt == 0) span_lo = x;
    span_hi = x;
    ++cnt;
  }
  if (cnt < 20 || span_hi - span_lo < 1.0)
    throw NumericError("decay_asymptotics: tail window too short for a stable fit");
  const double N = static_cast<double>(cnt);
  const double xbar = sx / N, ybar = sy / N;
  const double Sxx = sxx - N * xbar * xbar;
  const double b = (sxy - N * xbar * ybar) / Sxx;
  const double a = ybar - b * xbar;
  double rss = 0;
  for (size_t i = 0; i < cnt; ++i) {
    const double r = ys[i] - (a + b * xs[i]);
    rss += r * r;
  }
  // Noise floor: residual standard error of the linear fit. It absorbs both
  // numerical noise and the systematic next-order corrections to the
  // (Dx+B)e^{-lambda x} form, which is what limits how small a true D could
  // still be distinguished on this window.
  const double sigma = std::sqrt(std::max(0.0, rss / (N - 2.0)));
  DecayFit fit;
  fit.lambda_c = wave.lambda_c;
  fit.D_raw = b;
  fit.noise_floor = sigma;
  fit.B = a;
  if (std::abs(b) < 10.0 * sigma + 1e-14) {
    fit.cls = DecayClass::PureExponential;
    fit.D = 0.0;
  } else {
    fit.cls = DecayClass::LinearPrefactor;
    fit.D = b;
  }
  return fit;
}

BoundsReport profile_bounds_check(const WaveProfile& profile,
                                  const NonlinearityModel& model) {
  if (model.chi < 0.0 || model.chi > 1.0 + 1e-12)
    throw ConfigError("profile_bounds_check: requires 0 <= chi <= 1");
  const double lam = model.lambda;
  const double root_chi = std::sqrt(std::max(0.0, model.chi));
  BoundsReport rep{0.0, 0.0, true};
  for (size_t i = 0; i < profile.u_grid.size(); ++i) {
    const double u = profile.u_grid[i];
    const double z = u - model.A(u);
    const double lower = lam * root_chi * z - profile.eta[i];
    const double upper = profile.eta[i] - lam * z;
    rep.max_lower_violation = std::max(rep.max_lower_violation, lower);
    rep.max_upper_violation = std::max(rep.max_upper_violation, upper);
  }
  rep.pass = rep.max_lower_violation <= 1e-8 && rep.max_upper_violation <= 1e-8;
  return rep;
}

double profile_residual_max(const WaveProfile& profile,
                            const NonlinearityModel& model) {
  const auto& u = profile.u_grid;
  const auto& e = profile.eta;
  const size_t n = u.size();
  const double h = u[1] - u[0];
  double worst = 0.0;
  for (size_t k = 1; k + 1 < n; ++k) {
    double ep;
    if (k == 1) {
      ep = (-3 * e[0] - 10 * e[1] + 18 * e[2] - 6 * e[3] + e[4]) / (12 * h);
    } else if (k + 2 >= n) {
      ep = (3 * e[n - 1] + 10 * e[n - 2] - 18 * e[n - 3] + 6 * e[n - 4] -
            e[n - 5]) /
           (12 * h);
    } else {
      ep = (e[k - 2] - 8 * e[k - 1] + 8 * e[k + 1] - e[k + 2]) / (12 * h);
    }
    worst = std::max(worst, std::abs(e[k] * (profile.c - ep) - model.f(u[k])));
  }
  return worst;
}

}  // namespace rdlab
