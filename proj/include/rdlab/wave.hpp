#pragma once
#include <memory>
#include <variant>
#include <vector>

#include "rdlab/interp.hpp"
#include "rdlab/nonlinearity.hpp"

namespace rdlab {

// Slope function eta_c(u) of a traveling wave: -U' = eta_c(U). Tabulated on a
// uniform u-grid with analytic endpoint slopes; eta_at interpolates with a
// monotone shape-preserving cubic.
struct WaveProfile {
  std::vector<double> u_grid;  // uniform on [0,1], >= 4097 points
  std::vector<double> eta;
  double c = 0.0;
  double eta_prime_0 = 0.0;  // lambda_c, the decay rate at u=0
  double eta_prime_1 = 0.0;  // slope at u=1 (negative)
  std::shared_ptr<const MonotoneCubic> interp;

  double eta_at(double u) const;
};

struct ConnectionFailure {
  double u_hit;  // where eta first crossed zero (phase plane exit)
};

using ProfileResult = std::variant<WaveProfile, ConnectionFailure>;

// Integrate the phase-plane equation eta'(u) = c - f(u)/eta from u = 1-eps
// down to u_floor = 1e-9, switching to the log-u variable below u = 1e-3.
// Success requires eta > 0 throughout, a real root of r^2 - c r + f'(0) = 0,
// and eta(u_floor)/u_floor within 10% of such a root.
ProfileResult solve_profile_ode(const NonlinearityModel& model, double c,
                                int npts = 4097);

// Smallest speed admitting a monotone connection, located by bisection on the
// connection predicate; absolute tolerance tol (returned value is on the
// succeeding side of the bracket).
double minimal_speed(const NonlinearityModel& model, double tol = 1e-4);

// Variational upper bound sup_u p'(u) + f(u)/p(u) over the tabulated test
// function (p with analytic derivative supplied alongside).
double hadeler_rothe_value(const std::vector<double>& u,
                           const std::vector<double>& p,
                           const std::vector<double>& p_prime,
                           const NonlinearityModel& model);

enum class DecayClass { PureExponential, LinearPrefactor };

struct TravelingWave {
  std::vector<double> x_grid;  // uniform spacing
  std::vector<double> U;       // decreasing from ~1 to ~0
  double c = 0.0;
  double lambda_c = 0.0;
  double D = 0.0, B = 0.0;     // tail prefactor fit U ~ (D x + B) e^{-lambda_c x}
  double dx() const { return x_grid.size() > 1 ? x_grid[1] - x_grid[0] : 0.0; }
  double value_at(double x) const;  // cubic interior, exponential tail, 1 on the left
};

// Solve -U' = eta(U) with the normalization alpha(U(0)) = 1/2 on
// [left, right] with spacing dx; requires the tail to reach U < 1e-8.
TravelingWave integrate_wave(const WaveProfile& profile,
                             const NonlinearityModel& model, double left,
                             double right, double dx);

struct DecayFit {
  double lambda_c;
  double D, B;          // D is set to 0 when classified PureExponential
  double D_raw;         // least-squares slope before the noise-floor decision
  double noise_floor;   // residual standard error of the linear tail fit;
                        // D declared zero when |D_raw| < 10 * noise_floor
  DecayClass cls;
};
DecayFit decay_asymptotics(const TravelingWave& wave);

struct BoundsReport {
  double max_lower_violation;  // max of lambda sqrt(chi) (u-A) - eta
  double max_upper_violation;  // max of eta - lambda (u-A)
  bool pass;
};
// Sandwich check lambda sqrt(chi) (u-A) <= eta <= lambda (u-A) for
// 0 <= chi <= 1 minimal-speed profiles (1e-8 slack).
BoundsReport profile_bounds_check(const WaveProfile& profile,
                                  const NonlinearityModel& model);

// Max residual |eta (c - eta') - f| over the grid, eta' by 4th-order stencils.
double profile_residual_max(const WaveProfile& profile,
                            const NonlinearityModel& model);

// Solve alpha(u) = y for u in [0,1] (alpha is increasing).
double alpha_inverse(const NonlinearityModel& model, double y);

inline RecoveredDecomposition recover_decomposition(const WaveProfile& p,
                                                    double c_star,
                                                    double lambda) {
  return recover_decomposition(p.u_grid, p.eta, c_star, lambda);
}

}  // namespace rdlab
