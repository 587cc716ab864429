#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <rdlab/errors.hpp>
#include <rdlab/nonlinearity.hpp>
#include <rdlab/wave.hpp>

#include <cmath>
#include <variant>
#include <vector>

using namespace rdlab;

namespace {

WaveProfile solved_profile(const NonlinearityModel& m, double c) {
  ProfileResult r = solve_profile_ode(m, c);
  REQUIRE(std::holds_alternative<WaveProfile>(r));
  return std::get<WaveProfile>(r);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(x)); }

}  // namespace

TEST_CASE("bisected minimal speed lands on the bracket edge for the quadratic family") {
  // For n = 2, lambda = 1 the predictions are rational and the bisection
  // bracket edges fall exactly on them.
  for (double chi : {0.0, 0.5, 1.0}) {
    NonlinearityModel m = build_power_family(2, chi, 1.0);
    const double ms = minimal_speed(m);
    CHECK(std::abs(ms - 2.0) <= 1e-9);
  }
  NonlinearityModel pushed = build_power_family(2, 4.0, 1.0);
  CHECK(std::abs(minimal_speed(pushed) - 2.5) <= 1e-9);
}

TEST_CASE("bisected minimal speed tracks the closed-form prediction across the family") {
  struct Case {
    int n;
    double chi, lambda;
  };
  const Case cases[] = {
      {3, 0.0, 1.0}, {3, 1.0, 2.0}, {3, 9.0, 1.0}, {2, 0.75, 1.0}, {2, 4.0, 2.0},
  };
  for (const Case& k : cases) {
    NonlinearityModel m = build_power_family(k.n, k.chi, k.lambda);
    const double pred = classify(m).minimal_speed_prediction;
    const double ms = minimal_speed(m);
    CAPTURE(k.n);
    CAPTURE(k.chi);
    CAPTURE(k.lambda);
    CHECK(std::abs(ms - pred) <= 2e-4);
  }
}

TEST_CASE("pushmi-pullyu profile and wave match the logistic closed forms") {
  NonlinearityModel m = build_power_family(2, 1.0, 1.0);
  WaveProfile p = solved_profile(m, 2.0);
  CHECK(p.c == 2.0);

  // eta_*(u) = u - u^2, endpoint slopes +1 and -1.
  double sup_eta = 0.0;
  for (std::size_t i = 0; i < p.u_grid.size(); ++i) {
    const double u = p.u_grid[i];
    sup_eta = std::max(sup_eta, std::abs(p.eta[i] - (u - u * u)));
  }
  CAPTURE(sup_eta);
  CHECK(sup_eta <= 1e-8);
  CHECK(p.eta_prime_0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.eta_prime_1 == doctest::Approx(-1.0).epsilon(1e-6));

  // The wave itself is U(x) = 1/(1+e^x) under the alpha(U(0)) = 1/2 anchor.
  TravelingWave w = integrate_wave(p, m, -20.0, 40.0, 0.01);
  CHECK(w.c == 2.0);
  CHECK(w.lambda_c == doctest::Approx(1.0).epsilon(1e-6));
  double sup_wave = 0.0;
  for (std::size_t i = 0; i < w.x_grid.size(); ++i)
    sup_wave = std::max(sup_wave, std::abs(w.U[i] - logistic(w.x_grid[i])));
  CAPTURE(sup_wave);
  CHECK(sup_wave <= 1e-8);
  CHECK(w.value_at(0.0) == doctest::Approx(0.5).epsilon(1e-9));

  // Off-grid sampling goes through the interpolant; hold it to the same bar
  // away from the tail switch.
  double sup_interp = 0.0;
  for (double x = -6.0025; x < 6.0; x += 0.1)
    sup_interp = std::max(sup_interp, std::abs(w.value_at(x) - logistic(x)));
  CAPTURE(sup_interp);
  CHECK(sup_interp <= 1e-7);
}

TEST_CASE("pushed chi=4 profile and wave match the steep logistic closed forms") {
  NonlinearityModel m = build_power_family(2, 4.0, 1.0);
  WaveProfile p = solved_profile(m, 2.5);

  // eta_*(u) = 2(u - u^2): decay rate 2, back slope -2.
  double sup_eta = 0.0;
  for (std::size_t i = 0; i < p.u_grid.size(); ++i) {
    const double u = p.u_grid[i];
    sup_eta = std::max(sup_eta, std::abs(p.eta[i] - 2.0 * (u - u * u)));
  }
  CAPTURE(sup_eta);
  CHECK(sup_eta <= 1e-8);
  CHECK(p.eta_prime_0 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p.eta_prime_1 == doctest::Approx(-2.0).epsilon(1e-6));

  TravelingWave w = integrate_wave(p, m, -20.0, 40.0, 0.01);
  CHECK(w.lambda_c == doctest::Approx(2.0).epsilon(1e-6));
  double sup_wave = 0.0;
  for (std::size_t i = 0; i < w.x_grid.size(); ++i)
    sup_wave =
        std::max(sup_wave, std::abs(w.U[i] - 1.0 / (1.0 + std::exp(2.0 * w.x_grid[i]))));
  CAPTURE(sup_wave);
  CHECK(sup_wave <= 1e-8);
  CHECK(w.value_at(0.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("eta_at interpolates the tabulated slope function to near machine accuracy") {
  NonlinearityModel m = build_power_family(2, 1.0, 1.0);
  WaveProfile p = solved_profile(m, 2.0);
  double sup = 0.0;
  for (double u = 0.0003; u < 1.0; u += 0.0017)
    sup = std::max(sup, std::abs(p.eta_at(u) - (u - u * u)));
  CAPTURE(sup);
  CHECK(sup <= 1e-8);
  CHECK(p.eta_at(0.0) == 0.0);
  CHECK(p.eta_at(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("variational speed bound is exact on the true slope function") {
  const int N = 2001;
  std::vector<double> u(N), p(N), pp(N);
  for (int i = 0; i < N; ++i) u[i] = static_cast<double>(i) / (N - 1);
  const double h = u[1] - u[0];

  NonlinearityModel pushpull = build_power_family(2, 1.0, 1.0);
  for (int i = 0; i < N; ++i) {
    p[i] = u[i] - u[i] * u[i];
    pp[i] = 1.0 - 2.0 * u[i];
  }
  CHECK(hadeler_rothe_value(u, p, pp, pushpull) == doctest::Approx(2.0).epsilon(1e-12));

  NonlinearityModel pushed = build_power_family(2, 4.0, 1.0);
  std::vector<double> q(N), qp(N);
  for (int i = 0; i < N; ++i) {
    q[i] = 2.0 * (u[i] - u[i] * u[i]);
    qp[i] = 2.0 - 4.0 * u[i];
  }
  CHECK(hadeler_rothe_value(u, q, qp, pushed) == doctest::Approx(2.5).epsilon(1e-12));

  // A mismatched test function overshoots: with p = u - u^2 under chi = 4 the
  // integrand is 2 + 6u, so the tabulated sup sits at the last interior node.
  CHECK(hadeler_rothe_value(u, p, pp, pushed) ==
        doctest::Approx(8.0 - 6.0 * h).epsilon(1e-12));

  CHECK_THROWS_AS(hadeler_rothe_value({0.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}, pushpull),
                  ConfigError);
  std::vector<double> bad = p;
  bad[N / 2] = 0.0;
  CHECK_THROWS_AS(hadeler_rothe_value(u, bad, pp, pushpull), NumericError);
}

TEST_CASE("decay classification separates double-root and simple-root tails") {
  SUBCASE("pushmi-pullyu: pure exponential") {
    NonlinearityModel m = build_power_family(2, 1.0, 1.0);
    TravelingWave w = integrate_wave(solved_profile(m, 2.0), m, -20.0, 40.0, 0.01);
    DecayFit fit = decay_asymptotics(w);
    CHECK(fit.cls == DecayClass::PureExponential);
    CHECK(fit.D == 0.0);
    CHECK(std::abs(fit.D_raw) < 10.0 * fit.noise_floor);
    CHECK(fit.lambda_c == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("pushed: pure exponential") {
    NonlinearityModel m = build_power_family(2, 4.0, 1.0);
    TravelingWave w = integrate_wave(solved_profile(m, 2.5), m, -20.0, 40.0, 0.01);
    DecayFit fit = decay_asymptotics(w);
    CHECK(fit.cls == DecayClass::PureExponential);
    CHECK(fit.D == 0.0);
    CHECK(fit.lambda_c == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("semi-regime: linear prefactor with a resolved slope") {
    NonlinearityModel m = build_power_family(2, 0.75, 1.0);
    const double c = minimal_speed(m);
    TravelingWave w = integrate_wave(solved_profile(m, c), m, -20.0, 40.0, 0.01);
    DecayFit fit = decay_asymptotics(w);
    CHECK(fit.cls == DecayClass::LinearPrefactor);
    CHECK(fit.D > 0.0);
    CHECK(std::abs(fit.D_raw) >= 10.0 * fit.noise_floor);
  }
  SUBCASE("classic quadratic: linear prefactor") {
    NonlinearityModel m = build_power_family(2, 0.0, 1.0);
    const double c = minimal_speed(m);
    TravelingWave w = integrate_wave(solved_profile(m, c), m, -20.0, 40.0, 0.01);
    DecayFit fit = decay_asymptotics(w);
    CHECK(fit.cls == DecayClass::LinearPrefactor);
    CHECK(fit.D > 0.0);
  }
}

TEST_CASE("slope-function sandwich holds up to chi = 1 and is refused beyond") {
  for (double chi : {0.0, 0.5, 0.75, 1.0}) {
    NonlinearityModel m = build_power_family(2, chi, 1.0);
    WaveProfile p = solved_profile(m, minimal_speed(m));
    BoundsReport rep = profile_bounds_check(p, m);
    CAPTURE(chi);
    CAPTURE(rep.max_lower_violation);
    CAPTURE(rep.max_upper_violation);
    CHECK(rep.pass);
    CHECK(rep.max_lower_violation <= 1e-8);
    CHECK(rep.max_upper_violation <= 1e-8);
  }
  NonlinearityModel pushed = build_power_family(2, 4.0, 1.0);
  WaveProfile p = solved_profile(pushed, 2.5);
  CHECK_THROWS_AS(profile_bounds_check(p, pushed), ConfigError);
}

TEST_CASE("tabulated profiles satisfy the phase-plane equation") {
  NonlinearityModel pp = build_power_family(2, 1.0, 1.0);
  CHECK(profile_residual_max(solved_profile(pp, 2.0), pp) <= 1e-11);

  NonlinearityModel pushed = build_power_family(2, 4.0, 1.0);
  CHECK(profile_residual_max(solved_profile(pushed, 2.5), pushed) <= 1e-11);

  // The double-root tail makes the tabulated slope slightly less smooth near
  // u = 0, so the stencil residual is larger there (measured 1.0e-7).
  NonlinearityModel semi = build_power_family(2, 0.75, 1.0);
  const double res = profile_residual_max(solved_profile(semi, minimal_speed(semi)), semi);
  CAPTURE(res);
  CHECK(res <= 3e-7);
}

TEST_CASE("alpha_inverse solves alpha(u) = y") {
  NonlinearityModel quad = build_power_family(2, 1.0, 1.0);
  for (double y : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0})
    CHECK(alpha_inverse(quad, y) == doctest::Approx(y).scale(1.0).epsilon(1e-12));

  NonlinearityModel cubic = build_power_family(3, 1.0, 1.0);
  for (double y : {0.0, 0.04, 0.25, 0.5, 1.0})
    CHECK(alpha_inverse(cubic, y) ==
          doctest::Approx(std::sqrt(y)).scale(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(alpha_inverse(quad, -0.1), ConfigError);
  CHECK_THROWS_AS(alpha_inverse(quad, 1.1), ConfigError);
}

TEST_CASE("speeds below minimal fail to connect; faster speeds decay at the slow root") {
  NonlinearityModel pp = build_power_family(2, 1.0, 1.0);
  {
    ProfileResult r = solve_profile_ode(pp, 1.9);
    REQUIRE(std::holds_alternative<ConnectionFailure>(r));
    const double hit = std::get<ConnectionFailure>(r).u_hit;
    CHECK(hit >= 0.0);
    CHECK(hit < 1.0);
  }
  NonlinearityModel pushed = build_power_family(2, 4.0, 1.0);
  for (double c : {2.0, 2.4})
    CHECK(std::holds_alternative<ConnectionFailure>(solve_profile_ode(pushed, c)));

  // Supercritical speeds connect and decay at the smaller root of
  // r^2 - c r + f'(0) = 0, here (3 - sqrt(5))/2.
  const double slow_root = 0.5 * (3.0 - std::sqrt(5.0));
  for (const NonlinearityModel* m : {&pp, &pushed}) {
    WaveProfile p = solved_profile(*m, 3.0);
    CHECK(p.eta_prime_0 == doctest::Approx(slow_root).epsilon(1e-6));
  }
}

TEST_CASE("decomposition recovered from a solved profile round-trips chi and A") {
  NonlinearityModel m = build_power_family(2, 1.0, 1.0);
  WaveProfile p = solved_profile(m, 2.0);
  RecoveredDecomposition rec = recover_decomposition(p, 2.0, 1.0);
  CHECK(rec.chi == doctest::Approx(1.0).epsilon(1e-6));
  double supA = 0.0;
  for (std::size_t i = 0; i < rec.u_grid.size(); ++i) {
    const double u = rec.u_grid[i];
    supA = std::max(supA, std::abs(rec.A_values[i] - u * u));
  }
  CAPTURE(supA);
  CHECK(supA <= 1e-6);
}
