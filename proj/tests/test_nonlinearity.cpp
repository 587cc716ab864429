#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <rdlab/errors.hpp>
#include <rdlab/nonlinearity.hpp>

#include <cmath>
#include <vector>

using namespace rdlab;

TEST_CASE("power family: A, derivatives, f, and alpha in closed form") {
  for (int n : {2, 3, 5}) {
    for (double chi : {0.0, 0.5, 1.0, 4.0}) {
      for (double lambda : {1.0, 2.0}) {
        NonlinearityModel m = build_power_family(n, chi, lambda);
        CHECK(m.chi == chi);
        CHECK(m.lambda == lambda);
        CHECK(m.f_prime0() == lambda * lambda);
        for (double u : {0.0, 0.1, 0.3, 0.5, 0.8, 1.0}) {
          const double An = std::pow(u, n);
          CHECK(m.A(u) == doctest::Approx(An).epsilon(1e-14));
          CHECK(m.Ap(u) ==
                doctest::Approx(n * std::pow(u, n - 1)).epsilon(1e-14));
          CHECK(m.App(u) ==
                doctest::Approx(n * (n - 1) * std::pow(u, n - 2))
                    .epsilon(1e-14));
          const double f_expected =
              lambda * lambda * (u - An) * (1.0 + chi * n * std::pow(u, n - 1));
          CHECK(m.f(u) == doctest::Approx(f_expected).epsilon(1e-13));
          // alpha(u) = A(u)/u with the removable singularity filled in
          const double a_expected = u == 0.0 ? 0.0 : An / u;
          CHECK(m.alpha(u) == doctest::Approx(a_expected).epsilon(1e-13));
        }
        CHECK(m.f(0.0) == 0.0);
        CHECK(m.f(1.0) == 0.0);
        CHECK(validate(m).ok());
      }
    }
  }
}

TEST_CASE("alpha at the origin: limit values") {
  NonlinearityModel m2 = build_power_family(2, 1.0);
  CHECK(m2.alpha(0.0) == 0.0);
  CHECK(m2.alpha_prime(0.0) == doctest::Approx(1.0).epsilon(1e-12));  // A''(0)/2
  NonlinearityModel m3 = build_power_family(3, 1.0);
  CHECK(m3.alpha_prime(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m3.alpha_prime(1.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("f_prime matches an analytic expansion") {
  // n=2, chi=1, lambda=1: f = (u-u^2)(1+2u) = u + u^2 - 2u^3, f' = 1+2u-6u^2
  NonlinearityModel m = build_power_family(2, 1.0, 1.0);
  for (double u : {0.0, 0.25, 0.5, 0.75, 1.0})
    CHECK(m.f_prime(u) ==
          doctest::Approx(1.0 + 2.0 * u - 6.0 * u * u).epsilon(1e-13));
  CHECK(m.f(0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("chi_fkpp of the power family is 1/n") {
  for (int n : {2, 3, 4, 8})
    CHECK(chi_fkpp(build_power_family(n, 1.0)) ==
          doctest::Approx(1.0 / n).epsilon(1e-12));
}

TEST_CASE("regime boundaries") {
  // chi = chi_fkpp belongs to FKPP (inclusive threshold)
  CHECK(classify(build_power_family(2, 0.5)).regime == Regime::FKPP);
  CHECK(classify(build_power_family(2, 0.0)).regime == Regime::FKPP);
  CHECK(classify(build_power_family(2, 0.5 + 1e-9)).regime ==
        Regime::SemiFKPP);
  CHECK(classify(build_power_family(3, 0.5)).regime == Regime::SemiFKPP);
  CHECK(classify(build_power_family(2, 1.0)).regime == Regime::PushmiPullyu);
  CHECK(classify(build_power_family(2, 1.0 + 1e-9)).regime == Regime::Pushed);
  CHECK(classify(build_power_family(2, 4.0)).regime == Regime::Pushed);
  CHECK(regime_name(Regime::PushmiPullyu) == "pushmi-pullyu");
  CHECK(regime_name(Regime::SemiFKPP) == "semi-FKPP");
}

TEST_CASE("minimal speed prediction: 2 lambda up to chi=1, then the pushed branch") {
  CHECK(classify(build_power_family(2, 0.0)).minimal_speed_prediction == 2.0);
  CHECK(classify(build_power_family(2, 1.0)).minimal_speed_prediction == 2.0);
  CHECK(classify(build_power_family(2, 4.0)).minimal_speed_prediction ==
        doctest::Approx(2.5).epsilon(1e-15));  // lambda (sqrt(4) + 1/sqrt(4))
  CHECK(classify(build_power_family(2, 1.0, 3.0)).minimal_speed_prediction ==
        6.0);
  CHECK(classify(build_power_family(3, 9.0, 2.0)).minimal_speed_prediction ==
        doctest::Approx(2.0 * (3.0 + 1.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("evaluate_f guards the domain") {
  NonlinearityModel m = build_power_family(2, 1.0);
  CHECK_THROWS_AS((void)evaluate_f(m, -0.1), ConfigError);
  CHECK_THROWS_AS((void)evaluate_f(m, 1.1), ConfigError);
  CHECK(evaluate_f(m, 1.0 + 1e-13) == 0.0);  // slack clamps to the endpoint
  CHECK(evaluate_f(m, 0.5) == m.f(0.5));
}

TEST_CASE("validate flags a malformed flux shape") {
  // A(u) = u(2-u) is concave with A'(0) = 2: breaks A'(0)=0 and convexity
  Poly A(std::vector<double>{0.0, 2.0, -1.0});
  NonlinearityModel m = build_custom_poly(A, 1.0, 1.0);
  ValidationReport rep = validate(m);
  CHECK_FALSE(rep.ok());
  CHECK(rep.violations.size() >= 1);
}

TEST_CASE("custom non-polynomial model agrees with its polynomial twin") {
  NonlinearityModel poly = build_power_family(3, 0.7, 1.3);
  NonlinearityModel fn = build_custom(
      [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
      [](double u) { return 6.0 * u; }, 0.7, 1.3);
  for (double u = 0.0; u <= 1.0; u += 0.0625) {
    CHECK(fn.f(u) == doctest::Approx(poly.f(u)).epsilon(1e-13));
    CHECK(fn.alpha(u) == doctest::Approx(poly.alpha(u)).epsilon(1e-12));
  }
  CHECK(chi_fkpp(fn) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("voting family builds the sparse flux sum") {
  // A(u) = 0.25 u^2 + 0.75 u^4
  NonlinearityModel m =
      build_voting_family({{2, 0.25}, {4, 0.75}}, 1.0, 0.5);
  for (double u : {0.0, 0.3, 0.7, 1.0})
    CHECK(m.A(u) ==
          doctest::Approx(0.25 * u * u + 0.75 * std::pow(u, 4))
              .epsilon(1e-14));
  CHECK(validate(m).ok());
  CHECK_THROWS_AS(build_voting_family({{2, 0.5}, {3, 0.1}}, 1.0, 0.0),
                  ConfigError);  // weights must sum to 1
}

TEST_CASE("recover_decomposition inverts the pushmi-pullyu slope") {
  // eta(u) = u - u^2 with c = 2, lambda = 1 recovers chi = 1, A = u^2
  std::vector<double> us, eta;
  for (int i = 0; i <= 64; ++i) {
    double u = static_cast<double>(i) / 64.0;
    us.push_back(u);
    eta.push_back(u - u * u);
  }
  RecoveredDecomposition rec = recover_decomposition(us, eta, 2.0, 1.0);
  CHECK(rec.chi == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < us.size(); ++i)
    CHECK(rec.A_values[i] ==
          doctest::Approx(us[i] * us[i]).epsilon(1e-10));
  // grid recovery of A = u^2 always reports a discrete slope of one grid
  // spacing at the origin; nothing else may be flagged
  REQUIRE(rec.report.violations.size() == 1);
  CHECK(rec.report.violations[0].invariant == "A'(0)=0");
  CHECK(rec.report.violations[0].value ==
        doctest::Approx(1.0 / 64.0).epsilon(1e-12));

  // eta(u) = 2(u - u^2) with c = 2.5 recovers the pushed chi = 4, A = u^2
  std::vector<double> eta4;
  for (double u : us) eta4.push_back(2.0 * (u - u * u));
  RecoveredDecomposition rec4 = recover_decomposition(us, eta4, 2.5, 1.0);
  CHECK(rec4.chi == doctest::Approx(4.0).epsilon(1e-12));
  for (std::size_t i = 0; i < us.size(); ++i)
    CHECK(rec4.A_values[i] ==
          doctest::Approx(us[i] * us[i]).epsilon(1e-10));
}
