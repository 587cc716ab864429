#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rdlab/poly.hpp"

namespace rdlab {

// Reaction term family f(u) = lambda^2 (u - A(u)) (1 + chi A'(u)) built from a
// flux-shape function A: [0,1] -> [0,1] that is increasing and convex with
// A(0)=0, A(1)=1, A'(0)=0. A is supplied with analytic first and second
// derivatives; models built from polynomials carry expanded coefficients for
// fast inner-loop evaluation.
struct NonlinearityModel {
  bool is_poly = true;
  Poly A_poly, Ap_poly, App_poly;       // A, A', A''
  Poly f_poly, fp_poly;                 // f, f'
  Poly alpha_poly, alphap_poly;         // alpha = A(u)/u and alpha'
  std::function<double(double)> A_fn, Ap_fn, App_fn;  // non-polynomial models

  double chi = 0.0;
  double lambda = 1.0;  // sqrt(f'(0))

  std::string family;  // "power" | "voting" | "custom-poly" | "custom"
  int power_n = 0;
  std::vector<std::pair<int, double>> voting_coeffs;

  double A(double u) const { return is_poly ? A_poly(u) : A_fn(u); }
  double Ap(double u) const { return is_poly ? Ap_poly(u) : Ap_fn(u); }
  double App(double u) const { return is_poly ? App_poly(u) : App_fn(u); }
  double f(double u) const {
    if (is_poly) return f_poly(u);
    return lambda * lambda * (u - A_fn(u)) * (1.0 + chi * Ap_fn(u));
  }
  double f_prime(double u) const;
  double f_prime0() const { return lambda * lambda; }
  // alpha(u) = A(u)/u with the removable singularity alpha(0) = 0 and
  // alpha'(0) = A''(0)/2 filled in by limits.
  double alpha(double u) const;
  double alpha_prime(double u) const;
};

NonlinearityModel build_power_family(int n, double chi, double lambda = 1.0);
NonlinearityModel build_voting_family(
    const std::vector<std::pair<int, double>>& coeffs, double lambda = 1.0,
    double chi = 0.0);
NonlinearityModel build_custom_poly(const Poly& A, double chi, double lambda);
NonlinearityModel build_custom(std::function<double(double)> A,
                               std::function<double(double)> Ap,
                               std::function<double(double)> App, double chi,
                               double lambda);

// Checked evaluation (rejects u outside [0,1] beyond a 1e-12 slack).
double evaluate_f(const NonlinearityModel& m, double u);

struct Violation {
  std::string invariant;
  double location;
  double value;
};
struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};
// Grid validation of the model invariants; violations are report entries,
// never exceptions (grid_points < 64 is a usage error though).
ValidationReport validate(const NonlinearityModel& m, int grid_points = 512);

// Threshold min_u A(u) / (A'(u) (u - A(u))) on (0,1), with the u -> 0 limit
// handled analytically; always <= 1/2 for valid models.
double chi_fkpp(const NonlinearityModel& m);

enum class Regime { FKPP, SemiFKPP, PushmiPullyu, Pushed };
struct RegimeClassification {
  Regime regime;
  double chi_fkpp;
  double minimal_speed_prediction;
};
RegimeClassification classify(const NonlinearityModel& m);
std::string regime_name(Regime r);

// Inverse construction: given a minimal-speed slope function eta(u) with
// c >= 2 lambda, take chi as the larger root of c/lambda = 1/sqrt(chi) +
// sqrt(chi) and A(u) = u - eta(u)/(lambda sqrt(chi)). The report flags (but
// does not fail on) shape violations of the recovered A.
struct RecoveredDecomposition {
  double chi;
  std::vector<double> u_grid;
  std::vector<double> A_values;
  ValidationReport report;
};
RecoveredDecomposition recover_decomposition(const std::vector<double>& u_grid,
                                             const std::vector<double>& eta,
                                             double c_star, double lambda);

}  // namespace rdlab
