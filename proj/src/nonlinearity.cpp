#include "rdlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Fill the derived polynomial fields from A_poly, chi, lambda.
void finish_poly_model(NonlinearityModel& m) {
  m.Ap_poly = m.A_poly.derivative();
  m.App_poly = m.Ap_poly.derivative();
  // f = lambda^2 (u - A) (1 + chi A')
  const Poly u = Poly::monomial(1);
  m.f_poly = (u - m.A_poly) * (Poly::constant(1.0) + m.Ap_poly * m.chi) *
             (m.lambda * m.lambda);
  m.f_poly.trim(0.0);
  m.fp_poly = m.f_poly.derivative();
  // alpha = A/u: shift coefficients down one degree (constant term is zero
  // for every valid A; any stray constant is dropped).
  std::vector<double> ac = m.A_poly.coeffs();
  std::vector<double> al(ac.begin() + std::min<size_t>(1, ac.size()), ac.end());
  if (al.empty()) al.push_back(0.0);
  m.alpha_poly = Poly(al);
  m.alphap_poly = m.alpha_poly.derivative();
}

}  // namespace

double NonlinearityModel::f_prime(double u) const {
  if (is_poly) return fp_poly(u);
  const double a = A_fn(u), ap = Ap_fn(u), app = App_fn(u);
  return lambda * lambda *
         ((1.0 - ap) * (1.0 + chi * ap) + (u - a) * chi * app);
}

double NonlinearityModel::alpha(double u) const {
  if (is_poly) return alpha_poly(u);
  if (std::abs(u) < 1e-8) return 0.5 * App_fn(0.0) * u;
  return A_fn(u) / u;
}

double NonlinearityModel::alpha_prime(double u) const {
  if (is_poly) return alphap_poly(u);
  if (std::abs(u) < 1e-6) return 0.5 * App_fn(0.0);
  return (Ap_fn(u) * u - A_fn(u)) / (u * u);
}

NonlinearityModel build_power_family(int n, double chi, double lambda) {
  if (n < 2) throw ConfigError("power family needs exponent n >= 2 (A'(0)=0)");
  if (chi < 0.0) throw ConfigError("chi must be nonnegative");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  NonlinearityModel m;
  m.is_poly = true;
  m.A_poly = Poly::monomial(n);
  m.chi = chi;
  m.lambda = lambda;
  m.family = "power";
  m.power_n = n;
  finish_poly_model(m);
  return m;
}

NonlinearityModel build_voting_family(
    const std::vector<std::pair<int, double>>& coeffs, double lambda,
    double chi) {
  if (coeffs.empty()) throw ConfigError("voting family needs coefficients");
  double sum = 0.0;
  int max_k = 0;
  for (const auto& [k, a] : coeffs) {
    if (k < 2) throw ConfigError("voting family powers must be >= 2");
    if (a < 0.0) throw ConfigError("voting family coefficients must be >= 0");
    sum += a;
    max_k = std::max(max_k, k);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("voting family coefficients must sum to 1");
  if (chi < 0.0) throw ConfigError("chi must be nonnegative");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  NonlinearityModel m;
  m.is_poly = true;
  std::vector<double> c(static_cast<size_t>(max_k) + 1, 0.0);
  for (const auto& [k, a] : coeffs) c[static_cast<size_t>(k)] += a;
  m.A_poly = Poly(std::move(c));
  m.chi = chi;
  m.lambda = lambda;
  m.family = "voting";
  m.voting_coeffs = coeffs;
  finish_poly_model(m);
  return m;
}

NonlinearityModel build_custom_poly(const Poly& A, double chi, double lambda) {
  if (chi < 0.0) throw ConfigError("chi must be nonnegative");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  NonlinearityModel m;
  m.is_poly = true;
  m.A_poly = A;
  m.chi = chi;
  m.lambda = lambda;
  m.family = "custom-poly";
  finish_poly_model(m);
  return m;
}

NonlinearityModel build_custom(std::function<double(double)> A,
                               std::function<double(double)> Ap,
                               std::function<double(double)> App, double chi,
                               double lambda) {
  if (chi < 0.0) throw ConfigError("chi must be nonnegative");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  NonlinearityModel m;
  m.is_poly = false;
  m.A_fn = std::move(A);
  m.Ap_fn = std::move(Ap);
  m.App_fn = std::move(App);
  m.chi = chi;
  m.lambda = lambda;
  m.family = "custom";
  return m;
}

double evaluate_f(const NonlinearityModel& m, double u) {
  if (u < -1e-12 || u > 1.0 + 1e-12)
    throw ConfigError("evaluate_f: u outside [0,1]");
  return m.f(std::clamp(u, 0.0, 1.0));
}

ValidationReport validate(const NonlinearityModel& m, int grid_points) {
  if (grid_points < 64) throw ConfigError("validate: need grid_points >= 64");
  ValidationReport rep;
  auto flag = [&](const std::string& name, double loc, double val) {
    rep.violations.push_back({name, loc, val});
  };
  const double e0 = 1e-10;  // endpoint identity tolerance
  const double es = 1e-8;   // monotonicity/convexity slack on grids
  if (std::abs(m.A(0.0)) > e0) flag("A(0)=0", 0.0, m.A(0.0));
  if (std::abs(m.A(1.0) - 1.0) > e0) flag("A(1)=1", 1.0, m.A(1.0));
  if (std::abs(m.Ap(0.0)) > e0) flag("A'(0)=0", 0.0, m.Ap(0.0));
  if (std::abs(m.f(0.0)) > e0) flag("f(0)=0", 0.0, m.f(0.0));
  if (std::abs(m.f(1.0)) > e0) flag("f(1)=0", 1.0, m.f(1.0));
  const double fp0 = m.f_prime(0.0);
  if (std::abs(fp0 - m.f_prime0()) > 1e-8 * std::max(1.0, m.f_prime0()))
    flag("f'(0)=lambda^2", 0.0, fp0);
  const int g = grid_points;
  for (int i = 1; i < g; ++i) {
    const double u = static_cast<double>(i) / g;
    const double ap = m.Ap(u), app = m.App(u);
    if (ap < -es) flag("A' >= 0", u, ap);
    if (app < -es) flag("A'' >= 0", u, app);
    const double alp = m.alpha_prime(u);
    if (alp < -es) flag("alpha' >= 0", u, alp);
    // alpha'' = (A'' u^2 - 2 A' u + 2 A) / u^3
    const double alpp = (app * u * u - 2.0 * ap * u + 2.0 * m.A(u)) / (u * u * u);
    if (alpp < -es) flag("alpha'' >= 0", u, alpp);
    const double fv = m.f(u);
    if (fv <= 1e-14) flag("f > 0 on (0,1)", u, fv);
  }
  return rep;
}

double chi_fkpp(const NonlinearityModel& m) {
  // G(u) = A / (A' (u - A)); the u -> 0 limit is 1/p with p the vanishing
  // order of A at 0 (p = 2 when A''(0) > 0).
  double best;
  if (m.is_poly) {
    const auto& c = m.A_poly.coeffs();
    size_t p = 0;
    for (size_t k = 1; k < c.size(); ++k) {
      if (std::abs(c[k]) > 1e-14) {
        p = k;
        break;
      }
    }
    best = p >= 2 ? 1.0 / static_cast<double>(p) : 1.0;
  } else {
    const double app0 = m.App_fn(0.0);
    if (app0 > 1e-12) {
      best = 0.5;
    } else {
      const double u = 1e-7;
      best = m.A(u) / (m.Ap(u) * (u - m.A(u)));
    }
  }
  auto consider = [&](double u) {
    const double a = m.A(u), ap = m.Ap(u);
    const double d = ap * (u - a);
    if (d > 1e-300 && a > 0.0) best = std::min(best, a / d);
  };
  // Log-spaced probes near both endpoints plus a uniform interior grid.
  for (int i = 0; i <= 240; ++i) consider(std::pow(10.0, -6.0 + 5.0 * i / 240.0));
  for (int i = 1; i < 4096; ++i) consider(static_cast<double>(i) / 4096.0);
  for (int i = 0; i <= 240; ++i)
    consider(1.0 - std::pow(10.0, -6.0 + 5.0 * i / 240.0));
  return best;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::FKPP: return "FKPP";
    case Regime::SemiFKPP: return "semi-FKPP";
    case Regime::PushmiPullyu: return "pushmi-pullyu";
    case Regime::Pushed: return "pushed";
  }
  return "?";
}

RegimeClassification classify(const NonlinearityModel& m) {
  RegimeClassification rc;
  rc.chi_fkpp = chi_fkpp(m);
  const double chi = m.chi;
  if (std::abs(chi - 1.0) <= 1e-12) {
    rc.regime = Regime::PushmiPullyu;
  } else if (chi > 1.0) {
    rc.regime = Regime::Pushed;
  } else if (chi <= rc.chi_fkpp + 1e-12) {
    rc.regime = Regime::FKPP;
  } else {
    rc.regime = Regime::SemiFKPP;
  }
  rc.minimal_speed_prediction =
      chi <= 1.0 ? 2.0 * m.lambda
                 : m.lambda * (1.0 / std::sqrt(chi) + std::sqrt(chi));
  return rc;
}

RecoveredDecomposition recover_decomposition(const std::vector<double>& u_grid,
                                             const std::vector<double>& eta,
                                             double c_star, double lambda) {
  if (u_grid.size() != eta.size() || u_grid.size() < 3)
    throw ConfigError("recover_decomposition: bad tables");
  const double ratio = c_star / lambda;
  if (ratio < 2.0 - 1e-12)
    throw ConfigError("recover_decomposition: c_star below 2*lambda");
  const double disc = std::max(0.0, ratio * ratio - 4.0);
  const double s = 0.5 * (ratio + std::sqrt(disc));  // sqrt(chi), larger root
  RecoveredDecomposition out;
  out.chi = s * s;
  out.u_grid = u_grid;
  out.A_values.resize(u_grid.size());
  for (size_t i = 0; i < u_grid.size(); ++i)
    out.A_values[i] = u_grid[i] - eta[i] / (lambda * s);
  // Shape report on the tabulated A (finite differences; tolerant of the
  // numerical noise a tabulated eta carries).
  auto flag = [&](const std::string& n, double loc, double v) {
    out.report.violations.push_back({n, loc, v});
  };
  const auto& U = out.u_grid;
  const auto& A = out.A_values;
  const size_t n = U.size();
  if (std::abs(A.front()) > 1e-8) flag("A(0)=0", U.front(), A.front());
  if (std::abs(A.back() - 1.0) > 1e-8) flag("A(1)=1", U.back(), A.back());
  const double h0 = U[1] - U[0];
  const double ap0 = (A[1] - A[0]) / h0;
  if (std::abs(ap0) > 1e-3) flag("A'(0)=0", U.front(), ap0);
  for (size_t i = 0; i + 1 < n; ++i) {
    const double d = (A[i + 1] - A[i]) / (U[i + 1] - U[i]);
    if (d < -1e-6) flag("A' >= 0", U[i], d);
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    const double h = U[i + 1] - U[i];
    const double sd = (A[i + 1] - 2.0 * A[i] + A[i - 1]) / (h * h);
    if (sd < -1e-4) flag("A'' >= 0", U[i], sd);
  }
  return out;
}

}  // namespace rdlab
