#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "rdlab/interp.hpp"
#include "rdlab/nonlinearity.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/wave.hpp"

namespace rdlab {

// All spatial derivatives here use the same second-order stencils as the
// solver (central u_x / u_xx), so discrete identities close to stencil
// accuracy instead of mixing orders. Time derivatives use centered
// differences of three closely spaced snapshots.

// --- lab-frame alignment -----------------------------------------------------

// Overlap of two states on the shared lab lattice: a.u[i0+k] and b.u[j0+k]
// sit at the same lab position for k in [0, count). ConfigError if the
// states' lattices are incompatible (different dx or offset mismatch).
struct Overlap {
  std::size_t i0 = 0, j0 = 0, count = 0;
};
Overlap lab_overlap(const FieldState& a, const FieldState& b);

// --- shape defect ------------------------------------------------------------

struct ShapeDefectField {
  Equation equation = Equation::RDE;
  double t = 0.0;
  double frame_offset = 0.0;
  double dx = 0.0;
  std::vector<double> w;  // -u_x - eta(u), one value per node
  double min_w = 0.0;
  std::size_t argmin_w = 0;
  double x_lab(std::size_t i) const {
    return frame_offset + static_cast<double>(i) * dx;
  }
};

// w = -u_x - eta(u) nodewise (central u_x in the interior, one-sided
// second-order at the window edges).
ShapeDefectField shape_defect(const FieldState& state,
                              const WaveProfile& profile);

// --- weighted energy ---------------------------------------------------------

struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;  // (1/2) integral of e^{c xi} w^2, xi = x_lab - c t
  // Quadrature of e^{c xi} (dt u in the c-frame)^2; filled by energy_triple,
  // NaN when the record comes from a single snapshot.
  double dissipation = 0.0;
  double truncation = 0.0;  // last node's share of E (truncation bound)
};

// Trapezoid quadrature of (1/2) e^{c xi} w(xi)^2 over the window, computed
// through z = e^{c xi / 2} w to avoid spurious overflow.
EnergyRecord energy(const FieldState& state, const WaveProfile& profile,
                    double c);

// Dissipation side of dE/dt = -int e^{c xi} (dt u~)^2: the time derivative
// in the c-moving frame is (u_post - u_pre)/(t_post - t_pre) + c u_x(mid),
// evaluated on lab-aligned common nodes. Returns the quadrature value
// (positive number; dE/dt should be close to its negative).
double energy_dissipation(const FieldState& pre, const FieldState& mid,
                          const FieldState& post, double c);

// Energy at the mid snapshot with the dissipation field filled from the
// surrounding pair.
EnergyRecord energy_triple(const FieldState& pre, const FieldState& mid,
                           const FieldState& post, const WaveProfile& profile,
                           double c);

struct EnergyEquivalence {
  double E = 0.0;        // (1/2) int e^{c xi} (u_xi + eta(u))^2
  double E_tilde = 0.0;  // int e^{c xi} (u_xi^2/2 + V_c(u)), V_c = -c N_c + eta^2/2
  double boundary = 0.0; // [e^{c xi} N_c(u)] across the window (E = E~ + boundary)
  double difference = 0.0;  // E - E_tilde - boundary
  bool divergent = false;   // 2 lambda_c <= c: E~'s integrand does not decay
};

// Checks that the defect form and the action form of the energy agree once
// the boundary term of the integration by parts is accounted for. For
// pulled-type decay (2 lambda_c <= c) the action form does not converge and
// the record is flagged divergent instead.
EnergyEquivalence energy_equivalence(const FieldState& state,
                                     const WaveProfile& profile, double c);

// --- weighted Hopf-Cole transform -------------------------------------------

struct HopfColeResult {
  std::vector<double> x;  // lab positions of the common nodes (mid snapshot)
  std::vector<double> v;  // transform at the mid snapshot
  double residual_max = 0.0;  // most positive normalized heat residual
  double gamma_tail = 0.0;    // tail correction added to Gamma (mid snapshot)
};

// v = exp(x - 2 lambda t + sqrt(chi) Gamma) u, Gamma(x) = int_x^inf alpha(u).
// In lab coordinates the subsolution statement reads
//   V_t + 2 lambda V_x - V_xx <= 0,
// and the residual is reported normalized by exp(-(x - 2 lambda t +
// sqrt(chi) Gamma)) so it is comparable to f(u)-scale quantities.
HopfColeResult hopf_cole(const FieldState& pre, const FieldState& mid,
                         const FieldState& post,
                         const NonlinearityModel& model);

// Grid-error scale for hopf_cole: runs the same residual computation on an
// exact traveling wave translated at its own speed, sampled at the same
// (dx, dt-spacing, window), and returns 3x the observed positive residual
// excess (the transform is a strict subsolution away from the sharp case, so
// only the positive part measures grid error).
double hopf_cole_calibrate(const NonlinearityModel& model, double dx,
                           double dt_snapshot, const WindowSpec& window);

// Gradient identity v_x = -w e^{x - 2 lambda t + Gamma} (pushmi-pullyu only).
struct HopfColeGradient {
  double max_abs_error = 0.0;  // max over interior nodes of |e^{-phi} v_x + w|
  double max_vx = 0.0;         // most positive e^{-phi} v_x (<= 0 when w >= 0)
};
HopfColeGradient hopf_cole_gradient_error(const FieldState& state,
                                          const NonlinearityModel& model,
                                          const WaveProfile& profile);

// --- supersolution weight F and entropy ---------------------------------------

struct SupersolutionWeight {
  std::vector<double> u_grid;  // uniform on [0,1]
  std::vector<double> F;       // decreasing, concave, F(0)=1, F(1)=0
  std::shared_ptr<const MonotoneCubic> interp;  // cubic through the F values
  // H(u) = integral_0^u h, the bounded remainder of -log F after the
  // (1-u)^{1/alpha'(1)} factor is split off analytically.
  std::shared_ptr<const MonotoneCubic> h_integral;
  double alpha_prime_1 = 0.0;  // alpha'(1), sets the vanishing power at u=1
  // Evaluates F through the analytic split (exact power law at u -> 1, where
  // plain interpolation of the grid values loses all relative accuracy).
  double F_at(double u) const;
};

// F(u) = exp(-int_0^u alpha/eta_*), eta_* = u - A. Pushmi-pullyu models only
// (ConfigError otherwise). The integrable singularity at u=1 is split off
// analytically: F = (1-u)^{1/alpha'(1)} exp(-int_0^u h), h bounded.
SupersolutionWeight supersolution_F(const NonlinearityModel& model);

struct EntropyRecord {
  double t = 0.0;
  double Phi2 = 0.0;         // int phi^2 rho dx, phi = p/rho, p = e^x u-hat
  double dissipation = 0.0;  // 2 int phi_x^2 rho dx  (>= 0)
  double cut_x = 0.0;        // lab position of the left truncation cut
  std::size_t n_used = 0;
};

// Lab position of the leftmost node from which rho = F(u-hat) >= 1e-8 (the
// left tail, where rho underflows, is truncated away). NumericError if rho
// stays below the floor across the whole window.
double entropy_cut_position(const FieldState& state,
                            const SupersolutionWeight& weight);

// Relative-entropy functionals of the p-equation in the 2t-frame
// (x = x_lab - 2 t; requires lambda = 1). The 3-argument form takes an
// explicit cut so snapshot groups can share one truncation (computed from
// their center snapshot) and the inter-snapshot decrement compares identical
// spatial domains; the 2-argument form cuts at this state's own position.
EntropyRecord relative_entropy(const FieldState& state,
                               const SupersolutionWeight& weight, double cut_x);
EntropyRecord relative_entropy(const FieldState& state,
                               const SupersolutionWeight& weight);

// Weighted Nash doubling constant: max over nodes of
// rho-double-bar / (max{1, rho-bar^2} rho), with the unresolved left tail
// of the cumulative integrals seeded analytically from the local decay rate.
double nash_weight_condition(const FieldState& state,
                             const SupersolutionWeight& weight);

// --- exponential moment and tail monitors -------------------------------------

struct MomentRecord {
  double I = 0.0;              // int e^{x - 2t + (1/2) log(1+t)} u dx
  double edge_fraction = 0.0;  // last-node integrand relative to I
  bool truncated = false;      // edge_fraction > 1e-12
};

// I(t) in the 2t - (1/2)log(1+t) frame (requires lambda = 1).
MomentRecord exponential_moment(const FieldState& state);

// Envelope constant sup_{x>1} w(t, x+m) * t / (x e^{-x - x^2/(5t)}).
double w_tail_monitor(const ShapeDefectField& sdf, double t, double m);

// Tail sandwich constants against 1 - C e^{a'(1) x} <= u(x+m) <= C e^{-x}:
// returns (C_left, C_right) = sup over behind/ahead-of-front nodes. Behind
// the front only nodes where 1-u is still resolved beyond rounding (>= 1e-13)
// enter the sup; further left the cancellation noise in 1-u would dominate.
struct TailSandwich {
  double C_left = 0.0;
  double C_right = 0.0;
};
TailSandwich tail_sandwich_constants(const FieldState& state, double m,
                                     double alpha_prime_1);

// --- discrete residual identities ---------------------------------------------

// Max over common interior nodes of
//   |u_t + (A(u))_x - u_xx - (u - A(u)) + A'(u) w|
// with central stencils and the centered time derivative of the triple.
double forced_rcl_residual_max(const FieldState& pre, const FieldState& mid,
                               const FieldState& post,
                               const NonlinearityModel& model,
                               const WaveProfile& profile);

// Most positive value of the same residual u_t + (A(u))_x - u_xx - (u-A(u))
// (subsolution sign check; should be <= small grid slack when w >= 0).
double forced_rcl_residual_sup(const FieldState& pre, const FieldState& mid,
                               const FieldState& post,
                               const NonlinearityModel& model);

// --- discrete p-mass ----------------------------------------------------------

// log of M_d = sum_i (1+dx)^{x_i/dx} u_i dx, evaluated stably. This weight
// is the discrete adjoint of the scheme's flux+diffusion+reaction operator:
// under exact arithmetic M_d grows at exactly rate 1 + 1/(1+dx) per unit
// time (for RCL with lambda=1), so the measured drift isolates the
// time-stepping error.
double discrete_p_log_mass(const FieldState& state);
double discrete_p_mass_rate(double dx);

}  // namespace rdlab
