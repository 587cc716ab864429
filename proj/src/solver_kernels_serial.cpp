#include "rdlab/solver_kernels.hpp"

#include <limits>

namespace rdlab::kernels {

namespace {

inline double horner(const double* c, int deg, double u) {
  double v = c[deg];
  for (int j = deg - 1; j >= 0; --j) v = v * u + c[j];
  return v;
}

}  // namespace

void rhs_rde_serial(const double* u, double* out, int n, double inv_dx2,
                    const double* fc, int fdeg) {
  out[0] = 0.0;
  out[n - 1] = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
    out[i] = lap + horner(fc, fdeg, u[i]);
  }
}

void rhs_rcl_serial(const double* u, double* scratch_a, double* out, int n,
                    double inv_dx2, double inv_dx, const double* ac, int adeg) {
  for (int i = 0; i < n; ++i) scratch_a[i] = horner(ac, adeg, u[i]);
  out[0] = 0.0;
  out[n - 1] = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
    const double flux = (scratch_a[i] - scratch_a[i - 1]) * inv_dx;
    out[i] = lap - flux + (u[i] - scratch_a[i]);
  }
}

void euler_stage_serial(const double* u, const double* k, double* us, int n,
                        double dt) {
  for (int i = 0; i < n; ++i) us[i] = u[i] + dt * k[i];
}

CombineRange heun_combine_serial(const double* u, const double* k1,
                                 const double* k2, double* un, int n,
                                 double dt) {
  const double half = 0.5 * dt;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  bool nan_seen = false;
  for (int i = 0; i < n; ++i) {
    const double v = u[i] + half * (k1[i] + k2[i]);
    nan_seen = nan_seen | (v != v);
    if (v < mn) mn = v;
    if (v > mx) mx = v;
    un[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
  if (nan_seen) {
    mn = std::numeric_limits<double>::quiet_NaN();
    mx = std::numeric_limits<double>::quiet_NaN();
  }
  return {mn, mx};
}

}  // namespace rdlab::kernels
