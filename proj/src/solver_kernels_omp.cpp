#include "rdlab/solver_kernels.hpp"

#include <limits>

#ifdef RDLAB_HAVE_OPENMP
#include <omp.h>
#endif

// Every kernel here performs exactly the same arithmetic per node as its
// serial twin; parallelism only partitions the index range, so the results
// are bitwise identical (the range reductions are order-insensitive).

namespace rdlab::kernels {

namespace {

inline double horner(const double* c, int deg, double u) {
  double v = c[deg];
  for (int j = deg - 1; j >= 0; --j) v = v * u + c[j];
  return v;
}

}  // namespace

bool omp_enabled() {
#ifdef RDLAB_HAVE_OPENMP
  return omp_get_max_threads() > 1;
#else
  return false;
#endif
}

void rhs_rde_omp(const double* u, double* out, int n, double inv_dx2,
                 const double* fc, int fdeg) {
  out[0] = 0.0;
  out[n - 1] = 0.0;
#ifdef RDLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 1; i < n - 1; ++i) {
    const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
    out[i] = lap + horner(fc, fdeg, u[i]);
  }
}

void rhs_rcl_omp(const double* u, double* scratch_a, double* out, int n,
                 double inv_dx2, double inv_dx, const double* ac, int adeg) {
#ifdef RDLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) scratch_a[i] = horner(ac, adeg, u[i]);
  out[0] = 0.0;
  out[n - 1] = 0.0;
#ifdef RDLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 1; i < n - 1; ++i) {
    const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
    const double flux = (scratch_a[i] - scratch_a[i - 1]) * inv_dx;
    out[i] = lap - flux + (u[i] - scratch_a[i]);
  }
}

void euler_stage_omp(const double* u, const double* k, double* us, int n,
                     double dt) {
#ifdef RDLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) us[i] = u[i] + dt * k[i];
}

CombineRange heun_combine_omp(const double* u, const double* k1,
                              const double* k2, double* un, int n, double dt) {
  const double half = 0.5 * dt;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  int nan_flag = 0;
#ifdef RDLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static) reduction(min : mn) \
    reduction(max : mx) reduction(| : nan_flag)
#endif
  for (int i = 0; i < n; ++i) {
    const double v = u[i] + half * (k1[i] + k2[i]);
    nan_flag = nan_flag | (v != v ? 1 : 0);
    if (v < mn) mn = v;
    if (v > mx) mx = v;
    un[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
  if (nan_flag) {
    mn = std::numeric_limits<double>::quiet_NaN();
    mx = std::numeric_limits<double>::quiet_NaN();
  }
  return {mn, mx};
}

}  // namespace rdlab::kernels
