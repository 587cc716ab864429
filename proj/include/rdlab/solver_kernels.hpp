#pragma once

namespace rdlab::kernels {

// Right sides on interior nodes i in [1, n-2]; out[0] and out[n-1] are set to
// zero (Dirichlet values are pinned by the stage updates). Polynomial
// coefficients are lowest-degree-first (Horner evaluation).

// out = u_xx + f(u)
void rhs_rde_serial(const double* u, double* out, int n, double inv_dx2,
                    const double* fc, int fdeg);
void rhs_rde_omp(const double* u, double* out, int n, double inv_dx2,
                 const double* fc, int fdeg);

// out = u_xx - (A(u_i) - A(u_{i-1}))/dx + (u - A(u)); scratch holds A(u).
void rhs_rcl_serial(const double* u, double* scratch_a, double* out, int n,
                    double inv_dx2, double inv_dx, const double* ac, int adeg);
void rhs_rcl_omp(const double* u, double* scratch_a, double* out, int n,
                 double inv_dx2, double inv_dx, const double* ac, int adeg);

// us = u + dt*k (forward Euler stage; endpoints copied unchanged).
void euler_stage_serial(const double* u, const double* k, double* us, int n,
                        double dt);
void euler_stage_omp(const double* u, const double* k, double* us, int n,
                     double dt);

// un = clamp01(u + dt/2 (k1 + k2)); returns pre-clamp min/max over all nodes
// so the caller can enforce the excursion policy (NaN poisons the range).
struct CombineRange {
  double min_before;
  double max_before;
};
CombineRange heun_combine_serial(const double* u, const double* k1,
                                 const double* k2, double* un, int n,
                                 double dt);
CombineRange heun_combine_omp(const double* u, const double* k1,
                              const double* k2, double* un, int n, double dt);

bool omp_enabled();

}  // namespace rdlab::kernels
