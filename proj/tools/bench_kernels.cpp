// Timing comparison of the integration kernels: serial reference vs the
// OpenMP-parallel path, across grid sizes and both equations. The two paths
// must agree bit-for-bit, so the benchmark also cross-checks the fields.
//
//   bench_kernels [steps-per-case]     (default 2000)
#include <rdlab/nonlinearity.hpp>
#include <rdlab/solver.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rdlab;

namespace {

double seconds_for(FieldState state, const NonlinearityModel& model,
                   double dt, long long steps, bool use_omp,
                   FieldState* out) {
  const auto t0 = std::chrono::steady_clock::now();
  for (long long k = 0; k < steps; ++k) step(state, model, dt, nullptr, 0.5, use_omp);
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (out) *out = std::move(state);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  const long long steps = argc > 1 ? std::atoll(argv[1]) : 2000;
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("integration kernel benchmark: %lld steps/case, %d thread(s)\n",
              steps, threads);
  std::printf("%-6s %10s %14s %14s %10s %12s\n", "eq", "nodes", "serial[ms]",
              "parallel[ms]", "speedup", "max|diff|");

  NonlinearityModel model = build_power_family(2, 1.0, 1.0);
  for (Equation eq : {Equation::RDE, Equation::RCL}) {
    for (double span : {200.0, 800.0, 3200.0}) {
      WindowSpec window{span / 2.0, span / 2.0};
      const double dx = 0.05;
      const double dt = 0.2 * dx * dx;
      FieldState init = make_initial_step(model, 0.0, 5.0, eq, dx, window);

      FieldState a, b;
      const double ts = seconds_for(init, model, dt, steps, false, &a);
      const double tp = seconds_for(init, model, dt, steps, true, &b);
      double diff = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        diff = std::max(diff, std::abs(a.u[i] - b.u[i]));
      std::printf("%-6s %10zu %14.2f %14.2f %9.2fx %12.3e\n",
                  equation_name(eq).c_str(), a.size(), ts * 1e3, tp * 1e3,
                  ts / tp, diff);
      if (diff != 0.0) {
        std::fprintf(stderr,
                     "kernel mismatch: serial and parallel paths disagree\n");
        return 1;
      }
    }
  }
  return 0;
}
