// Timing comparison of the parallel field kernels against the serial
// reference implementations. Not part of the test suite.

#include <chrono>
#include <cstdio>
#include <random>

#include "vimflow/operators.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace vimflow;

namespace {

ScalarField random_field(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values) v = dist(rng);
  return f;
}

template <class F>
double time_best_of(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto tic = std::chrono::steady_clock::now();
    body();
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    if (sec < best) best = sec;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-16s serial %8.4f ms   parallel %8.4f ms   speedup %5.2fx\n", name,
              serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
  GridSpec g;
  g.n1 = 96; g.n2 = 96; g.n3 = 96; g.nt = 8;
  g.h1 = g.h2 = g.h3 = 0.01;
  g.dt = 0.01;
  const ScalarField f = random_field(g, 42);
  ScalarField sink(g);

#ifdef _OPENMP
  std::printf("grid %zux%zux%zux%zu, %d threads\n", g.n1, g.n2, g.n3, g.nt,
              omp_get_max_threads());
#else
  std::printf("grid %zux%zux%zux%zu, OpenMP disabled\n", g.n1, g.n2, g.n3, g.nt);
#endif

  const int reps = 5;
  report("ddx",
         time_best_of(reps, [&] { sink = ref::ddx(f, Axis::X1); }),
         time_best_of(reps, [&] { sink = ddx(f, Axis::X1); }));
  report("d2",
         time_best_of(reps, [&] { sink = ref::d2(f, Axis::X2); }),
         time_best_of(reps, [&] { sink = d2(f, Axis::X2); }));
  report("laplacian",
         time_best_of(reps, [&] { sink = ref::laplacian(f); }),
         time_best_of(reps, [&] { sink = laplacian(f); }));
  report("prefix_integral",
         time_best_of(reps, [&] { sink = ref::prefix_integral(f, Axis::X1); }),
         time_best_of(reps, [&] { sink = prefix_integral(f, Axis::X1); }));

  volatile double keep = 0.0;
  report("norm_l2",
         time_best_of(reps, [&] { keep = ref::norm_l2(f); }),
         time_best_of(reps, [&] { keep = norm_l2(f); }));
  (void)keep;
  return 0;
}
