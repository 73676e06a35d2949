// Compares the serial dense reference against the parallel dense kernel and
// the hierarchical fast path (serial and OpenMP) across depths.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ultracoral/vladimirov.hpp"

using namespace ultracoral;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(int reps, const auto& fn) {
  fn();  // warm-up
  auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  std::chrono::duration<double, std::milli> elapsed = Clock::now() - start;
  return elapsed.count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int m_min = 6, m_max = 12;
  double alpha = 2.0;
  long long p = 2;
  int reps = 10;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    double value = std::atof(argv[i + 1]);
    if (flag == "--m-min") m_min = static_cast<int>(value);
    else if (flag == "--m-max") m_max = static_cast<int>(value);
    else if (flag == "--alpha") alpha = value;
    else if (flag == "--p") p = static_cast<long long>(value);
    else if (flag == "--reps") reps = static_cast<int>(value);
    else {
      std::fprintf(stderr, "usage: bench_apply [--m-min N] [--m-max N] [--alpha A] [--p P] [--reps R]\n");
      return 1;
    }
  }

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not enabled\n");
#endif
  std::printf("p=%lld alpha=%g reps=%d\n", p, alpha, reps);
  std::printf("%4s %8s %12s %12s %12s %12s %10s %10s\n", "m", "n", "dense ms",
              "dense-omp", "fast ms", "fast-omp", "fast-spdup", "omp-spdup");

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  for (int m = m_min; m <= m_max; ++m) {
    GeneratorMatrix gen = build_generator(p, m, alpha);
    std::vector<double> x(gen.size);
    for (double& v : x) v = dist(rng);

    double dense_ms = time_ms(reps, [&] { apply_dense(gen, x); });
    double dense_omp_ms = time_ms(reps, [&] { apply_dense_parallel(gen, x); });
    double fast_ms = time_ms(reps, [&] { apply_fast(p, m, alpha, x, false); });
    double fast_omp_ms = time_ms(reps, [&] { apply_fast(p, m, alpha, x, true); });

    std::printf("%4d %8zu %12.4f %12.4f %12.4f %12.4f %10.1f %10.2f\n", m, gen.size,
                dense_ms, dense_omp_ms, fast_ms, fast_omp_ms, dense_ms / fast_ms,
                fast_ms / fast_omp_ms);
  }
  return 0;
}
