// Throughput benchmark: serial reference vs OpenMP replicate loop.
// Both paths produce bit-identical estimates; this target only measures time.

#include <chrono>
#include <cstdio>

#include "rwrs/mc.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds(void (*)() = nullptr) { return 0; }

template <typename F>
double time_of(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
    using namespace rwrs;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("threads available: %d\n\n", threads);
    std::printf("%-24s %10s %12s %12s %9s\n", "workload", "steps", "serial[s]", "parallel[s]",
                "speedup");

    struct Case {
        const char* name;
        int d;
        int64_t n;
        int64_t reps;
        bool cond;
    };
    const Case cases[] = {
        {"cond-gaussian d=2", 2, 1 << 14, 2048, true},
        {"cond-gaussian d=1", 1, 1 << 12, 16384, true},
        {"naive d=1", 1, 1 << 12, 8192, false},
    };
    for (const auto& c : cases) {
        const StepKernel k = make_srw(c.d);
        const SceneryModel m = SceneryModel::gaussian(1.0);
        TailEstimate serial, parallel;
        const double ts = time_of([&] {
            serial = c.cond ? tail_cond_gaussian(k, 1.0, c.n, 0.1, c.reps, 42, false)
                            : tail_naive(k, m, c.n, 0.1, c.reps, 42, false);
        });
        const double tp = time_of([&] {
            parallel = c.cond ? tail_cond_gaussian(k, 1.0, c.n, 0.1, c.reps, 42, true)
                              : tail_naive(k, m, c.n, 0.1, c.reps, 42, true);
        });
        if (serial.log_estimate != parallel.log_estimate) {
            std::printf("MISMATCH between serial and parallel results!\n");
            return 1;
        }
        std::printf("%-24s %10lld %12.3f %12.3f %8.2fx\n", c.name,
                    static_cast<long long>(c.n * c.reps), ts, tp, ts / tp);
    }
    (void)seconds();
    return 0;
}
