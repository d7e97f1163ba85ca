// Benchmark comparing the serial reference Monte-Carlo containment kernel
// against the OpenMP one, plus the scenario audit matrix run serially vs
// parallel over criterion combinations.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sme/harness/montecarlo.hpp"
#include "sme/harness/runner.hpp"
#include "sme/rng.hpp"

using namespace sme;
using namespace sme::harness;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(F&& f, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        f();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

Ellipsoid bench_ellipsoid(int n) {
    Rng rng(99);
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform(-1.0, 1.0);
    return make_ellipsoid(c, SymMatrix(Mat(g * g.transpose() + 0.3 * Mat::Identity(n, n))), 1.2);
}

}  // namespace

int main(int argc, char** argv) {
    int n = 6;
    int count = 200000;
    int reps = 5;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const int value = std::atoi(argv[i + 1]);
        if (flag == "--n") n = value;
        else if (flag == "--count") count = value;
        else if (flag == "--reps") reps = value;
    }

#ifdef _OPENMP
    std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif

    // Kernel benchmark: containment of `count` sampled points.
    Ellipsoid e = bench_ellipsoid(n);
    auto sampler = ellipsoid_sampler(e);
    volatile double sink = 0.0;
    const double t_serial = time_ms(
        [&] { sink = containment_fraction(e, sampler, count, 7, 1e-9, Exec::Serial); }, reps);
    const double t_parallel = time_ms(
        [&] { sink = containment_fraction(e, sampler, count, 7, 1e-9, Exec::Parallel); }, reps);
    const double f_serial = containment_fraction(e, sampler, count, 7, 1e-9, Exec::Serial);
    const double f_parallel = containment_fraction(e, sampler, count, 7, 1e-9, Exec::Parallel);
    std::printf("containment kernel  n=%d count=%d\n", n, count);
    std::printf("  serial   %10.2f ms  fraction %.6f\n", t_serial, f_serial);
    std::printf("  parallel %10.2f ms  fraction %.6f  speedup %.2fx\n", t_parallel, f_parallel,
                t_serial / t_parallel);
    if (f_serial != f_parallel) {
        std::printf("  MISMATCH between serial and parallel fractions\n");
        return 1;
    }

    // Batch benchmark: one scenario across all criterion combinations.
    Scenario s = generate_scenario("stable", n, 150, 5);
    std::vector<EstimatorConfig> configs;
    for (auto pv : {PredictionVariant::VolumeMin, PredictionVariant::TraceMin})
        for (auto cv : {CorrectionVariant::SigmaMin, CorrectionVariant::VolumeMin,
                        CorrectionVariant::SsalMin}) {
            EstimatorConfig c;
            c.pred.variant = pv;
            c.corr.variant = cv;
            c.sigma0 = s.sigma0;
            configs.push_back(c);
        }
    const double t_runs_serial = time_ms(
        [&] {
            for (const auto& c : configs) (void)run(s, c, 11, RunOptions{});
        },
        reps);
    const double t_runs_parallel = time_ms(
        [&] {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (int i = 0; i < static_cast<int>(configs.size()); ++i)
                (void)run(s, configs[i], 11, RunOptions{});
        },
        reps);
    std::printf("audit matrix        n=%d horizon=150 combos=%zu\n", n, configs.size());
    std::printf("  serial   %10.2f ms\n", t_runs_serial);
    std::printf("  parallel %10.2f ms  speedup %.2fx\n", t_runs_parallel,
                t_runs_serial / t_runs_parallel);
    (void)sink;
    return 0;
}
