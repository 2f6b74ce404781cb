// Timing harness for nearest_incoherent across state dimensions.

#pragma once

#include "random.hpp"
#include "trace_distance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

namespace coherence {

struct BenchSample {
    Index n = 0;
    long batch = 1;               ///< calls per timed repetition
    std::vector<double> seconds;  ///< per-call wall time of each repetition
    double median = 0.0;
    double min = 0.0;
    double mean = 0.0;
    // Deterministic outputs, independent of timing.
    double c_tr = 0.0;
    Index k = 0;
};

struct BenchReport {
    std::vector<BenchSample> samples;
    double slope = 0.0;            ///< least-squares slope of log(median) against log(n)
    bool scaling_consistent = false;
};

inline constexpr double bench_slope_min = 0.9;
inline constexpr double bench_slope_max = 1.3;
inline constexpr long bench_pool_size = 64;

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 2)
        return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

/// Times nearest_incoherent on seeded random states of each size. Small sizes
/// are batched so each repetition covers about `min_elements` amplitudes.
/// c_tr and k are reported for the first state of each size.
inline BenchReport run_bench(const std::vector<Index>& sizes, int repetitions, std::uint64_t seed,
                             long min_elements = 1000000)
{
    using clock = std::chrono::steady_clock;
    if (repetitions < 1)
        throw ValidationError("run_bench: repetitions must be positive");
    const Rng root(seed);
    BenchReport report;
    std::vector<double> xs, ys;
    for (const Index n : sizes) {
        if (n < 1)
            throw ValidationError("run_bench: sizes must be positive");
        Rng rng = root.split(static_cast<std::uint64_t>(n));
        BenchSample s;
        s.n = n;
        s.batch = std::max<long>(1, min_elements / static_cast<long>(n));
        // Batched calls cycle through distinct states; repeating one small
        // input lets the branch predictor learn the sort and flatters small n.
        std::vector<PureState> pool;
        const long pool_size = std::min<long>(s.batch, bench_pool_size);
        for (long i = 0; i < pool_size; ++i)
            pool.push_back(random_pure(n, rng));
        const TraceDistanceResult warm = nearest_incoherent(pool.front());
        s.c_tr = warm.c_tr;
        s.k = warm.k;
        volatile double sink = 0.0;
        for (int rep = 0; rep < repetitions; ++rep) {
            const auto t0 = clock::now();
            for (long b = 0; b < s.batch; ++b)
                sink = sink + nearest_incoherent(pool[static_cast<std::size_t>(b % pool_size)]).c_tr;
            const double dt = std::chrono::duration<double>(clock::now() - t0).count();
            s.seconds.push_back(dt / static_cast<double>(s.batch));
        }
        std::vector<double> sorted = s.seconds;
        std::sort(sorted.begin(), sorted.end());
        s.min = sorted.front();
        s.median = sorted[sorted.size() / 2];
        double total = 0.0;
        for (double t : sorted)
            total += t;
        s.mean = total / static_cast<double>(sorted.size());
        xs.push_back(static_cast<double>(n));
        ys.push_back(s.median);
        report.samples.push_back(std::move(s));
    }
    report.slope = loglog_slope(xs, ys);
    report.scaling_consistent =
        report.slope >= bench_slope_min && report.slope <= bench_slope_max;
    return report;
}

} // namespace coherence
