#include <algorithm>
#include <chrono>
#include <vector>

#include "infobatch/analysis.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/planner.hpp"
#include "infobatch/rng.hpp"
#include "infobatch/selection.hpp"

namespace infobatch::analysis {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> xs) {
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    if (xs.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(xs.begin(), mid);
    return 0.5 * (lower + upper);
}

std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
    rng::Stream stream(rng::derive_key(seed, rng::tag::dataset), 4);
    std::vector<double> xs(n);
    for (double& x : xs) x = stream.uniform();
    return xs;
}

// Keeps results observable so the timed calls are not optimized away.
volatile double g_sink = 0.0;

}  // namespace

BenchResult bench_threshold_vs_sort(std::size_t n, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw InvalidArgument("bench: trials must be at least 1");
    if (n < 1000) throw InvalidArgument("bench: n must be at least 1000");
    const auto data = random_scores(n, seed);
    std::vector<double> mean_t, quant_t, sort_t;
    // Each operation runs in its own loop so one does not evict the other's working set.
    for (std::size_t t = 0; t < trials; ++t) {
        const auto start = Clock::now();
        g_sink = mean_threshold(data);
        mean_t.push_back(elapsed_ms(start));
    }
    for (std::size_t t = 0; t < trials; ++t) {
        const auto start = Clock::now();
        g_sink = quantile(data, 0.5);
        quant_t.push_back(elapsed_ms(start));
    }
    std::vector<double> work;
    for (std::size_t t = 0; t < trials; ++t) {
        work = data;
        const auto start = Clock::now();
        std::sort(work.begin(), work.end());
        sort_t.push_back(elapsed_ms(start));
        g_sink = work[n / 2];
    }
    return {n, trials, median(mean_t), median(quant_t), median(sort_t)};
}

double bench_plan_epoch(std::size_t n, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw InvalidArgument("bench: trials must be at least 1");
    const ScoreTable table(random_scores(n, seed), 0);
    const auto policy = PrunePolicy::info_batch(0.5, 0.875, 10);
    std::vector<double> times;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto start = Clock::now();
        const auto plan = plan_epoch(table, policy, seed + t);
        times.push_back(elapsed_ms(start));
        g_sink = plan.kept_ratio;
    }
    return median(times);
}

}  // namespace infobatch::analysis
