#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "infobatch/errors.hpp"
#include "infobatch/rng.hpp"
#include "infobatch/selection.hpp"

using namespace infobatch;

namespace {

std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
    rng::Stream s(rng::derive_key(seed, rng::tag::dataset), 0);
    std::vector<double> v(n);
    for (auto& x : v) x = s.uniform();
    return v;
}

// Nearest-rank definition evaluated on a sorted copy.
double sorted_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[rank == 0 ? 0 : rank - 1];
}

}  // namespace

TEST(MeanThreshold, ConstantVector) {
    const std::vector<double> v{1, 1, 1};
    EXPECT_EQ(mean_threshold(v), 1.0);
}

TEST(MeanThreshold, SymmetricValues) {
    const std::vector<double> v{0.2, 0.4, 0.6, 0.8};
    EXPECT_DOUBLE_EQ(mean_threshold(v), 0.5);
}

TEST(MeanThreshold, MatchesNaiveLongDoubleSum) {
    const auto v = random_scores(1'000'000, 5);
    long double naive = 0.0L;
    for (double x : v) naive += x;
    const double oracle = static_cast<double>(naive / static_cast<long double>(v.size()));
    EXPECT_LE(std::abs(mean_threshold(v) - oracle) / oracle, 1e-9);
}

TEST(MeanThreshold, ExactRationalMeanOnDyadicValues) {
    // Values k / 1024 with integer k: the exact sum is an integer count of 1/1024 units.
    rng::Stream s(rng::derive_key(6, rng::tag::dataset), 0);
    const std::size_t n = 2'000'000;
    std::vector<double> v(n);
    std::uint64_t units = 0;
    for (auto& x : v) {
        const std::uint64_t k = s.below(1u << 20) + (s.below(4) == 0 ? (1ull << 30) : 0);
        units += k;
        x = static_cast<double>(k) / 1024.0;
    }
    const long double exact = static_cast<long double>(units) / 1024.0L / static_cast<long double>(n);
    const double got = mean_threshold(v);
    EXPECT_LE(std::abs(static_cast<long double>(got) - exact) / exact, 1e-12L);
}

TEST(MeanThreshold, RejectsNonFinite) {
    const std::vector<double> v{1.0, std::numeric_limits<double>::quiet_NaN()};
    EXPECT_THROW(mean_threshold(v), DataCorruption);
    const std::vector<double> w{1.0, std::numeric_limits<double>::infinity()};
    EXPECT_THROW(mean_threshold(w), DataCorruption);
}

TEST(MeanThreshold, RejectsEmpty) {
    EXPECT_THROW(mean_threshold(std::vector<double>{}), InvalidArgument);
}

TEST(CompensatedSum, RecoversCancellation) {
    const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    EXPECT_EQ(compensated_sum(v), 2.0);
}

TEST(Quantile, MedianOfThree) {
    const std::vector<double> v{3, 1, 2};
    EXPECT_EQ(quantile(v, 0.5), 2.0);
}

TEST(Quantile, ZeroIsMinimumOneIsMaximum) {
    const auto v = random_scores(1000, 8);
    EXPECT_EQ(quantile(v, 0.0), *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(quantile(v, 1.0), *std::max_element(v.begin(), v.end()));
}

TEST(Quantile, MatchesSortOracle) {
    const auto v = random_scores(100'000, 9);
    for (double q : {0.2, 0.01, 0.5, 0.77, 0.999}) {
        EXPECT_EQ(quantile(v, q), sorted_quantile(v, q)) << "q=" << q;
    }
}

TEST(Quantile, MatchesSortOracleOnSmallSizesWithTies) {
    for (std::size_t n = 1; n <= 40; ++n) {
        auto v = random_scores(n, 100 + n);
        for (auto& x : v) x = std::floor(x * 5.0);
        for (int k = 0; k <= 20; ++k) {
            const double q = k / 20.0;
            ASSERT_EQ(quantile(v, q), sorted_quantile(v, q)) << "n=" << n << " q=" << q;
        }
    }
}

TEST(Quantile, DoesNotModifyInput) {
    const auto v = random_scores(500, 10);
    const auto copy = v;
    (void)quantile(v, 0.3);
    EXPECT_EQ(v, copy);
}

TEST(Quantile, Errors) {
    EXPECT_THROW(quantile(std::vector<double>{}, 0.5), InvalidArgument);
    const std::vector<double> v{1.0};
    EXPECT_THROW(quantile(v, -0.1), InvalidArgument);
    EXPECT_THROW(quantile(v, 1.1), InvalidArgument);
}
