#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <vector>

#include "infobatch/analysis.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/planner.hpp"
#include "infobatch/selection.hpp"

using namespace infobatch;
using namespace infobatch::analysis;

namespace {

QuadraticSet single(double a, double b) {
    QuadraticSet qs;
    qs.a = Matrix(1, 1, a);
    qs.b = Matrix(1, 1, b);
    return qs;
}

QuadraticSet standard_set() { return gen_quadratic({100, 2, 0.5, 2.0, -2.0, 2.0, 3}); }

}  // namespace

TEST(ExactGradient, SingleSample) {
    const std::vector<double> theta{3.0};
    EXPECT_EQ(exact_quadratic_gradient(single(2.0, 1.0), theta), std::vector<double>{4.0});
}

TEST(ExactGradient, ZeroAtWeightedMinimizer) {
    const auto qs = standard_set();
    std::vector<double> theta(2);
    for (std::size_t k = 0; k < 2; ++k) {
        double ab = 0.0, a = 0.0;
        for (std::size_t i = 0; i < qs.size(); ++i) {
            ab += qs.a(i, k) * qs.b(i, k);
            a += qs.a(i, k);
        }
        theta[k] = ab / a;
    }
    for (double g : exact_quadratic_gradient(qs, theta)) EXPECT_NEAR(g, 0.0, 1e-14);
}

TEST(ExactGradient, MatchesNaiveSummation) {
    const auto qs = standard_set();
    const std::vector<double> theta{0.7, -1.3};
    const auto g = exact_quadratic_gradient(qs, theta);
    for (std::size_t k = 0; k < 2; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < qs.size(); ++i) s += qs.a(i, k) * (theta[k] - qs.b(i, k));
        EXPECT_NEAR(g[k], s / 100.0, 1e-12);
    }
}

TEST(McGradient, PolicyNoneIsExactWithZeroVariance) {
    const auto qs = standard_set();
    const std::vector<double> theta{1.5, -1.0};
    const auto scores = qs.losses(theta);
    const auto mc = mc_policy_gradient(qs, theta, scores, PrunePolicy::none(1), 50, 1);
    const auto exact = exact_quadratic_gradient(qs, theta);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(mc.mean[k], exact[k], 1e-15);
        EXPECT_EQ(mc.plan_variance[k], 0.0);
    }
    EXPECT_EQ(mc.mean_kept_ratio, 1.0);
    EXPECT_EQ(mc.mean_weight_mass, 100.0);
}

TEST(McGradient, RejectsZeroTrials) {
    const auto qs = standard_set();
    const std::vector<double> theta{0.0, 0.0};
    EXPECT_THROW(mc_policy_gradient(qs, theta, qs.losses(theta), PrunePolicy::none(1), 0, 1), InvalidArgument);
}

TEST(McGradient, ErrorBandShrinksAsInverseSqrtT) {
    const auto qs = standard_set();
    const std::vector<double> theta{1.5, -1.0};
    const auto scores = qs.losses(theta);
    const auto policy = PrunePolicy::info_batch(0.5, 0.875, 1);
    const auto small = mc_policy_gradient(qs, theta, scores, policy, 10'000, 7);
    const auto large = mc_policy_gradient(qs, theta, scores, policy, 40'000, 8);
    for (std::size_t k = 0; k < 2; ++k) {
        const double ratio = small.mean_stderr[k] / large.mean_stderr[k];
        EXPECT_GE(ratio, 1.6);
        EXPECT_LE(ratio, 2.6);
    }
}

TEST(PolicyBias, NoneHasNoBias) {
    const auto qs = standard_set();
    const std::vector<double> theta{1.5, -1.0};
    const auto b = policy_bias(qs, theta, qs.losses(theta), PrunePolicy::none(1), 10, 1);
    EXPECT_NEAR(b.direction, 0.0, 1e-15);
    EXPECT_NEAR(b.magnitude_ratio, 1.0, 1e-15);
}

TEST(AnalyticVariance, ZeroProbabilityIsPopulationVariance) {
    const auto qs = standard_set();
    const std::vector<double> theta{0.2, 0.4};
    const auto g = qs.gradients(theta);
    const std::vector<double> zero(100, 0.0);
    const auto v = analytic_policy_variance(g, zero, 100.0);
    for (std::size_t k = 0; k < 2; ++k) {
        double s = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < 100; ++i) s += g(i, k);
        const double mean = s / 100.0;
        for (std::size_t i = 0; i < 100; ++i) sq += (g(i, k) - mean) * (g(i, k) - mean);
        EXPECT_NEAR(v[k], sq / 100.0, 1e-12);
    }
}

TEST(AnalyticVariance, UniformProbabilityScalesByRatioSquared) {
    const auto qs = standard_set();
    const std::vector<double> theta{0.2, 0.4};
    const auto g = qs.gradients(theta);
    const double p = 0.3;
    const auto v = analytic_policy_variance(g, std::vector<double>(100, p), 70.0);
    const auto pop = population_variance(g);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(v[k], (100.0 / 70.0) * (100.0 / 70.0) * pop[k], 1e-12);
}

TEST(AnalyticVariance, CertainPruneRejected) {
    const auto g = standard_set().gradients(std::vector<double>{0.0, 0.0});
    std::vector<double> probs(100, 0.0);
    probs[4] = 1.0;
    EXPECT_THROW(analytic_policy_variance(g, probs, 99.0), InvalidArgument);
}

TEST(AnalyticVariance, ConditionFailsOnAdversarialSet) {
    // The pruned samples carry the largest gradients.
    Matrix g(4, 1, std::vector<double>{10.0, 0.1, 0.1, 0.1});
    EXPECT_FALSE(rescale_variance_condition(g, std::vector<double>{0.5, 0.0, 0.0, 0.0}));
    EXPECT_TRUE(rescale_variance_condition(g, std::vector<double>{0.0, 0.5, 0.5, 0.0}));
}

TEST(LrBound, SingleSampleIsTwo) {
    const std::vector<double> theta{1.0};
    EXPECT_NEAR(*lr_stability_bound(single(1.0, 0.0), theta, 1, 1.0), 2.0, 1e-15);
}

TEST(LrBound, HalfKeptHalvesBound) {
    const auto qs = standard_set();
    const std::vector<double> theta{1.0, 2.0};
    EXPECT_NEAR(*lr_stability_bound(qs, theta, 16, 0.5), 0.5 * *lr_stability_bound(qs, theta, 16, 1.0), 1e-15);
}

TEST(LrBound, ZeroGradientIsUnbounded) {
    const std::vector<double> theta{0.0};
    EXPECT_FALSE(lr_stability_bound(single(1.0, 0.0), theta, 1, 1.0).has_value());
}

TEST(SkewedSet, HalvesPullAlongDifferentAxes) {
    const auto qs = skewed_quadratic(200, 1);
    const std::vector<double> origin{0.0, 0.0};
    const auto losses = qs.losses(origin);
    const auto g = qs.gradients(origin);
    const double mean = mean_threshold(losses);
    for (std::size_t i = 0; i < 200; ++i) {
        if (losses[i] < mean) {
            EXPECT_GT(std::abs(g(i, 0)), 10.0 * std::abs(g(i, 1)));
        } else {
            EXPECT_GT(std::abs(g(i, 1)), 10.0 * std::abs(g(i, 0)));
        }
    }
}

TEST(Bench, SmallInputOrdering) {
    const auto r = bench_threshold_vs_sort(1000, 5);
    EXPECT_LE(r.mean_ms, r.sort_ms);
    EXPECT_THROW(bench_threshold_vs_sort(999, 5), InvalidArgument);
    EXPECT_THROW(bench_threshold_vs_sort(1000, 0), InvalidArgument);
}

TEST(Suites, UnknownSuiteListsValidNames) {
    try {
        run_suite("foo", 0);
        FAIL();
    } catch (const InvalidArgument& e) {
        for (auto s : kSuites) EXPECT_NE(std::string(e.what()).find(s), std::string::npos);
    }
}

TEST(Suites, RecordsSerializeAsJsonLines) {
    const auto records = run_suite("annealing", 0);
    ASSERT_FALSE(records.empty());
    for (const auto& r : records) {
        const auto j = nlohmann::json::parse(r.to_json_line());
        EXPECT_EQ(j["test"], r.test);
        EXPECT_TRUE(j.contains("statistic"));
        EXPECT_TRUE(j.contains("stderr"));
        EXPECT_TRUE(j.contains("threshold"));
        EXPECT_EQ(j["pass"], true);
    }
}

TEST(Suites, MixupSuitePasses) {
    for (const auto& r : run_suite("mixup", 3)) EXPECT_TRUE(r.pass) << r.test;
}
