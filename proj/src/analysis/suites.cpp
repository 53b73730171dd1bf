#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "infobatch/analysis.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/mixup.hpp"
#include "infobatch/planner.hpp"
#include "infobatch/rng.hpp"

namespace infobatch::analysis {

std::string CheckRecord::to_json_line() const {
    const nlohmann::json j = {
        {"test", test}, {"statistic", statistic}, {"stderr", stderr_}, {"threshold", threshold}, {"pass", pass}};
    return j.dump();
}

namespace {

constexpr std::size_t kTrials = 100'000;

CheckRecord below(std::string name, double statistic, double threshold, double err = 0.0) {
    return {std::move(name), statistic, err, threshold, statistic < threshold};
}

CheckRecord above(std::string name, double statistic, double threshold, double err = 0.0) {
    return {std::move(name), statistic, err, threshold, statistic > threshold};
}

double relative_error(std::span<const double> got, std::span<const double> want) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) {
        diff += (got[k] - want[k]) * (got[k] - want[k]);
        ref += want[k] * want[k];
    }
    return std::sqrt(diff / ref);
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

QuadraticSet unbiasedness_set(std::uint64_t seed) {
    return gen_quadratic({.n = 100, .dim = 2, .a_lo = 0.5, .a_hi = 2.0, .b_lo = -2.0, .b_hi = 2.0, .seed = seed});
}

std::vector<CheckRecord> unbiasedness(std::uint64_t seed) {
    std::vector<CheckRecord> out;
    const auto qs = unbiasedness_set(seed);
    const std::vector<double> theta{1.5, -1.0};
    const auto scores = qs.losses(theta);
    const auto info = PrunePolicy::info_batch(0.5, 0.875, 10);

    const auto mc = mc_policy_gradient(qs, theta, scores, info, kTrials, seed);
    const auto ref = rescaled_reference(qs, theta, scores, info);
    out.push_back(below("info_batch_rescaled_mean_vs_scaled_exact", relative_error(mc.mean, ref), 0.01,
                        norm(mc.mean_stderr) / norm(ref)));

    const auto exact = exact_quadratic_gradient(qs, theta);
    const auto none = mc_policy_gradient(qs, theta, scores, PrunePolicy::none(10), 100, seed);
    double none_dev = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
        none_dev = std::max({none_dev, std::abs(none.mean[k] - exact[k]), none.plan_variance[k]});
    }
    out.push_back({"policy_none_is_exact", none_dev, 0.0, 0.0, none_dev == 0.0});

    const double keep = 0.7;
    const auto random = mc_policy_gradient(qs, theta, scores, PrunePolicy::dynamic_random(keep, 10), kTrials, seed);
    out.push_back(below("dynamic_random_mean_vs_exact", relative_error(random.mean, exact), 0.01,
                        norm(random.mean_stderr) / norm(exact)));
    const double mass_dev = std::abs(random.mean_weight_mass / (keep * 100.0) - 1.0);
    out.push_back(below("dynamic_random_weight_mass_vs_p_N", mass_dev, 0.01, random.weight_mass_stderr / (keep * 100.0)));

    const double mass_rel = std::abs(mc.mean_weight_mass / 100.0 - 1.0);
    out.push_back(below("info_batch_weight_mass_vs_N", mass_rel, 0.005, mc.weight_mass_stderr / 100.0));

    const double analytic = expected_kept_fraction(scores, info);
    const auto kept_mc = mc_policy_gradient(qs, theta, scores, info, 10'000, seed + 1);
    out.push_back(below("expected_kept_fraction_vs_mc", std::abs(kept_mc.mean_kept_ratio - analytic), 0.005));

    const auto skewed = skewed_quadratic(100, seed);
    const std::vector<double> origin{0.0, 0.0};
    const auto skew_scores = skewed.losses(origin);
    const auto hard = policy_bias(skewed, origin, skew_scores, PrunePolicy::static_hard(0.5, 10), 1000, seed);
    out.push_back(above("static_hard_direction_bias", hard.direction, 0.05));
    const auto soft = policy_bias(skewed, origin, skew_scores, info, kTrials, seed);
    out.push_back(below("info_batch_direction_bias", soft.direction, 0.01));
    return out;
}

std::vector<CheckRecord> variance(std::uint64_t seed) {
    std::vector<CheckRecord> out;
    const auto qs = unbiasedness_set(seed);
    const std::vector<double> theta{1.5, -1.0};
    const auto grads = qs.gradients(theta);
    const double n = static_cast<double>(qs.size());

    const std::vector<double> zero(qs.size(), 0.0);
    const auto at_zero = analytic_policy_variance(grads, zero, n);
    const auto pop = population_variance(grads);
    double identity = 0.0;
    for (std::size_t k = 0; k < pop.size(); ++k) identity = std::max(identity, std::abs(at_zero[k] - pop[k]) / pop[k]);
    out.push_back(below("zero_probability_is_population_variance", identity, 1e-12));

    const double p = 0.4;
    const std::vector<double> uniform(qs.size(), p);
    const double kept = (1.0 - p) * n;
    const auto uni = analytic_policy_variance(grads, uniform, kept);
    double nsr = 0.0;
    for (std::size_t k = 0; k < pop.size(); ++k) {
        const double want = (n / kept) * (n / kept) * pop[k];
        nsr = std::max(nsr, std::abs(uni[k] - want) / want);
    }
    out.push_back(below("uniform_prune_scales_variance_by_ratio_squared", nsr, 1e-12));

    const auto scores = qs.losses(theta);
    const auto info = PrunePolicy::info_batch(0.5, 0.875, 10);
    const auto probs = prune_probabilities(scores, info);
    double expected_kept = 0.0;
    for (const double q : probs) expected_kept += 1.0 - q;
    const auto analytic = analytic_policy_variance(grads, probs, expected_kept);
    const auto mc = mc_policy_gradient(qs, theta, scores, info, kTrials, seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        worst = std::max(worst, std::abs(mc.sample_variance[k] - analytic[k]) / analytic[k]);
    }
    out.push_back(below("analytic_variance_vs_mc", worst, 0.10));

    // Below-mean loss implies below-mean squared gradient here: L = b^2/2, G = -b at theta = 0.
    const auto benign = gen_quadratic({.n = 100, .dim = 1, .a_lo = 1.0, .a_hi = 1.0, .b_lo = -1.0, .b_hi = 1.0,
                                       .seed = seed});
    const std::vector<double> origin{0.0};
    const auto benign_scores = benign.losses(origin);
    const auto benign_grads = benign.gradients(origin);
    const auto benign_probs = prune_probabilities(benign_scores, info);
    out.push_back({"rescale_condition_holds", 0.0, 0.0, 0.0, rescale_variance_condition(benign_grads, benign_probs)});
    const auto benign_mc = mc_policy_gradient(benign, origin, benign_scores, info, kTrials, seed);
    const double benign_kept = benign_mc.mean_kept_ratio * 100.0;
    const double bound = (100.0 / benign_kept) * (100.0 / benign_kept) * population_variance(benign_grads)[0];
    out.push_back(below("variance_reduced_under_condition", benign_mc.sample_variance[0] / bound, 1.05));
    return out;
}

std::vector<CheckRecord> annealing(std::uint64_t seed) {
    std::vector<CheckRecord> out;
    constexpr std::size_t kEpochs = 80;
    const auto policy = PrunePolicy::info_batch(0.5, 0.875, kEpochs);
    rng::Stream stream(rng::derive_key(seed, rng::tag::dataset), 5);
    std::vector<double> scores(1000);
    for (double& s : scores) s = stream.uniform(0.0, 3.0);

    std::size_t violations = 0;
    std::size_t pruned_epochs = 0;
    for (std::size_t t = 0; t < kEpochs; ++t) {
        const ScoreTable table(scores, t);
        const auto plan = plan_epoch(table, policy, seed);
        if (policy.prunes_at(t)) {
            if (plan.kept_ratio < 1.0) ++pruned_epochs;
            continue;
        }
        const bool all_unit = std::all_of(plan.weights.begin(), plan.weights.end(), [](double w) { return w == 1.0; });
        if (plan.kept_ratio != 1.0 || !all_unit) ++violations;
    }
    out.push_back({"no_pruning_after_delta_C", static_cast<double>(violations), 0.0, 0.0, violations == 0});
    out.push_back({"pruning_before_delta_C", static_cast<double>(pruned_epochs), 70.0, 0.0, pruned_epochs == 70});
    return out;
}

std::vector<CheckRecord> lr_bound(std::uint64_t seed) {
    std::vector<CheckRecord> out;
    QuadraticSet single{Matrix(1, 1, 1.0), Matrix(1, 1, 0.0)};
    const std::vector<double> one{1.0};
    const double classic = lr_stability_bound(single, one, 1, 1.0).value_or(-1.0);
    out.push_back(below("single_sample_bound_is_2", std::abs(classic - 2.0), 1e-12));
    const double halved = lr_stability_bound(single, one, 1, 0.5).value_or(-1.0);
    out.push_back(below("half_kept_halves_bound", std::abs(halved - 1.0), 1e-12));

    const auto qs = gen_quadratic({.n = 100, .dim = 1, .a_lo = 1.0, .a_hi = 1.0, .b_lo = -1.0, .b_hi = 1.0,
                                   .seed = seed});
    const std::vector<double> theta0{10.0};
    const auto policy = PrunePolicy::info_batch(0.5, 0.875, 10);
    const double kept = expected_kept_fraction(qs.losses(theta0), policy);
    const std::size_t batch = 16;
    const double bound = lr_stability_bound(qs, theta0, batch, kept).value_or(0.0);
    const auto stable = simulate_rescaled_descent(qs, theta0, 0.9 * bound, 100, batch, policy, 1000, seed);
    out.push_back(below("loss_decreases_at_0.9_bound", stable.mean_final_loss / stable.initial_loss, 1.0,
                        stable.final_loss_stderr / stable.initial_loss));
    const auto unstable = simulate_rescaled_descent(qs, theta0, 1.5 * bound, 100, batch, policy, 1000, seed);
    out.push_back(above("loss_increases_at_1.5_bound", unstable.mean_final_loss / unstable.initial_loss, 1.0,
                        unstable.final_loss_stderr / unstable.initial_loss));
    return out;
}

std::vector<CheckRecord> mixup(std::uint64_t seed) {
    std::vector<CheckRecord> out;
    rng::Stream stream(rng::derive_key(seed, rng::tag::dataset), 6);
    constexpr std::size_t kBatch = 64;
    constexpr std::size_t kClasses = 10;

    double worst_perfect = 0.0;
    double worst_random = 0.0;
    for (int round = 0; round < 20; ++round) {
        const double alpha = 0.05 + 0.95 * stream.uniform();
        std::vector<int> labels(kBatch);
        for (std::size_t i = 0; i < kBatch; ++i) {
            // Partners get distinct classes so the mixed target is a two-point distribution.
            const std::size_t j = kBatch - 1 - i;
            labels[i] = static_cast<int>(stream.below(kClasses));
            if (j < i && labels[i] == labels[j]) labels[i] = (labels[i] + 1) % static_cast<int>(kClasses);
        }
        Matrix perfect(kBatch, kClasses);
        for (std::size_t i = 0; i < kBatch; ++i) {
            const std::size_t j = kBatch - 1 - i;
            perfect(i, static_cast<std::size_t>(labels[i])) += alpha;
            perfect(i, static_cast<std::size_t>(labels[j])) += 1.0 - alpha;
        }
        for (const double s : reconstruct_mixup_scores(perfect, labels, alpha)) {
            worst_perfect = std::max(worst_perfect, std::abs(s - 1.0));
        }

        Matrix probs(kBatch, kClasses);
        for (std::size_t i = 0; i < kBatch; ++i) {
            double sum = 0.0;
            for (std::size_t c = 0; c < kClasses; ++c) sum += probs(i, c) = stream.uniform() + 1e-3;
            for (std::size_t c = 0; c < kClasses; ++c) probs(i, c) /= sum;
        }
        const auto scores = reconstruct_mixup_scores(probs, labels, alpha);
        for (std::size_t i = 0; i < kBatch; ++i) {
            const auto y = static_cast<std::size_t>(labels[i]);
            const double direct = probs(i, y) + probs(kBatch - 1 - i, y);
            worst_random = std::max(worst_random, std::abs(scores[i] - direct));
        }
    }
    out.push_back({"perfect_prediction_scores_one", worst_perfect, 1e-9, 0.0, worst_perfect <= 1e-9});
    out.push_back({"random_batch_matches_direct_formula", worst_random, 0.0, 0.0, worst_random == 0.0});
    return out;
}

}  // namespace

std::vector<CheckRecord> run_suite(std::string_view name, std::uint64_t seed) {
    if (name == "unbiasedness") return unbiasedness(seed);
    if (name == "variance") return variance(seed);
    if (name == "annealing") return annealing(seed);
    if (name == "lr_bound") return lr_bound(seed);
    if (name == "mixup") return mixup(seed);
    std::string valid;
    for (const auto s : kSuites) valid += (valid.empty() ? "" : ", ") + std::string(s);
    throw InvalidArgument("unknown suite '" + std::string(name) + "'; valid suites: " + valid);
}

}  // namespace infobatch::analysis
