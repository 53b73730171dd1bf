#include "infobatch/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "infobatch/errors.hpp"
#include "infobatch/rng.hpp"
#include "infobatch/selection.hpp"

namespace infobatch {

namespace {

void finalize(EpochPlan& plan) {
    plan.kept_ratio = static_cast<double>(plan.kept_ids.size()) / static_cast<double>(plan.dataset_size);
}

std::size_t rounded_count(double fraction, std::size_t n) {
    const double target = fraction * static_cast<double>(n);
    const double lower = std::floor(target);
    const double count = (target - lower) <= 1e-9 * std::max(1.0, target) ? lower : std::ceil(target);
    return std::clamp<std::size_t>(static_cast<std::size_t>(count), 1, n);
}

}  // namespace

double EpochPlan::weight_mass() const noexcept { return compensated_sum(weights); }

EpochPlan identity_plan(std::size_t n, std::size_t epoch, double threshold) {
    EpochPlan plan;
    plan.kept_ids.resize(n);
    std::iota(plan.kept_ids.begin(), plan.kept_ids.end(), std::size_t{0});
    plan.weights.assign(n, 1.0);
    plan.threshold = threshold;
    plan.epoch = epoch;
    plan.dataset_size = n;
    plan.kept_ratio = 1.0;
    return plan;
}

std::vector<double> prune_probabilities(std::span<const double> scores, const PrunePolicy& policy) {
    const double threshold = mean_threshold(scores);
    const double boundary =
        policy.tier ? quantile(scores, policy.tier->quantile) : -std::numeric_limits<double>::infinity();
    std::vector<double> probs(scores.size(), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] < threshold) {
            probs[i] = (policy.tier && scores[i] <= boundary) ? policy.tier->r_aggressive : policy.r;
        }
    }
    return probs;
}

EpochPlan plan_epoch(const ScoreTable& table, const PrunePolicy& policy, std::uint64_t seed) {
    policy.validate();
    const std::size_t epoch = table.epoch();
    if (epoch >= policy.total_epochs) {
        throw OutOfRange("plan_epoch: epoch " + std::to_string(epoch) + " is past the final epoch " +
                         std::to_string(policy.total_epochs - 1));
    }
    const auto scores = table.scores();
    const std::size_t n = scores.size();
    const double threshold = mean_threshold(scores);

    switch (policy.kind) {
        case PolicyKind::none:
            return identity_plan(n, epoch, threshold);
        case PolicyKind::dynamic_random: {
            auto plan = dynamic_random_plan(n, policy.keep_prob, epoch, seed);
            plan.threshold = threshold;
            return plan;
        }
        case PolicyKind::static_hard: {
            auto plan = static_hard_plan(scores, policy.keep_fraction, epoch);
            plan.threshold = threshold;
            return plan;
        }
        case PolicyKind::info_batch:
            break;
    }

    if (!policy.prunes_at(epoch)) return identity_plan(n, epoch, threshold);

    const auto probs = prune_probabilities(scores, policy);
    const std::uint64_t key = rng::derive_key(seed, rng::tag::prune);

    EpochPlan plan;
    plan.threshold = threshold;
    plan.epoch = epoch;
    plan.dataset_size = n;
    plan.kept_ids.reserve(n);
    plan.weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = probs[i];
        if (p > 0.0 && rng::uniform01(key, epoch, i) < p) continue;
        plan.kept_ids.push_back(i);
        plan.weights.push_back(1.0 / (1.0 - p));
    }
    if (policy.rescale_mode == RescaleMode::global) {
        const double w = static_cast<double>(n) / static_cast<double>(plan.kept_ids.size());
        std::fill(plan.weights.begin(), plan.weights.end(), w);
    }
    finalize(plan);
    return plan;
}

EpochPlan static_hard_plan(std::span<const double> scores, double keep_fraction, std::size_t epoch) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw InvalidArgument("static_hard_plan: keep_fraction must be in (0, 1]");
    }
    if (scores.empty()) throw InvalidArgument("static_hard_plan: empty score array");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw DataCorruption("static_hard_plan: non-finite score at sample " + std::to_string(i));
        }
    }
    const std::size_t n = scores.size();
    const std::size_t keep = rounded_count(keep_fraction, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto harder = [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep - 1), order.end(), harder);
    order.resize(keep);
    std::sort(order.begin(), order.end());

    EpochPlan plan;
    plan.kept_ids = std::move(order);
    plan.weights.assign(keep, 1.0);
    plan.epoch = epoch;
    plan.dataset_size = n;
    finalize(plan);
    return plan;
}

EpochPlan dynamic_random_plan(std::size_t n, double keep_prob, std::size_t epoch, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("dynamic_random_plan: n must be positive");
    if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
        throw InvalidArgument("dynamic_random_plan: keep_prob must be in (0, 1]");
    }
    const std::uint64_t key = rng::derive_key(seed, rng::tag::prune);
    EpochPlan plan;
    plan.epoch = epoch;
    plan.dataset_size = n;
    plan.kept_ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng::uniform01(key, epoch, i) < keep_prob) plan.kept_ids.push_back(i);
    }
    plan.weights.assign(plan.kept_ids.size(), 1.0);
    finalize(plan);
    return plan;
}

double expected_kept_fraction(std::span<const double> scores, const PrunePolicy& policy) {
    const std::size_t n = scores.size();
    if (n == 0) throw InvalidArgument("expected_kept_fraction: empty score array");
    switch (policy.kind) {
        case PolicyKind::none:
            return 1.0;
        case PolicyKind::dynamic_random:
            return policy.keep_prob;
        case PolicyKind::static_hard:
            return static_cast<double>(rounded_count(policy.keep_fraction, n)) / static_cast<double>(n);
        case PolicyKind::info_batch:
            break;
    }
    const auto probs = prune_probabilities(scores, policy);
    return 1.0 - compensated_sum(probs) / static_cast<double>(n);
}

Planner::Planner(std::size_t n, PrunePolicy policy) : table_(n), policy_(std::move(policy)) {
    policy_.validate();
}

EpochPlan Planner::plan(std::uint64_t seed) const { return plan_epoch(table_, policy_, seed); }

void Planner::update(std::span<const std::size_t> kept_ids, std::span<const double> losses) {
    table_.update(kept_ids, losses);
}

}  // namespace infobatch
