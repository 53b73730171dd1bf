#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "infobatch/policy.hpp"
#include "infobatch/score_table.hpp"

namespace infobatch {

/// Which samples train in one epoch and with what loss weight.
struct EpochPlan {
    std::vector<std::size_t> kept_ids;  ///< strictly increasing
    std::vector<double> weights;        ///< aligned with kept_ids, each >= 1
    double threshold = 0.0;             ///< mean score at planning time
    double kept_ratio = 1.0;            ///< kept_ids.size() / dataset_size
    std::size_t epoch = 0;
    std::size_t dataset_size = 0;

    std::size_t kept_count() const noexcept { return kept_ids.size(); }
    double weight_mass() const noexcept;

    friend bool operator==(const EpochPlan&, const EpochPlan&) = default;
};

/// Every sample kept at weight 1.
EpochPlan identity_plan(std::size_t n, std::size_t epoch, double threshold = 0.0);

/// Soft-prune plan for the current epoch of `table`.
///
/// info_batch: samples with score strictly below the mean are dropped with
/// probability r (r_aggressive inside the tier band) and, if kept, weighted by
/// 1/(1 - r_effective) in per_sample mode, or all kept samples get
/// |D|/|S_t| in global mode. Once epoch >= delta * C the identity plan is
/// returned. Draws come from Philox keyed by (seed, epoch, sample id), so the
/// result is a pure function of (scores, policy, epoch, seed).
///
/// Throws OutOfRange when table.epoch() >= policy.total_epochs.
EpochPlan plan_epoch(const ScoreTable& table, const PrunePolicy& policy, std::uint64_t seed);

/// Keeps the ceil(keep_fraction * N) highest scores, ties to the lower id, weight 1.
EpochPlan static_hard_plan(std::span<const double> scores, double keep_fraction, std::size_t epoch = 0);

/// Each sample independently kept with probability keep_prob, weight 1.
EpochPlan dynamic_random_plan(std::size_t n, double keep_prob, std::size_t epoch, std::uint64_t seed);

/// Per-sample prune probability P_t(z) for info_batch inside the pruning window.
std::vector<double> prune_probabilities(std::span<const double> scores, const PrunePolicy& policy);

/// 1 - sum_z P_t(z) / |D|, evaluated analytically for the pruning window.
/// For other kinds: keep_prob, ceil(keep_fraction*N)/N, or 1.
double expected_kept_fraction(std::span<const double> scores, const PrunePolicy& policy);

/// Owns a score table and a policy; the surface foreign bindings wrap.
class Planner {
public:
    Planner(std::size_t n, PrunePolicy policy);

    EpochPlan plan(std::uint64_t seed) const;
    void update(std::span<const std::size_t> kept_ids, std::span<const double> losses);

    const ScoreTable& table() const noexcept { return table_; }
    const PrunePolicy& policy() const noexcept { return policy_; }
    std::size_t epoch() const noexcept { return table_.epoch(); }

private:
    ScoreTable table_;
    PrunePolicy policy_;
};

}  // namespace infobatch
