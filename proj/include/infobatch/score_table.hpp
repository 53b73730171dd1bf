#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace infobatch {

struct EpochPlan;

/// Per-sample scores (latest observed loss) plus the epoch counter.
///
/// The length is fixed at construction. Scores stay finite and non-negative;
/// incoming losses are clamped into [0, kMaxScore] before storage.
class ScoreTable {
public:
    static constexpr double kInitialScore = 1.0;
    static constexpr double kMaxScore = 1e6;

    /// Fresh table: every score is 1, epoch 0. Throws InvalidArgument for n == 0.
    explicit ScoreTable(std::size_t n);

    /// Table seeded with explicit scores (analysis harnesses, resumed runs).
    ScoreTable(std::vector<double> scores, std::size_t epoch);

    std::size_t size() const noexcept { return scores_.size(); }
    std::size_t epoch() const noexcept { return epoch_; }
    std::span<const double> scores() const noexcept { return scores_; }
    double operator[](std::size_t id) const { return scores_.at(id); }

    /// Overwrites scores of the ids trained this epoch and advances the epoch.
    /// `losses[i]` belongs to `ids[i]`. Length mismatch or an id out of range
    /// throws InvalidArgument; a NaN/inf loss throws DataCorruption naming the id.
    /// The table is unchanged when an exception is thrown.
    void update(std::span<const std::size_t> ids, std::span<const double> losses);

private:
    std::vector<double> scores_;
    std::size_t epoch_ = 0;
};

inline ScoreTable new_score_table(std::size_t n) { return ScoreTable(n); }

/// Applies the losses observed for `plan.kept_ids` (in that order).
void update_scores(ScoreTable& table, const EpochPlan& plan, std::span<const double> losses);

}  // namespace infobatch
