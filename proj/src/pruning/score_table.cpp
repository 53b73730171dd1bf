#include "infobatch/score_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "infobatch/errors.hpp"
#include "infobatch/planner.hpp"

namespace infobatch {

ScoreTable::ScoreTable(std::size_t n) {
    if (n == 0) throw InvalidArgument("score table size must be positive");
    scores_.assign(n, kInitialScore);
}

ScoreTable::ScoreTable(std::vector<double> scores, std::size_t epoch)
    : scores_(std::move(scores)), epoch_(epoch) {
    if (scores_.empty()) throw InvalidArgument("score table size must be positive");
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        const double s = scores_[i];
        if (!std::isfinite(s) || s < 0.0) {
            throw DataCorruption("score of sample " + std::to_string(i) + " is not a finite non-negative value");
        }
    }
}

void ScoreTable::update(std::span<const std::size_t> ids, std::span<const double> losses) {
    if (ids.size() != losses.size()) {
        throw InvalidArgument("update: " + std::to_string(losses.size()) + " losses for " +
                              std::to_string(ids.size()) + " kept samples");
    }
    // Validate everything first so a bad batch leaves the table untouched.
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= scores_.size()) {
            throw InvalidArgument("update: sample id " + std::to_string(ids[i]) + " out of range");
        }
        if (!std::isfinite(losses[i])) {
            throw DataCorruption("update: non-finite loss for sample " + std::to_string(ids[i]));
        }
    }
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double v = std::clamp(losses[i], 0.0, kMaxScore);
        if (v != losses[i]) ++clamped;
        scores_[ids[i]] = v;
    }
    if (clamped > 0) {
        spdlog::warn("score update clamped {} loss value(s) into [0, {}] at epoch {}", clamped, kMaxScore, epoch_);
    }
    ++epoch_;
}

void update_scores(ScoreTable& table, const EpochPlan& plan, std::span<const double> losses) {
    table.update(plan.kept_ids, losses);
}

}  // namespace infobatch
