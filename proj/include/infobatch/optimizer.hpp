#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "infobatch/model.hpp"

namespace infobatch {

struct OptimizerState {
    std::vector<double> velocity;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    std::size_t step = 0;

    static OptimizerState for_model(const DenseModel& model, double momentum = 0.9, double weight_decay = 5e-4);
};

/// v <- m*v + grad + wd*params; params <- params - lr*v. Clears the gradient and
/// advances the step counter. A non-finite update throws NumericOverflow and
/// leaves the parameters untouched.
void sgd_momentum_step(DenseModel& model, OptimizerState& opt, double lr);

enum class ScheduleKind { onecycle, constant };

std::string_view to_string(ScheduleKind kind) noexcept;
ScheduleKind parse_schedule_kind(std::string_view text);

struct ScheduleConfig {
    ScheduleKind kind = ScheduleKind::onecycle;
    double lr_max = 0.1;
    std::size_t total_steps = 1;
    double warmup_fraction = 0.3;
    std::optional<double> floor;  ///< defaults to lr_max / 1e4

    double floor_lr() const noexcept { return floor.value_or(lr_max / 1e4); }
    /// Step at which the rate peaks: floor(warmup_fraction * (total_steps - 1)).
    std::size_t peak_step() const noexcept;
    void validate() const;
};

/// Cosine ramp floor -> lr_max up to peak_step(), then cosine anneal back to
/// the floor at total_steps - 1. Throws InvalidArgument for step >= total_steps.
double onecycle_lr(std::size_t step, const ScheduleConfig& cfg);

/// Rate used by the training loop: constant schedules return lr_max, onecycle
/// steps past the budget are clamped to the floor.
double scheduled_lr(std::size_t step, const ScheduleConfig& cfg);

}  // namespace infobatch
