#include "infobatch/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "infobatch/errors.hpp"

namespace infobatch {

OptimizerState OptimizerState::for_model(const DenseModel& model, double momentum, double weight_decay) {
    OptimizerState opt;
    opt.velocity.assign(model.params().size(), 0.0);
    opt.momentum = momentum;
    opt.weight_decay = weight_decay;
    return opt;
}

void sgd_momentum_step(DenseModel& model, OptimizerState& opt, double lr) {
    auto params = model.params();
    const auto grad = model.grad();
    if (opt.velocity.size() != params.size()) {
        throw InvalidArgument("optimizer state does not match the model's parameter count");
    }
    std::vector<double> velocity(opt.velocity.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = opt.momentum * opt.velocity[i] + grad[i] + opt.weight_decay * params[i];
        if (!std::isfinite(velocity[i]) || !std::isfinite(params[i] - lr * velocity[i])) {
            throw NumericOverflow("non-finite parameter update at optimizer step " + std::to_string(opt.step));
        }
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * velocity[i];
    opt.velocity = std::move(velocity);
    ++opt.step;
    model.zero_grad();
}

std::string_view to_string(ScheduleKind kind) noexcept {
    return kind == ScheduleKind::onecycle ? "onecycle" : "constant";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
    if (text == "onecycle") return ScheduleKind::onecycle;
    if (text == "constant") return ScheduleKind::constant;
    throw InvalidArgument("schedule.kind must be onecycle or constant");
}

std::size_t ScheduleConfig::peak_step() const noexcept {
    if (total_steps <= 1) return 0;
    return static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(total_steps - 1)));
}

void ScheduleConfig::validate() const {
    if (!(lr_max > 0.0) || !std::isfinite(lr_max)) throw InvalidArgument("optimizer.lr_max must be positive");
    if (total_steps == 0) throw InvalidArgument("schedule needs at least one step");
    if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
        throw InvalidArgument("schedule.warmup_fraction must be in (0, 1)");
    }
    if (floor && !(*floor > 0.0 && *floor <= lr_max)) throw InvalidArgument("schedule floor must be in (0, lr_max]");
}

double onecycle_lr(std::size_t step, const ScheduleConfig& cfg) {
    if (step >= cfg.total_steps) {
        throw InvalidArgument("onecycle_lr: step " + std::to_string(step) + " outside [0, " +
                              std::to_string(cfg.total_steps) + ")");
    }
    const double lo = cfg.floor_lr();
    const double hi = cfg.lr_max;
    const std::size_t peak = cfg.peak_step();
    if (step <= peak) {
        if (peak == 0) return hi;
        const double progress = static_cast<double>(step) / static_cast<double>(peak);
        return lo + (hi - lo) * 0.5 * (1.0 - std::cos(std::numbers::pi * progress));
    }
    const std::size_t tail = cfg.total_steps - 1 - peak;
    const double progress = static_cast<double>(step - peak) / static_cast<double>(tail);
    return lo + (hi - lo) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

double scheduled_lr(std::size_t step, const ScheduleConfig& cfg) {
    if (cfg.kind == ScheduleKind::constant) return cfg.lr_max;
    if (step >= cfg.total_steps) return cfg.floor_lr();
    return onecycle_lr(step, cfg);
}

}  // namespace infobatch
