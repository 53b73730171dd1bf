#include "infobatch/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "infobatch/errors.hpp"
#include "infobatch/planner.hpp"
#include "infobatch/rng.hpp"
#include "infobatch/score_table.hpp"

namespace infobatch {

bool EpochMetrics::same_outcome(const EpochMetrics& o) const noexcept {
    return epoch == o.epoch && kept_count == o.kept_count && kept_ratio == o.kept_ratio &&
           threshold == o.threshold && mean_train_loss == o.mean_train_loss && eval_metric == o.eval_metric &&
           cumulative_sample_forwards == o.cumulative_sample_forwards;
}

DenseModel build_model(const ModelSpec& spec, const Dataset& data, std::uint64_t seed) {
    DenseModel model = [&] {
        switch (spec.kind) {
            case ModelKind::linear_regression: return DenseModel::linear_regression(data.dim());
            case ModelKind::logistic_regression: return DenseModel::logistic_regression(data.dim(), data.num_classes);
            case ModelKind::mlp: return DenseModel::mlp(data.dim(), spec.hidden, data.num_classes);
        }
        throw InvalidArgument("unknown model kind");
    }();
    if (spec.kind == ModelKind::mlp) model.initialize(seed);
    return model;
}

double prior_kept_fraction(const PrunePolicy& policy, std::size_t epoch) {
    switch (policy.kind) {
        case PolicyKind::none:
            return 1.0;
        case PolicyKind::dynamic_random:
            return policy.keep_prob;
        case PolicyKind::static_hard:
            return epoch == 0 ? 1.0 : policy.keep_fraction;
        case PolicyKind::info_batch:
            break;
    }
    // A fresh table holds equal scores, so epoch 0 never prunes.
    if (epoch == 0 || !policy.prunes_at(epoch)) return 1.0;
    constexpr double below_mean = 0.5;
    if (!policy.tier) return 1.0 - policy.r * below_mean;
    const double band = std::min(policy.tier->quantile, below_mean);
    return 1.0 - (band * policy.tier->r_aggressive + (below_mean - band) * policy.r);
}

std::size_t planned_steps(const TrainConfig& config, std::size_t dataset_size) {
    PrunePolicy policy = config.policy;
    policy.total_epochs = config.epochs;
    const std::size_t b = config.batch_size;
    std::size_t steps = 0;
    for (std::size_t t = 0; t < config.epochs; ++t) {
        const double kept = std::ceil(prior_kept_fraction(policy, t) * static_cast<double>(dataset_size) - 1e-9);
        const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(kept));
        steps += (count + b - 1) / b;
    }
    return steps;
}

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& eval_set,
                  const EpochCallback& on_epoch) {
    train_set.validate();
    if (config.batch_size == 0) throw InvalidArgument("batch_size must be positive");
    const std::size_t n = train_set.size();
    TrainResult result{{}, build_model(config.model, train_set, config.seed), 0, 0, n};
    if (config.epochs == 0) return result;

    PrunePolicy policy = config.policy;
    policy.total_epochs = config.epochs;
    policy.validate();

    ScheduleConfig schedule;
    schedule.kind = config.schedule;
    schedule.lr_max = config.lr_max;
    schedule.warmup_fraction = config.warmup_fraction;
    schedule.total_steps = planned_steps(config, n);
    schedule.validate();
    result.scheduled_steps = schedule.total_steps;

    DenseModel& model = result.model;
    OptimizerState opt = OptimizerState::for_model(model, config.momentum, config.weight_decay);
    ScoreTable table(n);
    const Dataset& eval_target = eval_set.size() > 0 ? eval_set : train_set;
    const std::uint64_t shuffle_key = rng::derive_key(config.seed, rng::tag::shuffle);

    std::vector<double> weight_of(n, 0.0);
    std::vector<double> loss_of(n, 0.0);
    std::optional<EpochPlan> frozen_hard;
    std::size_t forwards = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();

        EpochPlan plan;
        if (policy.kind == PolicyKind::static_hard) {
            // One full pass to obtain scores, then a fixed subset for the rest of the run.
            if (epoch == 0) {
                plan = identity_plan(n, epoch);
            } else {
                if (!frozen_hard) frozen_hard = static_hard_plan(table.scores(), policy.keep_fraction, epoch);
                plan = *frozen_hard;
                plan.epoch = epoch;
            }
        } else {
            plan = plan_epoch(table, policy, config.seed);
        }

        for (std::size_t i = 0; i < plan.kept_ids.size(); ++i) weight_of[plan.kept_ids[i]] = plan.weights[i];
        const double lr_scale = (config.lr_autoscale && plan.kept_count() > 0)
                                    ? static_cast<double>(n) / static_cast<double>(plan.kept_count())
                                    : 1.0;

        const auto epoch_batches = batches(train_set, plan.kept_ids, config.batch_size, rng::mix64(shuffle_key ^ epoch));
        std::vector<double> batch_weights;
        for (std::size_t b = 0; b < epoch_batches.size(); ++b) {
            const auto& ids = epoch_batches[b];
            batch_weights.resize(ids.size());
            for (std::size_t i = 0; i < ids.size(); ++i) batch_weights[i] = weight_of[ids[i]];
            try {
                const auto losses = backward_weighted(model, train_set, ids, batch_weights);
                for (std::size_t i = 0; i < ids.size(); ++i) loss_of[ids[i]] = losses[i];
                sgd_momentum_step(model, opt, lr_scale * scheduled_lr(result.realized_steps, schedule));
            } catch (const NumericOverflow& e) {
                throw NumericOverflow("epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) + ": " +
                                      e.what());
            }
            ++result.realized_steps;
        }

        std::vector<double> kept_losses(plan.kept_count());
        for (std::size_t i = 0; i < plan.kept_ids.size(); ++i) kept_losses[i] = loss_of[plan.kept_ids[i]];
        update_scores(table, plan, kept_losses);

        forwards += plan.kept_count();
        EpochMetrics m;
        m.epoch = epoch;
        m.kept_count = plan.kept_count();
        m.kept_ratio = plan.kept_ratio;
        m.threshold = plan.threshold;
        double loss_sum = 0.0;
        for (const double l : kept_losses) loss_sum += l;
        m.mean_train_loss = kept_losses.empty() ? 0.0 : loss_sum / static_cast<double>(kept_losses.size());
        m.eval_metric = evaluate(model, eval_target);
        m.cumulative_sample_forwards = forwards;
        m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        result.epochs.push_back(m);
        if (on_epoch) on_epoch(m);
    }
    return result;
}

}  // namespace infobatch
