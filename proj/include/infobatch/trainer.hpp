#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "infobatch/dataset.hpp"
#include "infobatch/model.hpp"
#include "infobatch/optimizer.hpp"
#include "infobatch/policy.hpp"

namespace infobatch {

struct ModelSpec {
    ModelKind kind = ModelKind::mlp;
    std::vector<std::size_t> hidden{16};  ///< mlp only
};

struct TrainConfig {
    ModelSpec model;
    double lr_max = 0.1;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    ScheduleKind schedule = ScheduleKind::onecycle;
    double warmup_fraction = 0.3;
    bool lr_autoscale = false;  ///< multiply the rate by |D|/|S_t| each epoch
    std::size_t epochs = 1;
    std::size_t batch_size = 128;
    PrunePolicy policy;  ///< total_epochs is overwritten with `epochs`
    std::uint64_t seed = 0;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    std::size_t kept_count = 0;
    double kept_ratio = 1.0;
    double threshold = 0.0;
    double mean_train_loss = 0.0;
    double eval_metric = 0.0;
    std::size_t cumulative_sample_forwards = 0;
    double wall_ms = 0.0;

    /// Equality ignoring wall time.
    bool same_outcome(const EpochMetrics& other) const noexcept;
};

struct TrainResult {
    std::vector<EpochMetrics> epochs;
    DenseModel model;
    std::size_t scheduled_steps = 0;
    std::size_t realized_steps = 0;
    std::size_t dataset_size = 0;
};

DenseModel build_model(const ModelSpec& spec, const Dataset& data, std::uint64_t seed);

/// Expected kept fraction per epoch assumed when sizing the schedule before
/// any loss has been seen (half the scores below the mean).
double prior_kept_fraction(const PrunePolicy& policy, std::size_t epoch);

/// Sum over epochs of ceil(ceil(f_t * N) / B).
std::size_t planned_steps(const TrainConfig& config, std::size_t dataset_size);

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Runs the pruned training loop. Numeric failures are rethrown as
/// NumericOverflow with epoch/batch context. `eval_set` may be empty, in
/// which case the training set is evaluated.
TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& eval_set,
                  const EpochCallback& on_epoch = {});

}  // namespace infobatch
