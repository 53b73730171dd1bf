#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "infobatch/dataset.hpp"
#include "infobatch/matrix.hpp"

namespace infobatch {

enum class ModelKind { linear_regression, logistic_regression, mlp };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

/// Fully connected network stored as one flat parameter vector.
///
/// Layer l owns a row-major (out x in) weight block followed by its bias.
/// Hidden layers use ReLU. Classifiers (logistic_regression, mlp) end in a
/// softmax with cross-entropy; linear_regression has one output and the loss
/// 1/2 (y_hat - y)^2.
class DenseModel {
public:
    static DenseModel linear_regression(std::size_t inputs);
    static DenseModel logistic_regression(std::size_t inputs, std::size_t classes);
    static DenseModel mlp(std::size_t inputs, std::vector<std::size_t> hidden, std::size_t classes);

    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    void initialize(std::uint64_t seed);

    ModelKind kind() const noexcept { return kind_; }
    bool is_classifier() const noexcept { return kind_ != ModelKind::linear_regression; }
    std::span<const std::size_t> layer_sizes() const noexcept { return sizes_; }
    std::size_t input_dim() const noexcept { return sizes_.front(); }
    std::size_t output_dim() const noexcept { return sizes_.back(); }
    std::size_t num_layers() const noexcept { return sizes_.size() - 1; }

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<double> grad() noexcept { return grad_; }
    std::span<const double> grad() const noexcept { return grad_; }
    void zero_grad() noexcept;

    /// Offset of layer l's weight block; its bias follows at weight_offset + out*in.
    std::size_t weight_offset(std::size_t layer) const noexcept { return offsets_[layer]; }

private:
    DenseModel(ModelKind kind, std::vector<std::size_t> sizes);

    ModelKind kind_;
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
    std::vector<double> grad_;
};

struct ForwardResult {
    std::vector<double> losses;  ///< one per requested sample
    Matrix outputs;              ///< class probabilities, or the regression prediction
};

/// Per-sample losses for the rows `ids` of `data`. Throws InvalidArgument on a
/// shape/label mismatch and NumericOverflow on a non-finite activation.
ForwardResult forward_per_sample(const DenseModel& model, const Dataset& data, std::span<const std::size_t> ids);

/// Accumulates the gradient of (1/B) * sum_i weights[i] * L_i into model.grad()
/// and returns the per-sample losses observed on the way (B = ids.size()).
std::vector<double> backward_weighted(DenseModel& model, const Dataset& data, std::span<const std::size_t> ids,
                                      std::span<const double> weights);

/// Accuracy for classifiers (argmax, ties to the lower class), mean loss for regression.
double evaluate(const DenseModel& model, const Dataset& data);

}  // namespace infobatch
