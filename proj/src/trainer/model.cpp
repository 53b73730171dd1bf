#include "infobatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infobatch/errors.hpp"
#include "infobatch/rng.hpp"

namespace infobatch {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::linear_regression: return "linear_regression";
        case ModelKind::logistic_regression: return "logistic_regression";
        case ModelKind::mlp: return "mlp";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view text) {
    for (auto k : {ModelKind::linear_regression, ModelKind::logistic_regression, ModelKind::mlp}) {
        if (text == to_string(k)) return k;
    }
    throw InvalidArgument("model.kind must be one of linear_regression, logistic_regression, mlp");
}

DenseModel::DenseModel(ModelKind kind, std::vector<std::size_t> sizes) : kind_(kind), sizes_(std::move(sizes)) {
    for (const std::size_t s : sizes_) {
        if (s == 0) throw InvalidArgument("model layer sizes must be positive");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(total);
        total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    }
    params_.assign(total, 0.0);
    grad_.assign(total, 0.0);
}

DenseModel DenseModel::linear_regression(std::size_t inputs) {
    return DenseModel(ModelKind::linear_regression, {inputs, 1});
}

DenseModel DenseModel::logistic_regression(std::size_t inputs, std::size_t classes) {
    if (classes < 2) throw InvalidArgument("logistic regression needs at least 2 classes");
    return DenseModel(ModelKind::logistic_regression, {inputs, classes});
}

DenseModel DenseModel::mlp(std::size_t inputs, std::vector<std::size_t> hidden, std::size_t classes) {
    if (hidden.empty()) throw InvalidArgument("mlp needs at least one hidden layer");
    if (classes < 2) throw InvalidArgument("mlp classifier needs at least 2 classes");
    std::vector<std::size_t> sizes{inputs};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(classes);
    return DenseModel(ModelKind::mlp, std::move(sizes));
}

void DenseModel::initialize(std::uint64_t seed) {
    rng::Stream stream(rng::derive_key(seed, rng::tag::init), 0);
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        double* w = params_.data() + offsets_[l];
        for (std::size_t i = 0; i < out * in; ++i) w[i] = stream.uniform(-limit, limit);
        std::fill(w + out * in, w + out * in + out, 0.0);
    }
}

void DenseModel::zero_grad() noexcept { std::fill(grad_.begin(), grad_.end(), 0.0); }

namespace {

void check_shapes(const DenseModel& model, const Dataset& data, std::span<const std::size_t> ids) {
    if (data.dim() != model.input_dim()) {
        throw InvalidArgument("feature width " + std::to_string(data.dim()) + " does not match model input " +
                              std::to_string(model.input_dim()));
    }
    if (model.is_classifier()) {
        if (data.label_kind != LabelKind::classification) throw InvalidArgument("classifier needs class labels");
        if (data.num_classes > model.output_dim()) {
            throw InvalidArgument("dataset has " + std::to_string(data.num_classes) + " classes, model outputs " +
                                  std::to_string(model.output_dim()));
        }
    } else if (data.label_kind != LabelKind::regression) {
        throw InvalidArgument("regression model needs real-valued targets");
    }
    for (const std::size_t id : ids) {
        if (id >= data.size()) throw InvalidArgument("sample id " + std::to_string(id) + " out of range");
    }
}

// Activations of one sample: acts[0] is the input, acts[l+1] the post-ReLU
// output of layer l (raw logits / prediction for the last layer).
struct Trace {
    std::vector<std::vector<double>> acts;
};

void forward_one(const DenseModel& model, std::span<const double> x, std::size_t id, Trace& trace) {
    const auto sizes = model.layer_sizes();
    const auto params = model.params();
    const std::size_t layers = model.num_layers();
    trace.acts.resize(layers + 1);
    trace.acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = sizes[l];
        const std::size_t out = sizes[l + 1];
        const double* w = params.data() + model.weight_offset(l);
        const double* b = w + out * in;
        const auto& prev = trace.acts[l];
        auto& cur = trace.acts[l + 1];
        cur.assign(out, 0.0);
        const bool hidden = l + 1 < layers;
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * prev[i];
            if (!std::isfinite(z)) {
                throw NumericOverflow("non-finite activation in layer " + std::to_string(l) + " for sample " +
                                      std::to_string(id));
            }
            cur[o] = hidden ? std::max(z, 0.0) : z;
        }
    }
}

// Loss of the last layer in place: logits become probabilities for classifiers.
double head_loss(const DenseModel& model, const Dataset& data, std::size_t id, std::vector<double>& out) {
    if (!model.is_classifier()) {
        const double diff = out[0] - data.targets[id];
        return 0.5 * diff * diff;
    }
    const auto y = static_cast<std::size_t>(data.classes[id]);
    const double top = *std::max_element(out.begin(), out.end());
    const double shifted_target = out[y] - top;
    double sum = 0.0;
    for (double& v : out) {
        v = std::exp(v - top);
        sum += v;
    }
    for (double& v : out) v /= sum;
    return std::log(sum) - shifted_target;
}

}  // namespace

ForwardResult forward_per_sample(const DenseModel& model, const Dataset& data, std::span<const std::size_t> ids) {
    check_shapes(model, data, ids);
    ForwardResult result;
    result.losses.resize(ids.size());
    result.outputs = Matrix(ids.size(), model.output_dim());
    Trace trace;
    for (std::size_t s = 0; s < ids.size(); ++s) {
        const std::size_t id = ids[s];
        forward_one(model, data.features.row(id), id, trace);
        auto& out = trace.acts.back();
        result.losses[s] = head_loss(model, data, id, out);
        if (!std::isfinite(result.losses[s])) {
            throw NumericOverflow("non-finite loss for sample " + std::to_string(id));
        }
        std::copy(out.begin(), out.end(), result.outputs.row(s).begin());
    }
    return result;
}

std::vector<double> backward_weighted(DenseModel& model, const Dataset& data, std::span<const std::size_t> ids,
                                      std::span<const double> weights) {
    if (weights.size() != ids.size()) throw InvalidArgument("one weight per sample required");
    check_shapes(model, data, ids);
    for (const double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("sample weights must be positive and finite");
    }
    const auto sizes = model.layer_sizes();
    const std::size_t layers = model.num_layers();
    const auto params = model.params();
    auto grad = model.grad();
    const double inv_batch = 1.0 / static_cast<double>(ids.size());

    std::vector<double> losses(ids.size());
    Trace trace;
    std::vector<double> delta, prev_delta;
    for (std::size_t s = 0; s < ids.size(); ++s) {
        const std::size_t id = ids[s];
        forward_one(model, data.features.row(id), id, trace);
        auto& out = trace.acts.back();
        losses[s] = head_loss(model, data, id, out);
        if (!std::isfinite(losses[s])) throw NumericOverflow("non-finite loss for sample " + std::to_string(id));

        const double scale = weights[s] * inv_batch;
        delta = out;
        if (model.is_classifier()) {
            delta[static_cast<std::size_t>(data.classes[id])] -= 1.0;
        } else {
            delta[0] -= data.targets[id];
        }
        for (double& v : delta) v *= scale;

        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t in = sizes[l];
            const std::size_t out_dim = sizes[l + 1];
            const std::size_t off = model.weight_offset(l);
            const auto& input = trace.acts[l];
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                double* gw = grad.data() + off + o * in;
                for (std::size_t i = 0; i < in; ++i) gw[i] += d * input[i];
                grad[off + out_dim * in + o] += d;
            }
            if (l == 0) break;
            // Propagate through W^T and the ReLU of layer l-1 (active where its output > 0).
            prev_delta.assign(in, 0.0);
            const double* w = params.data() + off;
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                for (std::size_t i = 0; i < in; ++i) prev_delta[i] += w[o * in + i] * d;
            }
            for (std::size_t i = 0; i < in; ++i) {
                if (input[i] <= 0.0) prev_delta[i] = 0.0;
            }
            delta.swap(prev_delta);
        }
    }
    return losses;
}

double evaluate(const DenseModel& model, const Dataset& data) {
    std::vector<std::size_t> ids(data.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    const auto result = forward_per_sample(model, data, ids);
    if (!model.is_classifier()) {
        double total = 0.0;
        for (const double l : result.losses) total += l;
        return total / static_cast<double>(data.size());
    }
    std::size_t correct = 0;
    for (std::size_t s = 0; s < ids.size(); ++s) {
        const auto row = result.outputs.row(s);
        const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        if (best == static_cast<std::size_t>(data.classes[s])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace infobatch
