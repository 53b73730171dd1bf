#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "infobatch/dataset.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/rng.hpp"

namespace infobatch {

std::string_view to_string(LabelKind kind) noexcept {
    return kind == LabelKind::classification ? "classification" : "regression";
}

LabelKind parse_label_kind(std::string_view text) {
    if (text == "classification") return LabelKind::classification;
    if (text == "regression") return LabelKind::regression;
    throw InvalidArgument("label_kind must be classification or regression");
}

void Dataset::validate() const {
    const std::size_t n = features.rows();
    if (n == 0) throw InvalidArgument("dataset is empty");
    for (const double v : features.data()) {
        if (!std::isfinite(v)) throw InvalidArgument("dataset has a non-finite feature value");
    }
    if (label_kind == LabelKind::classification) {
        if (classes.size() != n) throw InvalidArgument("dataset label count does not match row count");
        for (const int c : classes) {
            if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
                throw InvalidArgument("dataset class label out of range");
            }
        }
    } else {
        if (targets.size() != n) throw InvalidArgument("dataset target count does not match row count");
        for (const double t : targets) {
            if (!std::isfinite(t)) throw InvalidArgument("dataset has a non-finite target");
        }
    }
}

Dataset gen_blobs(const BlobSpec& spec) {
    if (spec.classes < 2) throw InvalidArgument("blobs: classes must be at least 2");
    if (spec.per_class < 1) throw InvalidArgument("blobs: per_class must be at least 1");
    if (spec.dim < 1) throw InvalidArgument("blobs: dim must be at least 1");
    if (!(spec.separation > 0.0)) throw InvalidArgument("blobs: separation must be positive");
    if (!(spec.noise >= 0.0)) throw InvalidArgument("blobs: noise must be non-negative");

    const std::size_t k = spec.classes;
    const std::size_t d = spec.dim;
    rng::Stream centers_rng(rng::derive_key(spec.seed, rng::tag::dataset), 0);

    Matrix centers(k, d);
    for (;;) {
        for (double& v : centers.data()) v = centers_rng.uniform();
        double closest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = centers(i, c) - centers(j, c);
                    d2 += diff * diff;
                }
                closest = std::min(closest, std::sqrt(d2));
            }
        }
        if (closest > 1e-6) {
            const double scale = spec.separation / closest;
            for (double& v : centers.data()) v *= scale;
            break;
        }
    }

    Dataset data;
    data.label_kind = LabelKind::classification;
    data.num_classes = k;
    data.features = Matrix(k * spec.per_class, d);
    data.classes.resize(k * spec.per_class);
    rng::Stream noise_rng(rng::derive_key(spec.seed, rng::tag::dataset), 1);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t s = 0; s < spec.per_class; ++s) {
            const std::size_t row = c * spec.per_class + s;
            data.classes[row] = static_cast<int>(c);
            for (std::size_t j = 0; j < d; ++j) {
                const double jitter = spec.noise > 0.0 ? spec.noise * noise_rng.normal() : 0.0;
                data.features(row, j) = centers(c, j) + jitter;
            }
        }
    }
    data.provenance = {{"generator", "blobs"},     {"classes", k},
                       {"per_class", spec.per_class}, {"dim", d},
                       {"separation", spec.separation}, {"noise", spec.noise},
                       {"seed", spec.seed},         {"standardized", false}};
    return data;
}

double QuadraticSet::loss(std::size_t i, std::span<const double> theta) const {
    double total = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        const double diff = theta[k] - b(i, k);
        total += 0.5 * a(i, k) * diff * diff;
    }
    return total;
}

void QuadraticSet::gradient(std::size_t i, std::span<const double> theta, std::span<double> out) const {
    for (std::size_t k = 0; k < dim(); ++k) out[k] = a(i, k) * (theta[k] - b(i, k));
}

std::vector<double> QuadraticSet::losses(std::span<const double> theta) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = loss(i, theta);
    return out;
}

Matrix QuadraticSet::gradients(std::span<const double> theta) const {
    Matrix g(size(), dim());
    for (std::size_t i = 0; i < size(); ++i) gradient(i, theta, g.row(i));
    return g;
}

double QuadraticSet::mean_loss(std::span<const double> theta) const {
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) total += loss(i, theta);
    return total / static_cast<double>(size());
}

QuadraticSet gen_quadratic(const QuadraticSpec& spec) {
    if (spec.n < 1 || spec.dim < 1) throw InvalidArgument("quadratic: n and dim must be positive");
    if (!(spec.a_lo > 0.0) || spec.a_hi < spec.a_lo) {
        throw InvalidArgument("quadratic: a-range must be positive with a_lo <= a_hi");
    }
    if (spec.b_hi < spec.b_lo) throw InvalidArgument("quadratic: b-range must satisfy b_lo <= b_hi");
    QuadraticSet qs{Matrix(spec.n, spec.dim), Matrix(spec.n, spec.dim)};
    rng::Stream stream(rng::derive_key(spec.seed, rng::tag::dataset), 2);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t k = 0; k < spec.dim; ++k) {
            qs.a(i, k) = stream.uniform(spec.a_lo, spec.a_hi);
            qs.b(i, k) = stream.uniform(spec.b_lo, spec.b_hi);
        }
    }
    return qs;
}

}  // namespace infobatch
