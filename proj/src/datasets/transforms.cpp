#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "infobatch/dataset.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/rng.hpp"

namespace infobatch {

Dataset standardized(Dataset data) {
    const std::size_t n = data.size();
    for (std::size_t j = 0; j < data.dim(); ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += data.features(r, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double diff = data.features(r, j) - mean;
            var += diff * diff;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (std::size_t r = 0; r < n; ++r) {
            data.features(r, j) -= mean;
            if (sd > 0.0) data.features(r, j) /= sd;
        }
    }
    data.provenance["standardized"] = true;
    return data;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> ids) {
    Dataset out;
    out.label_kind = data.label_kind;
    out.num_classes = data.num_classes;
    out.provenance = data.provenance;
    out.features = Matrix(ids.size(), data.dim());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= data.size()) throw InvalidArgument("subset: id " + std::to_string(ids[r]) + " out of range");
        const auto src = data.features.row(ids[r]);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
        if (data.label_kind == LabelKind::classification) {
            out.classes.push_back(data.classes[ids[r]]);
        } else {
            out.targets.push_back(data.targets[ids[r]]);
        }
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double eval_fraction, std::uint64_t seed) {
    if (!(eval_fraction >= 0.0 && eval_fraction < 1.0)) throw InvalidArgument("eval_fraction must be in [0, 1)");
    std::vector<std::size_t> ids(data.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    seeded_shuffle(ids, rng::derive_key(seed, rng::tag::split));
    const auto n_eval = static_cast<std::size_t>(std::llround(eval_fraction * static_cast<double>(data.size())));
    if (n_eval >= data.size()) throw InvalidArgument("eval split leaves no training samples");
    const std::span<const std::size_t> all(ids);
    return {subset(data, all.subspan(n_eval)), subset(data, all.first(n_eval))};
}

void seeded_shuffle(std::span<std::size_t> ids, std::uint64_t seed) {
    rng::Stream stream(seed, 0);
    for (std::size_t i = ids.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.below(i));
        std::swap(ids[i - 1], ids[j]);
    }
}

std::vector<std::vector<std::size_t>> batches(const Dataset& data, std::span<const std::size_t> kept_ids,
                                              std::size_t batch_size, std::uint64_t seed) {
    if (batch_size == 0) throw InvalidArgument("batch size must be positive");
    for (const std::size_t id : kept_ids) {
        if (id >= data.size()) throw InvalidArgument("batches: id " + std::to_string(id) + " out of range");
    }
    std::vector<std::size_t> order(kept_ids.begin(), kept_ids.end());
    seeded_shuffle(order, seed);
    std::vector<std::vector<std::size_t>> out;
    out.reserve((order.size() + batch_size - 1) / batch_size);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(order.size(), start + batch_size);
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace infobatch
