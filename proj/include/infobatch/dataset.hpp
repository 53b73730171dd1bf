#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infobatch/matrix.hpp"

namespace infobatch {

enum class LabelKind { classification, regression };

std::string_view to_string(LabelKind kind) noexcept;
LabelKind parse_label_kind(std::string_view text);

/// Immutable after construction; safe to share across threads.
struct Dataset {
    Matrix features;                  ///< N x d
    LabelKind label_kind = LabelKind::classification;
    std::vector<int> classes;         ///< classification labels in [0, num_classes)
    std::vector<double> targets;      ///< regression targets
    std::size_t num_classes = 0;
    nlohmann::json provenance;        ///< generator parameters or file path + digest

    std::size_t size() const noexcept { return features.rows(); }
    std::size_t dim() const noexcept { return features.cols(); }

    /// Throws InvalidArgument if the invariants do not hold.
    void validate() const;
};

struct BlobSpec {
    std::size_t classes = 2;
    std::size_t per_class = 100;
    std::size_t dim = 2;
    double separation = 4.0;
    double noise = 1.0;
    std::uint64_t seed = 0;
};

/// Isotropic Gaussian clusters. Centers are drawn in the unit cube and scaled
/// so the closest pair sits exactly `separation` apart. Samples are grouped by class.
Dataset gen_blobs(const BlobSpec& spec);

/// Per-sample quadratic losses L_i(theta) = 1/2 * sum_k a_ik (theta_k - b_ik)^2.
struct QuadraticSet {
    Matrix a;  ///< N x p curvature, strictly positive
    Matrix b;  ///< N x p minimizers

    std::size_t size() const noexcept { return a.rows(); }
    std::size_t dim() const noexcept { return a.cols(); }

    double loss(std::size_t i, std::span<const double> theta) const;
    void gradient(std::size_t i, std::span<const double> theta, std::span<double> out) const;
    std::vector<double> losses(std::span<const double> theta) const;
    /// Per-sample gradients, N x p.
    Matrix gradients(std::span<const double> theta) const;
    /// Full-data mean loss.
    double mean_loss(std::span<const double> theta) const;
};

struct QuadraticSpec {
    std::size_t n = 100;
    std::size_t dim = 1;
    double a_lo = 1.0, a_hi = 1.0;
    double b_lo = 0.0, b_hi = 0.0;
    std::uint64_t seed = 0;
};

QuadraticSet gen_quadratic(const QuadraticSpec& spec);

struct CsvSchema {
    std::vector<std::string> feature_columns;
    std::string label_column;
    LabelKind label_kind = LabelKind::classification;
};

/// Comma-separated, header row, plain decimal numbers. Errors name the data row
/// (1-based, header excluded) and the column.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes features and labels using shortest round-trip formatting.
void write_csv(const std::filesystem::path& path, const Dataset& data, std::span<const std::string> feature_names,
               const std::string& label_name);

/// Zero mean, unit variance per feature (constant columns are only centered).
Dataset standardized(Dataset data);

Dataset subset(const Dataset& data, std::span<const std::size_t> ids);

/// Seeded permutation split; the second set holds round(eval_fraction * N) samples.
std::pair<Dataset, Dataset> split(const Dataset& data, double eval_fraction, std::uint64_t seed);

/// Seeded permutation of `kept_ids` chunked into ceil(|kept|/B) batches; the last may be short.
std::vector<std::vector<std::size_t>> batches(const Dataset& data, std::span<const std::size_t> kept_ids,
                                              std::size_t batch_size, std::uint64_t seed);

/// Fisher-Yates driven by the counter generator (platform-independent).
void seeded_shuffle(std::span<std::size_t> ids, std::uint64_t seed);

}  // namespace infobatch
