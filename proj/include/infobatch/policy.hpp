#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace infobatch {

enum class PolicyKind { info_batch, static_hard, dynamic_random, none };
enum class RescaleMode { per_sample, global };

/// Second, more aggressive prune rate for the lowest-scoring band.
struct Tier {
    double quantile = 0.2;      ///< band is every score <= quantile(scores, q)
    double r_aggressive = 0.75;
};

struct PrunePolicy {
    PolicyKind kind = PolicyKind::info_batch;
    double r = 0.5;              ///< prune probability for below-mean samples
    double delta = 0.875;        ///< prune only while epoch < delta * total_epochs
    std::size_t total_epochs = 1;
    RescaleMode rescale_mode = RescaleMode::per_sample;
    std::optional<Tier> tier;
    double keep_prob = 1.0;      ///< dynamic_random
    double keep_fraction = 1.0;  ///< static_hard

    /// Throws InvalidArgument naming the offending field ("policy.r", ...).
    void validate() const;

    /// Epochs below this index may prune; real-valued, zero-indexed.
    bool prunes_at(std::size_t epoch) const noexcept {
        return static_cast<double>(epoch) < delta * static_cast<double>(total_epochs);
    }

    static PrunePolicy none(std::size_t total_epochs);
    static PrunePolicy info_batch(double r, double delta, std::size_t total_epochs);
    static PrunePolicy dynamic_random(double keep_prob, std::size_t total_epochs);
    static PrunePolicy static_hard(double keep_fraction, std::size_t total_epochs);
};

std::string_view to_string(PolicyKind kind) noexcept;
std::string_view to_string(RescaleMode mode) noexcept;
PolicyKind parse_policy_kind(std::string_view text);
RescaleMode parse_rescale_mode(std::string_view text);

}  // namespace infobatch
