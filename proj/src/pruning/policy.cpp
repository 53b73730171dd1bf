#include "infobatch/policy.hpp"

#include <string>

#include "infobatch/errors.hpp"

namespace infobatch {

namespace {

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) throw InvalidArgument(std::string(field) + " must be " + constraint);
}

}  // namespace

void PrunePolicy::validate() const {
    require(total_epochs >= 1, "policy.total_epochs", "at least 1");
    switch (kind) {
        case PolicyKind::info_batch:
            // r = 0 is accepted as the degenerate no-prune case.
            require(r >= 0.0 && r < 1.0, "policy.r", "in [0, 1)");
            require(delta > 0.0 && delta <= 1.0, "policy.delta", "in (0, 1]");
            if (tier) {
                require(tier->quantile > 0.0 && tier->quantile < 1.0, "policy.tier.quantile", "in (0, 1)");
                require(tier->r_aggressive >= r && tier->r_aggressive < 1.0, "policy.tier.r_aggressive",
                        "in [policy.r, 1)");
            }
            break;
        case PolicyKind::dynamic_random:
            require(keep_prob > 0.0 && keep_prob <= 1.0, "policy.keep_prob", "in (0, 1]");
            break;
        case PolicyKind::static_hard:
            require(keep_fraction > 0.0 && keep_fraction <= 1.0, "policy.keep_fraction", "in (0, 1]");
            break;
        case PolicyKind::none:
            break;
    }
}

PrunePolicy PrunePolicy::none(std::size_t total_epochs) {
    PrunePolicy p;
    p.kind = PolicyKind::none;
    p.total_epochs = total_epochs;
    return p;
}

PrunePolicy PrunePolicy::info_batch(double r, double delta, std::size_t total_epochs) {
    PrunePolicy p;
    p.kind = PolicyKind::info_batch;
    p.r = r;
    p.delta = delta;
    p.total_epochs = total_epochs;
    return p;
}

PrunePolicy PrunePolicy::dynamic_random(double keep_prob, std::size_t total_epochs) {
    PrunePolicy p;
    p.kind = PolicyKind::dynamic_random;
    p.keep_prob = keep_prob;
    p.total_epochs = total_epochs;
    return p;
}

PrunePolicy PrunePolicy::static_hard(double keep_fraction, std::size_t total_epochs) {
    PrunePolicy p;
    p.kind = PolicyKind::static_hard;
    p.keep_fraction = keep_fraction;
    p.total_epochs = total_epochs;
    return p;
}

std::string_view to_string(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::info_batch: return "info_batch";
        case PolicyKind::static_hard: return "static_hard";
        case PolicyKind::dynamic_random: return "dynamic_random";
        case PolicyKind::none: return "none";
    }
    return "?";
}

std::string_view to_string(RescaleMode mode) noexcept {
    return mode == RescaleMode::per_sample ? "per_sample" : "global";
}

PolicyKind parse_policy_kind(std::string_view text) {
    for (auto k : {PolicyKind::info_batch, PolicyKind::static_hard, PolicyKind::dynamic_random, PolicyKind::none}) {
        if (text == to_string(k)) return k;
    }
    throw InvalidArgument("policy.kind must be one of info_batch, static_hard, dynamic_random, none");
}

RescaleMode parse_rescale_mode(std::string_view text) {
    if (text == "per_sample") return RescaleMode::per_sample;
    if (text == "global") return RescaleMode::global;
    throw InvalidArgument("policy.rescale_mode must be per_sample or global");
}

}  // namespace infobatch
