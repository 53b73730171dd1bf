#pragma once

#include <span>

namespace infobatch {

/// Neumaier-compensated sum. Error is bounded by a few ulps of the result
/// independently of the length, which keeps the mean threshold stable at 1e7 entries.
double compensated_sum(std::span<const double> values) noexcept;

/// Arithmetic mean used as the pruning threshold. Linear time, no sorting.
/// Throws DataCorruption on a non-finite entry, InvalidArgument on empty input.
double mean_threshold(std::span<const double> scores);

/// Nearest-rank quantile: the smallest element v with at least ceil(q*N) entries <= v
/// (q = 0 yields the minimum). Expected linear time via selection on a copy.
double quantile(std::span<const double> scores, double q);

}  // namespace infobatch
