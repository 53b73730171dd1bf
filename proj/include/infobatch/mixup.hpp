#pragma once

#include <span>
#include <vector>

#include "infobatch/matrix.hpp"

namespace infobatch {

/// Per-sample scores recovered from a MixUp/CutMix batch.
///
/// Batch-level mixing pairs sample i with j = B-1-i, so row i of
/// `mixed_probs` is the prediction for alpha*x_i + (1-alpha)*x_j. The estimate is
///     score_i = P_{i-mix}[y_i] + P_{j-mix}[y_i].
/// `alpha` is only validated; the estimate does not depend on it.
///
/// Throws InvalidArgument for an odd batch (sample B/2 would mix with itself),
/// mismatched sizes, labels out of range or alpha outside (0, 1]; throws
/// DataCorruption when a row is not a probability vector (sum off by > 1e-6).
std::vector<double> reconstruct_mixup_scores(const Matrix& mixed_probs, std::span<const int> labels, double alpha);

}  // namespace infobatch
