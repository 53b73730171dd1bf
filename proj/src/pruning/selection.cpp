#include "infobatch/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "infobatch/errors.hpp"

namespace infobatch {

double compensated_sum(std::span<const double> values) noexcept {
    double sum = 0.0;
    double carry = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

double mean_threshold(std::span<const double> scores) {
    if (scores.empty()) throw InvalidArgument("mean_threshold: empty score array");
    // A NaN or infinity anywhere makes the compensated sum non-finite, so the
    // offending entry is only searched for on that path.
    const double sum = compensated_sum(scores);
    if (!std::isfinite(sum)) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (!std::isfinite(scores[i])) {
                throw DataCorruption("mean_threshold: non-finite score at sample " + std::to_string(i));
            }
        }
        throw DataCorruption("mean_threshold: score sum overflowed");
    }
    return sum / static_cast<double>(scores.size());
}

double quantile(std::span<const double> scores, double q) {
    if (scores.empty()) throw InvalidArgument("quantile: empty array");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile: q must lie in [0, 1]");
    for (const double v : scores) {
        if (!std::isfinite(v)) throw DataCorruption("quantile: non-finite entry");
    }
    const std::size_t n = scores.size();
    // q*n can land a hair above an integer (0.7 * 10 = 7.000000000000001); snap it back.
    const double target = q * static_cast<double>(n);
    const double lower = std::floor(target);
    const double ranked = (target - lower) <= 1e-9 * std::max(1.0, target) ? lower : std::ceil(target);
    const auto rank = std::clamp<std::size_t>(static_cast<std::size_t>(ranked), 1, n);
    std::vector<double> work(scores.begin(), scores.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

}  // namespace infobatch
