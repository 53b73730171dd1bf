#include "infobatch/mixup.hpp"

#include <cmath>
#include <string>

#include "infobatch/errors.hpp"

namespace infobatch {

std::vector<double> reconstruct_mixup_scores(const Matrix& mixed_probs, std::span<const int> labels, double alpha) {
    const std::size_t batch = mixed_probs.rows();
    const std::size_t classes = mixed_probs.cols();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("mixup: alpha must be in (0, 1]");
    if (batch == 0) throw InvalidArgument("mixup: empty batch");
    if (batch % 2 != 0) {
        throw InvalidArgument("mixup: batch of " + std::to_string(batch) + " leaves sample " +
                              std::to_string(batch / 2) + " unpaired");
    }
    if (labels.size() != batch) throw InvalidArgument("mixup: label count does not match batch size");

    for (std::size_t i = 0; i < batch; ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
            throw InvalidArgument("mixup: label of sample " + std::to_string(i) + " out of range");
        }
        double sum = 0.0;
        for (const double p : mixed_probs.row(i)) {
            if (!std::isfinite(p) || p < 0.0) {
                throw DataCorruption("mixup: invalid probability in row " + std::to_string(i));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw DataCorruption("mixup: probabilities of row " + std::to_string(i) + " sum to " + std::to_string(sum));
        }
    }

    std::vector<double> scores(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t partner = batch - 1 - i;
        const auto y = static_cast<std::size_t>(labels[i]);
        scores[i] = mixed_probs(i, y) + mixed_probs(partner, y);
    }
    return scores;
}

}  // namespace infobatch
