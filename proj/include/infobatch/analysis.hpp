#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infobatch/dataset.hpp"
#include "infobatch/matrix.hpp"
#include "infobatch/policy.hpp"

namespace infobatch::analysis {

/// Full-data gradient (1/N) sum_i a_i (theta - b_i), per coordinate.
std::vector<double> exact_quadratic_gradient(const QuadraticSet& qs, std::span<const double> theta);

/// Monte-Carlo statistics of the rescaled subset gradient
///     g(S) = (1/|S|) sum_{z in S} gamma_z G_z
/// over independent plans drawn from `policy` at epoch 0 of a table holding `scores`.
struct McGradient {
    std::vector<double> mean;             ///< E[g(S)] estimate
    std::vector<double> mean_stderr;      ///< standard error of `mean`
    std::vector<double> plan_variance;    ///< Var over plans of g(S)
    std::vector<double> sample_variance;  ///< Var of gamma_z G_z, z uniform on S, S random
    double mean_kept_ratio = 0.0;
    double mean_weight_mass = 0.0;        ///< E[sum of kept weights]
    double weight_mass_stderr = 0.0;
    std::size_t trials = 0;
};

/// Each trial derives its seed from (seed, trial index), so results do not depend
/// on execution order. Throws InvalidArgument for trials == 0 or mismatched sizes.
McGradient mc_policy_gradient(const QuadraticSet& qs, std::span<const double> theta, std::span<const double> scores,
                              const PrunePolicy& policy, std::size_t trials, std::uint64_t seed);

/// Gradient the rescaled estimator targets: (|D| / E|S_t|) * exact gradient.
std::vector<double> rescaled_reference(const QuadraticSet& qs, std::span<const double> theta,
                                       std::span<const double> scores, const PrunePolicy& policy);

struct PolicyBias {
    double direction = 0.0;        ///< 1 - cos(mean, reference)
    double magnitude_ratio = 1.0;  ///< |mean| / |reference|
    McGradient mc;
};

PolicyBias policy_bias(const QuadraticSet& qs, std::span<const double> theta, std::span<const double> scores,
                       const PrunePolicy& policy, std::size_t trials, std::uint64_t seed);

/// Per-coordinate variance of one rescaled per-sample gradient under prune
/// probabilities P_t(z):
///     (1/|S_t|) sum_z G_z^2 / (1 - P_t(z)) - (|D|^2 / |S_t|^2) G^2.
/// Throws InvalidArgument when some P_t(z) is outside [0, 1).
std::vector<double> analytic_policy_variance(const Matrix& per_sample_gradients, std::span<const double> probs,
                                             double kept_size);

/// Var[G_D] per coordinate: mean of G_z^2 minus squared mean.
std::vector<double> population_variance(const Matrix& per_sample_gradients);

/// True when, on every coordinate, E_{z: P(z) > 0}[G_z^2 / (1 - P(z))] <= E_D[G_z^2],
/// the condition under which pruning-with-rescaling does not inflate variance.
bool rescale_variance_condition(const Matrix& per_sample_gradients, std::span<const double> probs);

/// Largest SGD step for which the second-order expected loss change is negative
/// under the rescaled estimator:
///     2 |G|^2 |S_t| / ((G^T H G + tr(H Sigma) / B) |D|)
/// with H = diag(mean a) and Sigma the per-sample gradient covariance.
/// Returns nullopt (unbounded) when the gradient is zero.
std::optional<double> lr_stability_bound(const QuadraticSet& qs, std::span<const double> theta,
                                         std::size_t batch_size, double kept_ratio);

struct DescentOutcome {
    double initial_loss = 0.0;
    double mean_final_loss = 0.0;
    double final_loss_stderr = 0.0;
};

/// SGD on the full-data quadratic loss with the pruned, rescaled estimator: each
/// step re-plans from the current per-sample losses, draws B kept samples with
/// replacement and applies theta -= lr * (1/B) sum gamma_z G_z.
DescentOutcome simulate_rescaled_descent(const QuadraticSet& qs, std::span<const double> theta0, double lr,
                                         std::size_t steps, std::size_t batch_size, const PrunePolicy& policy,
                                         std::size_t runs, std::uint64_t seed);

/// Two-dimensional set whose low-loss half pulls along the first axis and whose
/// high-loss half pulls along the second; evaluate at the origin. Keeping only
/// the high-loss half tilts the gradient direction by about 45 degrees.
QuadraticSet skewed_quadratic(std::size_t n, std::uint64_t seed);

struct BenchResult {
    std::size_t n = 0;
    std::size_t trials = 0;
    double mean_ms = 0.0;      ///< median time of mean_threshold
    double quantile_ms = 0.0;  ///< median time of quantile(q = 0.5)
    double sort_ms = 0.0;      ///< median time of std::sort on a copy
};

/// Wall-clock medians over `trials` runs on one random array. Throws
/// InvalidArgument when n < 1000 or trials == 0.
BenchResult bench_threshold_vs_sort(std::size_t n, std::size_t trials, std::uint64_t seed = 0);

/// Median wall time (ms) of plan_epoch for an info_batch policy over n random scores.
double bench_plan_epoch(std::size_t n, std::size_t trials, std::uint64_t seed = 0);

/// One verification outcome, serialized as a JSON Lines record.
struct CheckRecord {
    std::string test;
    double statistic = 0.0;
    double stderr_ = 0.0;
    double threshold = 0.0;
    bool pass = false;

    std::string to_json_line() const;
};

inline constexpr std::string_view kSuites[] = {"unbiasedness", "variance", "annealing", "lr_bound", "mixup"};

/// Runs a named property suite. Throws InvalidArgument for an unknown name.
std::vector<CheckRecord> run_suite(std::string_view name, std::uint64_t seed);

}  // namespace infobatch::analysis
