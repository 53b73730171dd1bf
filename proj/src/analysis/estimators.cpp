#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "infobatch/analysis.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/planner.hpp"
#include "infobatch/rng.hpp"
#include "infobatch/selection.hpp"

namespace infobatch::analysis {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    return rng::mix64(rng::derive_key(seed, rng::tag::trial) + trial);
}

// Mean and variance of equally weighted observations, shifted by the first value so
// identical observations reproduce that value exactly with zero variance.
struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // population (1/T)
};

Moments moments(std::span<const double> xs) {
    const double origin = xs.front();
    std::vector<double> shifted(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] = xs[i] - origin;
    const double t = static_cast<double>(xs.size());
    const double shift_mean = compensated_sum(shifted) / t;
    for (double& v : shifted) v = (v - shift_mean) * (v - shift_mean);
    return {origin + shift_mean, compensated_sum(shifted) / t};
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

void check_inputs(const QuadraticSet& qs, std::span<const double> theta, std::span<const double> scores) {
    if (theta.size() != qs.dim()) throw InvalidArgument("theta has the wrong dimension");
    if (scores.size() != qs.size()) throw InvalidArgument("one score per quadratic sample required");
}

}  // namespace

std::vector<double> exact_quadratic_gradient(const QuadraticSet& qs, std::span<const double> theta) {
    if (theta.size() != qs.dim()) throw InvalidArgument("theta has the wrong dimension");
    const Matrix g = qs.gradients(theta);
    std::vector<double> column(qs.size());
    std::vector<double> out(qs.dim());
    for (std::size_t k = 0; k < qs.dim(); ++k) {
        for (std::size_t i = 0; i < qs.size(); ++i) column[i] = g(i, k);
        out[k] = compensated_sum(column) / static_cast<double>(qs.size());
    }
    return out;
}

McGradient mc_policy_gradient(const QuadraticSet& qs, std::span<const double> theta, std::span<const double> scores,
                              const PrunePolicy& policy, std::size_t trials, std::uint64_t seed) {
    check_inputs(qs, theta, scores);
    if (trials == 0) throw InvalidArgument("mc_policy_gradient: trials must be at least 1");
    const std::size_t p = qs.dim();
    const ScoreTable table(std::vector<double>(scores.begin(), scores.end()), 0);
    const Matrix grads = qs.gradients(theta);
    const bool seeded = policy.kind == PolicyKind::info_batch || policy.kind == PolicyKind::dynamic_random;
    std::optional<EpochPlan> fixed;
    if (!seeded) fixed = plan_epoch(table, policy, seed);

    // Per trial, per coordinate: rescaled subset mean and mean squared rescaled gradient.
    std::vector<std::vector<double>> estimate(p), second(p);
    std::vector<double> kept_ratio, mass;
    for (auto& v : estimate) v.reserve(trials);
    for (auto& v : second) v.reserve(trials);
    kept_ratio.reserve(trials);
    mass.reserve(trials);

    std::vector<double> terms, squares;
    for (std::size_t t = 0; t < trials; ++t) {
        const EpochPlan plan = fixed ? *fixed : plan_epoch(table, policy, trial_seed(seed, t));
        kept_ratio.push_back(plan.kept_ratio);
        mass.push_back(plan.weight_mass());
        // An empty subset has no gradient; it only counts toward the kept-ratio statistics.
        if (plan.kept_ids.empty()) continue;
        const double kept = static_cast<double>(plan.kept_count());
        terms.resize(plan.kept_count());
        squares.resize(plan.kept_count());
        for (std::size_t k = 0; k < p; ++k) {
            for (std::size_t i = 0; i < plan.kept_ids.size(); ++i) {
                const double g = plan.weights[i] * grads(plan.kept_ids[i], k);
                terms[i] = g;
                squares[i] = g * g;
            }
            estimate[k].push_back(compensated_sum(terms) / kept);
            second[k].push_back(compensated_sum(squares) / kept);
        }
    }
    if (estimate.front().empty()) throw InvalidArgument("mc_policy_gradient: every sampled plan was empty");

    McGradient out;
    out.trials = trials;
    const double used = static_cast<double>(estimate.front().size());
    for (std::size_t k = 0; k < p; ++k) {
        const Moments m = moments(estimate[k]);
        out.mean.push_back(m.mean);
        out.plan_variance.push_back(m.variance);
        out.mean_stderr.push_back(std::sqrt(m.variance / used));
        out.sample_variance.push_back(moments(second[k]).mean - m.mean * m.mean);
    }
    out.mean_kept_ratio = moments(kept_ratio).mean;
    const Moments mass_m = moments(mass);
    out.mean_weight_mass = mass_m.mean;
    out.weight_mass_stderr = std::sqrt(mass_m.variance / static_cast<double>(trials));
    return out;
}

std::vector<double> rescaled_reference(const QuadraticSet& qs, std::span<const double> theta,
                                       std::span<const double> scores, const PrunePolicy& policy) {
    check_inputs(qs, theta, scores);
    auto g = exact_quadratic_gradient(qs, theta);
    const double kept = expected_kept_fraction(scores, policy);
    for (double& v : g) v /= kept;
    return g;
}

PolicyBias policy_bias(const QuadraticSet& qs, std::span<const double> theta, std::span<const double> scores,
                       const PrunePolicy& policy, std::size_t trials, std::uint64_t seed) {
    PolicyBias out;
    out.mc = mc_policy_gradient(qs, theta, scores, policy, trials, seed);
    const auto reference = rescaled_reference(qs, theta, scores, policy);
    const double nm = norm(out.mc.mean);
    const double nr = norm(reference);
    if (nm == 0.0 || nr == 0.0) {
        out.direction = (nm == 0.0 && nr == 0.0) ? 0.0 : 1.0;
        out.magnitude_ratio = nr == 0.0 ? (nm == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : 0.0;
        return out;
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) dot += out.mc.mean[k] * reference[k];
    out.direction = 1.0 - dot / (nm * nr);
    out.magnitude_ratio = nm / nr;
    return out;
}

std::vector<double> analytic_policy_variance(const Matrix& per_sample_gradients, std::span<const double> probs,
                                             double kept_size) {
    const std::size_t n = per_sample_gradients.rows();
    const std::size_t p = per_sample_gradients.cols();
    if (probs.size() != n) throw InvalidArgument("one prune probability per sample required");
    if (!(kept_size > 0.0)) throw InvalidArgument("kept size must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(probs[i] >= 0.0 && probs[i] < 1.0)) {
            throw InvalidArgument("prune probability of sample " + std::to_string(i) +
                                  " must be in [0, 1); P = 1 is a hard prune");
        }
    }
    const double dn = static_cast<double>(n);
    std::vector<double> out(p);
    std::vector<double> column(n), inflated(n);
    for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double g = per_sample_gradients(i, k);
            column[i] = g;
            inflated[i] = g * g / (1.0 - probs[i]);
        }
        const double mean = compensated_sum(column) / dn;
        out[k] = compensated_sum(inflated) / kept_size - (dn * dn) / (kept_size * kept_size) * mean * mean;
    }
    return out;
}

std::vector<double> population_variance(const Matrix& per_sample_gradients) {
    const std::size_t n = per_sample_gradients.rows();
    if (n == 0) throw InvalidArgument("population_variance: no samples");
    std::vector<double> out(per_sample_gradients.cols());
    std::vector<double> column(n);
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = per_sample_gradients(i, k);
        const double mean = compensated_sum(column) / static_cast<double>(n);
        for (double& v : column) v = (v - mean) * (v - mean);
        out[k] = compensated_sum(column) / static_cast<double>(n);
    }
    return out;
}

bool rescale_variance_condition(const Matrix& per_sample_gradients, std::span<const double> probs) {
    const std::size_t n = per_sample_gradients.rows();
    if (probs.size() != n) throw InvalidArgument("one prune probability per sample required");
    for (std::size_t k = 0; k < per_sample_gradients.cols(); ++k) {
        double all = 0.0, rescaled = 0.0;
        std::size_t pruned = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g2 = per_sample_gradients(i, k) * per_sample_gradients(i, k);
            all += g2;
            if (probs[i] > 0.0) {
                rescaled += g2 / (1.0 - probs[i]);
                ++pruned;
            }
        }
        if (pruned > 0 && rescaled / static_cast<double>(pruned) > all / static_cast<double>(n)) return false;
    }
    return true;
}

std::optional<double> lr_stability_bound(const QuadraticSet& qs, std::span<const double> theta,
                                         std::size_t batch_size, double kept_ratio) {
    if (batch_size == 0) throw InvalidArgument("batch size must be positive");
    if (!(kept_ratio > 0.0 && kept_ratio <= 1.0)) throw InvalidArgument("kept ratio must be in (0, 1]");
    const auto g = exact_quadratic_gradient(qs, theta);
    const auto sigma = population_variance(qs.gradients(theta));
    double g2 = 0.0, ghg = 0.0, trace = 0.0;
    for (std::size_t k = 0; k < qs.dim(); ++k) {
        double h = 0.0;
        for (std::size_t i = 0; i < qs.size(); ++i) h += qs.a(i, k);
        h /= static_cast<double>(qs.size());
        g2 += g[k] * g[k];
        ghg += g[k] * h * g[k];
        trace += h * sigma[k];
    }
    if (g2 == 0.0) return std::nullopt;
    return 2.0 * g2 * kept_ratio / (ghg + trace / static_cast<double>(batch_size));
}

DescentOutcome simulate_rescaled_descent(const QuadraticSet& qs, std::span<const double> theta0, double lr,
                                         std::size_t steps, std::size_t batch_size, const PrunePolicy& policy,
                                         std::size_t runs, std::uint64_t seed) {
    if (theta0.size() != qs.dim()) throw InvalidArgument("theta has the wrong dimension");
    if (runs == 0 || batch_size == 0) throw InvalidArgument("runs and batch size must be positive");
    const std::size_t p = qs.dim();
    DescentOutcome out;
    out.initial_loss = qs.mean_loss(theta0);
    std::vector<double> finals;
    finals.reserve(runs);
    std::vector<double> theta(p), step(p), g(p);
    for (std::size_t run = 0; run < runs; ++run) {
        rng::Stream stream(rng::derive_key(seed, rng::tag::trial), run);
        theta.assign(theta0.begin(), theta0.end());
        bool diverged = false;
        for (std::size_t s = 0; s < steps; ++s) {
            auto losses = qs.losses(theta);
            bool finite = true;
            for (const double l : losses) finite = finite && std::isfinite(l);
            if (!finite) {
                diverged = true;
                break;
            }
            const ScoreTable table(std::move(losses), 0);
            const EpochPlan plan = plan_epoch(table, policy, stream());
            std::fill(step.begin(), step.end(), 0.0);
            for (std::size_t b = 0; b < batch_size; ++b) {
                const auto pick = static_cast<std::size_t>(stream.below(plan.kept_count()));
                qs.gradient(plan.kept_ids[pick], theta, g);
                for (std::size_t k = 0; k < p; ++k) step[k] += plan.weights[pick] * g[k];
            }
            for (std::size_t k = 0; k < p; ++k) theta[k] -= lr * step[k] / static_cast<double>(batch_size);
        }
        const double final_loss = diverged ? std::numeric_limits<double>::infinity() : qs.mean_loss(theta);
        finals.push_back(std::isfinite(final_loss) ? final_loss : std::numeric_limits<double>::infinity());
    }
    bool all_finite = true;
    for (const double f : finals) all_finite = all_finite && std::isfinite(f);
    if (!all_finite) {
        out.mean_final_loss = std::numeric_limits<double>::infinity();
        out.final_loss_stderr = std::numeric_limits<double>::infinity();
        return out;
    }
    const Moments m = moments(finals);
    out.mean_final_loss = m.mean;
    out.final_loss_stderr = std::sqrt(m.variance / static_cast<double>(runs));
    return out;
}

QuadraticSet skewed_quadratic(std::size_t n, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0) throw InvalidArgument("skewed_quadratic: n must be even and at least 2");
    QuadraticSet qs{Matrix(n, 2), Matrix(n, 2)};
    rng::Stream stream(rng::derive_key(seed, rng::tag::dataset), 3);
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double jitter = stream.uniform(0.9, 1.1);
        if (i < half) {
            // Loss ~0.125, gradient ~(1, 0) at the origin.
            qs.a(i, 0) = 4.0;
            qs.a(i, 1) = 1.0;
            qs.b(i, 0) = -0.25 * jitter;
            qs.b(i, 1) = 0.0;
        } else {
            // Loss ~0.5, gradient ~(0, 1) at the origin.
            qs.a(i, 0) = 1.0;
            qs.a(i, 1) = 1.0;
            qs.b(i, 0) = 0.0;
            qs.b(i, 1) = -1.0 * jitter;
        }
    }
    return qs;
}

}  // namespace infobatch::analysis
