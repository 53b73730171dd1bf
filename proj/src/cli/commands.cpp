#include "infobatch/commands.hpp"

#include <fstream>
#include <iomanip>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "infobatch/analysis.hpp"
#include "infobatch/errors.hpp"

namespace infobatch::cli {

using nlohmann::json;

std::pair<Dataset, Dataset> prepare_datasets(const RunConfig& config) {
    Dataset full;
    if (const auto* blobs = std::get_if<BlobSpec>(&config.dataset.source)) {
        full = gen_blobs(*blobs);
    } else {
        const auto& csv = std::get<CsvSource>(config.dataset.source);
        full = load_csv(csv.path, csv.schema);
    }
    if (config.dataset.standardize) full = standardized(std::move(full));
    full.validate();
    return split(full, config.eval_split, config.train.seed);
}

namespace {

json epoch_record(const EpochMetrics& m) {
    return {{"type", "epoch"},
            {"epoch", m.epoch},
            {"kept_count", m.kept_count},
            {"kept_ratio", m.kept_ratio},
            {"threshold", m.threshold},
            {"mean_train_loss", m.mean_train_loss},
            {"eval_metric", m.eval_metric},
            {"cumulative_sample_forwards", m.cumulative_sample_forwards},
            {"wall_ms", m.wall_ms}};
}

}  // namespace

int run_config(const RunConfig& config, std::ostream& out, std::ostream& err) {
    std::pair<Dataset, Dataset> sets;
    try {
        sets = prepare_datasets(config);
    } catch (const InvalidArgument& e) {
        err << "error: dataset: " << e.what() << '\n';
        return kUsageError;
    }
    const auto& [train_set, eval_set] = sets;

    json head = {{"type", "config"}, {"effective", effective_config(config)}};
    head["dataset_provenance"] = train_set.provenance;
    head["train_size"] = train_set.size();
    head["eval_size"] = eval_set.size();
    out << head.dump() << '\n';

    try {
        const auto result = train(config.train, train_set, eval_set,
                                  [&](const EpochMetrics& m) { out << epoch_record(m).dump() << '\n'; });
        const std::size_t forwards = result.epochs.empty() ? 0 : result.epochs.back().cumulative_sample_forwards;
        const std::size_t budget = train_set.size() * config.train.epochs;
        const double saved = budget == 0 ? 0.0 : 1.0 - static_cast<double>(forwards) / static_cast<double>(budget);
        const json summary = {{"type", "summary"},
                              {"final_metric", result.epochs.empty() ? 0.0 : result.epochs.back().eval_metric},
                              {"total_forwards", forwards},
                              {"full_data_forwards", budget},
                              {"saved_fraction", saved},
                              {"scheduled_steps", result.scheduled_steps},
                              {"realized_steps", result.realized_steps}};
        out << summary.dump() << '\n';
    } catch (const NumericOverflow& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const DataCorruption& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kSuccess;
}

int run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_path,
        std::optional<std::uint64_t> seed, std::ostream& err) {
    RunConfig config;
    try {
        config = load_run_config(config_path);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    }
    if (seed) config.train.seed = *seed;
    const auto target = out_path ? out_path : config.output;
    if (!target) {
        err << "error: no output path (pass --out or set \"output\" in the config)\n";
        return kUsageError;
    }
    std::ofstream out(*target, std::ios::binary | std::ios::trunc);
    if (!out) {
        err << "error: cannot write " << target->string() << '\n';
        return kUsageError;
    }
    return run_config(config, out, err);
}

int verify(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err) {
    std::vector<analysis::CheckRecord> records;
    try {
        records = analysis::run_suite(suite, seed);
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }
    bool ok = true;
    for (const auto& r : records) {
        out << r.to_json_line() << '\n';
        err << (r.pass ? "[PASS] " : "[FAIL] ") << suite << '/' << r.test
            << fmt::format(": statistic={:.6g} threshold={:.6g}\n", r.statistic, r.threshold);
        ok = ok && r.pass;
    }
    return ok ? kSuccess : kVerificationFailure;
}

int bench(std::size_t n, std::size_t trials, std::ostream& out, std::ostream& err) {
    analysis::BenchResult r;
    try {
        r = analysis::bench_threshold_vs_sort(n, trials);
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }
    out << fmt::format("{:>12} {:>8} {:>12} {:>12} {:>12} {:>10}\n", "n", "trials", "sort_ms", "quantile_ms",
                       "mean_ms", "sort/mean");
    out << fmt::format("{:>12} {:>8} {:>12.3f} {:>12.3f} {:>12.3f} {:>10.1f}\n", r.n, r.trials, r.sort_ms,
                       r.quantile_ms, r.mean_ms, r.sort_ms / r.mean_ms);
    return kSuccess;
}

}  // namespace infobatch::cli
