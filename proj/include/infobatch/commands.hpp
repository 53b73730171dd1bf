#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "infobatch/config.hpp"

namespace infobatch::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailure = 1,
    kUsageError = 2,
    kNumericFailure = 3,
};

/// Builds the train/eval datasets a config describes. Optional standardization uses the
/// statistics of the full set and runs before the split.
std::pair<Dataset, Dataset> prepare_datasets(const RunConfig& config);

/// Trains and writes JSON Lines: an effective-config record, one record per
/// epoch and a summary with the saved fraction 1 - forwards / (|D| * C).
int run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_path,
        std::optional<std::uint64_t> seed, std::ostream& err);

/// Same as `run` for an already parsed config, writing records to `out`.
int run_config(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Runs a property suite; JSON Lines records go to `out`, PASS/FAIL lines to `err`.
int verify(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err);

/// Times mean threshold, quantile and full sort; prints a table.
int bench(std::size_t n, std::size_t trials, std::ostream& out, std::ostream& err);

}  // namespace infobatch::cli
