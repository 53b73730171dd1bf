#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "infobatch/dataset.hpp"
#include "infobatch/errors.hpp"
#include "infobatch/trainer.hpp"

namespace infobatch {

/// Configuration error carrying the offending key path, e.g. "policy.r".
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string key_path, const std::string& message)
        : InvalidArgument(key_path + ": " + message), key_path_(std::move(key_path)) {}
    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

struct CsvSource {
    std::filesystem::path path;
    CsvSchema schema;
};

struct DatasetConfig {
    std::variant<BlobSpec, CsvSource> source;
    bool standardize = false;
};

struct RunConfig {
    DatasetConfig dataset;
    TrainConfig train;
    double eval_split = 0.2;
    std::optional<std::filesystem::path> output;
};

/// Strict parse: unknown keys and out-of-range values throw ConfigError.
/// Relative CSV paths are resolved against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Every field, defaults included; parse_run_config(effective_config(c)) == c.
nlohmann::json effective_config(const RunConfig& config);

}  // namespace infobatch
