#include "infobatch/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace infobatch {

namespace {

using nlohmann::json;

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
    }

    std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

    bool has(const std::string& name) const { return obj_.contains(name) && !obj_.at(name).is_null(); }

    const json& raw(const std::string& name) {
        seen_.insert(name);
        if (!obj_.contains(name)) throw ConfigError(key(name), "is required");
        return obj_.at(name);
    }

    double number(const std::string& name, std::optional<double> fallback = std::nullopt) {
        seen_.insert(name);
        if (!has(name)) {
            if (fallback) return *fallback;
            throw ConfigError(key(name), "is required");
        }
        const json& v = obj_.at(name);
        if (!v.is_number()) throw ConfigError(key(name), "must be a number");
        return v.get<double>();
    }

    std::uint64_t count(const std::string& name, std::optional<std::uint64_t> fallback = std::nullopt) {
        seen_.insert(name);
        if (!has(name)) {
            if (fallback) return *fallback;
            throw ConfigError(key(name), "is required");
        }
        const json& v = obj_.at(name);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError(key(name), "must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& name, std::optional<std::string> fallback = std::nullopt) {
        seen_.insert(name);
        if (!has(name)) {
            if (fallback) return *fallback;
            throw ConfigError(key(name), "is required");
        }
        const json& v = obj_.at(name);
        if (!v.is_string()) throw ConfigError(key(name), "must be a string");
        return v.get<std::string>();
    }

    bool flag(const std::string& name, bool fallback) {
        seen_.insert(name);
        if (!has(name)) return fallback;
        const json& v = obj_.at(name);
        if (!v.is_boolean()) throw ConfigError(key(name), "must be true or false");
        return v.get<bool>();
    }

    void mark(const std::string& name) { seen_.insert(name); }

    std::optional<Reader> child(const std::string& name, bool required) {
        seen_.insert(name);
        if (!has(name)) {
            if (required) throw ConfigError(key(name), "is required");
            return std::nullopt;
        }
        return Reader(obj_.at(name), key(name));
    }

    void finish() const {
        for (const auto& [k, _] : obj_.items()) {
            if (!seen_.contains(k)) throw ConfigError(key(k), "unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(bool ok, const std::string& key_path, const std::string& message) {
    if (!ok) throw ConfigError(key_path, message);
}

template <typename Fn>
auto parse_enum(Reader& r, const std::string& name, const std::string& fallback, Fn parse) {
    const std::string value = r.text(name, fallback);
    try {
        return parse(value);
    } catch (const InvalidArgument&) {
        throw ConfigError(r.key(name), "unsupported value '" + value + "'");
    }
}

DatasetConfig parse_dataset(Reader r, const std::filesystem::path& base_dir) {
    DatasetConfig cfg;
    const std::string kind = r.text("kind");
    if (kind == "blobs") {
        BlobSpec spec;
        spec.classes = r.count("classes", 2);
        spec.per_class = r.count("per_class");
        spec.dim = r.count("dim", 2);
        spec.separation = r.number("separation", 4.0);
        spec.noise = r.number("noise", 1.0);
        spec.seed = r.count("seed", 0);
        check(spec.classes >= 2, r.key("classes"), "must be at least 2");
        check(spec.per_class >= 1, r.key("per_class"), "must be at least 1");
        check(spec.dim >= 1, r.key("dim"), "must be at least 1");
        check(spec.separation > 0.0, r.key("separation"), "must be positive");
        check(spec.noise >= 0.0, r.key("noise"), "must be non-negative");
        cfg.source = spec;
    } else if (kind == "csv") {
        CsvSource src;
        std::filesystem::path path = r.text("path");
        src.path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
        const json& features = r.raw("features");
        check(features.is_array() && !features.empty(), r.key("features"), "must be a non-empty array of names");
        for (const auto& f : features) {
            check(f.is_string(), r.key("features"), "must contain only strings");
            src.schema.feature_columns.push_back(f.get<std::string>());
        }
        src.schema.label_column = r.text("label");
        src.schema.label_kind = parse_enum(r, "label_kind", "classification", parse_label_kind);
        cfg.source = src;
    } else {
        throw ConfigError(r.key("kind"), "must be blobs or csv");
    }
    cfg.standardize = r.flag("standardize", false);
    r.finish();
    return cfg;
}

PrunePolicy parse_policy(std::optional<Reader> maybe) {
    PrunePolicy p;
    if (!maybe) {
        p.kind = PolicyKind::none;
        return p;
    }
    Reader& r = *maybe;
    p.kind = parse_enum(r, "kind", "info_batch", parse_policy_kind);
    p.r = r.number("r", 0.5);
    p.delta = r.number("delta", 0.875);
    p.rescale_mode = parse_enum(r, "rescale_mode", "per_sample", parse_rescale_mode);
    if (auto tier = r.child("tier", false)) {
        p.tier = Tier{tier->number("quantile", 0.2), tier->number("r_aggressive", 0.75)};
        tier->finish();
    }
    p.keep_prob = r.number("keep_prob", 1.0);
    p.keep_fraction = r.number("keep_fraction", 1.0);
    r.finish();

    check(p.r >= 0.0 && p.r < 1.0, "policy.r", "must be in [0, 1)");
    check(p.delta > 0.0 && p.delta <= 1.0, "policy.delta", "must be in (0, 1]");
    if (p.tier) {
        check(p.tier->quantile > 0.0 && p.tier->quantile < 1.0, "policy.tier.quantile", "must be in (0, 1)");
        check(p.tier->r_aggressive >= p.r && p.tier->r_aggressive < 1.0, "policy.tier.r_aggressive",
              "must be in [policy.r, 1)");
    }
    check(p.keep_prob > 0.0 && p.keep_prob <= 1.0, "policy.keep_prob", "must be in (0, 1]");
    check(p.keep_fraction > 0.0 && p.keep_fraction <= 1.0, "policy.keep_fraction", "must be in (0, 1]");
    return p;
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    Reader root(doc, "");
    RunConfig cfg;
    cfg.dataset = parse_dataset(*root.child("dataset", true), base_dir);

    TrainConfig& t = cfg.train;
    if (auto model = root.child("model", false)) {
        t.model.kind = parse_enum(*model, "kind", "mlp", parse_model_kind);
        if (model->has("hidden")) {
            const json& hidden = model->raw("hidden");
            check(hidden.is_array(), "model.hidden", "must be an array of layer widths");
            t.model.hidden.clear();
            for (const auto& h : hidden) {
                check(h.is_number_integer() && h.get<std::int64_t>() > 0, "model.hidden", "widths must be positive");
                t.model.hidden.push_back(h.get<std::size_t>());
            }
        }
        model->mark("hidden");
        model->finish();
    }
    check(t.model.kind != ModelKind::mlp || !t.model.hidden.empty(), "model.hidden",
          "mlp needs at least one hidden layer");
    if (t.model.kind != ModelKind::mlp) t.model.hidden.clear();

    if (auto opt = root.child("optimizer", false)) {
        t.lr_max = opt->number("lr_max", t.lr_max);
        t.momentum = opt->number("momentum", t.momentum);
        t.weight_decay = opt->number("weight_decay", t.weight_decay);
        t.lr_autoscale = opt->flag("lr_autoscale", false);
        opt->finish();
    }
    check(t.lr_max > 0.0 && std::isfinite(t.lr_max), "optimizer.lr_max", "must be positive");
    check(t.momentum >= 0.0 && t.momentum < 1.0, "optimizer.momentum", "must be in [0, 1)");
    check(t.weight_decay >= 0.0, "optimizer.weight_decay", "must be non-negative");

    if (auto sched = root.child("schedule", false)) {
        t.schedule = parse_enum(*sched, "kind", "onecycle", parse_schedule_kind);
        t.warmup_fraction = sched->number("warmup_fraction", t.warmup_fraction);
        sched->finish();
    }
    check(t.warmup_fraction > 0.0 && t.warmup_fraction < 1.0, "schedule.warmup_fraction", "must be in (0, 1)");

    t.epochs = root.count("epochs");
    t.batch_size = root.count("batch_size", 128);
    check(t.batch_size >= 1, "batch_size", "must be at least 1");
    t.policy = parse_policy(root.child("policy", false));
    t.policy.total_epochs = std::max<std::size_t>(t.epochs, 1);
    t.seed = root.count("seed", 0);
    cfg.eval_split = root.number("eval_split", 0.2);
    check(cfg.eval_split >= 0.0 && cfg.eval_split < 1.0, "eval_split", "must be in [0, 1)");
    if (root.has("output")) cfg.output = root.text("output");
    root.mark("output");
    root.finish();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

json effective_config(const RunConfig& c) {
    json dataset;
    if (const auto* blobs = std::get_if<BlobSpec>(&c.dataset.source)) {
        dataset = {{"kind", "blobs"},           {"classes", blobs->classes}, {"per_class", blobs->per_class},
                   {"dim", blobs->dim},         {"separation", blobs->separation},
                   {"noise", blobs->noise},     {"seed", blobs->seed}};
    } else {
        const auto& csv = std::get<CsvSource>(c.dataset.source);
        dataset = {{"kind", "csv"},
                   {"path", csv.path.string()},
                   {"features", csv.schema.feature_columns},
                   {"label", csv.schema.label_column},
                   {"label_kind", to_string(csv.schema.label_kind)}};
    }
    dataset["standardize"] = c.dataset.standardize;

    const TrainConfig& t = c.train;
    json policy = {{"kind", to_string(t.policy.kind)},
                   {"r", t.policy.r},
                   {"delta", t.policy.delta},
                   {"rescale_mode", to_string(t.policy.rescale_mode)},
                   {"keep_prob", t.policy.keep_prob},
                   {"keep_fraction", t.policy.keep_fraction}};
    if (t.policy.tier) {
        policy["tier"] = {{"quantile", t.policy.tier->quantile}, {"r_aggressive", t.policy.tier->r_aggressive}};
    }
    json out = {{"dataset", dataset},
                {"model", {{"kind", to_string(t.model.kind)}, {"hidden", t.model.hidden}}},
                {"optimizer",
                 {{"lr_max", t.lr_max},
                  {"momentum", t.momentum},
                  {"weight_decay", t.weight_decay},
                  {"lr_autoscale", t.lr_autoscale}}},
                {"schedule", {{"kind", to_string(t.schedule)}, {"warmup_fraction", t.warmup_fraction}}},
                {"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"policy", policy},
                {"eval_split", c.eval_split},
                {"seed", t.seed}};
    if (c.output) out["output"] = c.output->string();
    return out;
}

}  // namespace infobatch
