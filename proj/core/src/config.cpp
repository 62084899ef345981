#include "driftgate/config.hpp"

#include <fstream>
#include <sstream>

#include "driftgate/errors.hpp"
#include "json.hpp"

namespace driftgate {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where, std::vector<std::string>& errors) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            errors.push_back("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void get_if_present(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

EllipticSchema parse_schema(const json& j, std::vector<std::string>& errors) {
    EllipticSchema s;
    reject_unknown_keys(j,
                        {"id_col", "time_col", "feature_cols", "class_map",
                         "features_has_header", "classes_has_header", "missing_class_is_error"},
                        "dataset.schema", errors);
    get_if_present(j, "id_col", s.id_col);
    get_if_present(j, "time_col", s.time_col);
    get_if_present(j, "feature_cols", s.feature_cols);
    if (j.contains("class_map"))
        s.class_map = j.at("class_map").get<std::map<std::string, std::string>>();
    get_if_present(j, "features_has_header", s.features_has_header);
    get_if_present(j, "classes_has_header", s.classes_has_header);
    get_if_present(j, "missing_class_is_error", s.missing_class_is_error);
    return s;
}

SynthSpec parse_synth(const json& j, std::vector<std::string>& errors) {
    SynthSpec s;
    reject_unknown_keys(j,
                        {"n_periods", "records_per_period", "feature_dim",
                         "prevalence_schedule", "class_mean_shift", "seed"},
                        "dataset.synth", errors);
    get_if_present(j, "n_periods", s.n_periods);
    get_if_present(j, "records_per_period", s.records_per_period);
    get_if_present(j, "feature_dim", s.feature_dim);
    get_if_present(j, "prevalence_schedule", s.prevalence_schedule);
    get_if_present(j, "class_mean_shift", s.class_mean_shift);
    get_if_present(j, "seed", s.seed);
    return s;
}

DatasetConfig parse_dataset(const json& j, std::vector<std::string>& errors) {
    DatasetConfig d;
    reject_unknown_keys(
        j, {"kind", "features_path", "classes_path", "schema", "cache_path", "path", "synth"},
        "dataset", errors);
    std::string kind = "synthetic";
    get_if_present(j, "kind", kind);
    if (kind == "elliptic") {
        d.kind = DatasetConfig::Kind::Elliptic;
        if (!j.contains("features_path"))
            errors.push_back("dataset.features_path required for kind=elliptic");
        if (!j.contains("classes_path"))
            errors.push_back("dataset.classes_path required for kind=elliptic");
        d.features_path = j.value("features_path", std::string{});
        d.classes_path = j.value("classes_path", std::string{});
        if (j.contains("schema")) d.schema = parse_schema(j.at("schema"), errors);
        d.cache_path = j.value("cache_path", std::string{});
    } else if (kind == "canonical") {
        d.kind = DatasetConfig::Kind::Canonical;
        if (!j.contains("path")) errors.push_back("dataset.path required for kind=canonical");
        d.path = j.value("path", std::string{});
    } else if (kind == "synthetic") {
        d.kind = DatasetConfig::Kind::Synthetic;
        if (!j.contains("synth")) errors.push_back("dataset.synth required for kind=synthetic");
        else d.synth = parse_synth(j.at("synth"), errors);
    } else {
        errors.push_back("dataset.kind must be elliptic|canonical|synthetic, got '" + kind + "'");
    }
    return d;
}

void validate_semantics(const RunConfig& cfg, std::vector<std::string>& errors) {
    if (!(cfg.protocol.train_frac > 0.0 && cfg.protocol.train_frac < 1.0))
        errors.push_back("protocol.train_frac must be in (0,1)");
    if (cfg.protocol.rolling_window < 1) errors.push_back("protocol.rolling_window must be >= 1");
    if (cfg.protocol.min_test_labeled < 1)
        errors.push_back("protocol.min_test_labeled must be >= 1");
    if (cfg.cost_ratios.empty()) errors.push_back("cost_ratios must not be empty");
    for (double r : cfg.cost_ratios)
        if (!(r > 0.0)) errors.push_back("cost_ratios entries must be > 0");
    if (cfg.model.lambda < 0.0) errors.push_back("model.lambda must be >= 0");
    if (!(cfg.model.solver.tol > 0.0)) errors.push_back("model.tol must be > 0");
    if (cfg.model.solver.max_iter < 1) errors.push_back("model.max_iter must be >= 1");
    if (cfg.bootstrap.replications < 1) errors.push_back("bootstrap.replications must be >= 1");
    if (!(cfg.bootstrap.ci_level > 0.0 && cfg.bootstrap.ci_level < 1.0))
        errors.push_back("bootstrap.ci_level must be in (0,1)");
    for (int l : cfg.bootstrap.block_lengths)
        if (l < 1) errors.push_back("bootstrap.block_lengths entries must be >= 1");
    for (int w : cfg.recal_windows) {
        if (w < 1) errors.push_back("recal_windows entries must be >= 1");
        else if (w > cfg.protocol.rolling_window)
            errors.push_back("recal_windows entry " + std::to_string(w) +
                             " exceeds protocol.rolling_window");
    }
    if (cfg.mechanism_lags < 0) errors.push_back("mechanism_lags must be >= 0");
    if (cfg.output_dir.empty()) errors.push_back("output_dir must not be empty");
    for (const auto& f : cfg.formats)
        if (f != "csv" && f != "json")
            errors.push_back("formats entries must be csv or json, got '" + f + "'");
    if (cfg.dataset.kind == DatasetConfig::Kind::Synthetic) {
        const auto& s = cfg.dataset.synth;
        if (s.n_periods < 1) errors.push_back("dataset.synth.n_periods must be >= 1");
        if (s.records_per_period < 1)
            errors.push_back("dataset.synth.records_per_period must be >= 1");
        if (s.feature_dim < 1) errors.push_back("dataset.synth.feature_dim must be >= 1");
        if (static_cast<int>(s.prevalence_schedule.size()) != s.n_periods)
            errors.push_back("dataset.synth.prevalence_schedule length must equal n_periods");
        if (static_cast<int>(s.class_mean_shift.size()) != s.n_periods)
            errors.push_back("dataset.synth.class_mean_shift length must equal n_periods");
        for (double p : s.prevalence_schedule)
            if (p < 0.0 || p > 1.0)
                errors.push_back("dataset.synth.prevalence_schedule entries must be in [0,1]");
    }
}

json schema_to_json(const EllipticSchema& s) {
    json j;
    j["id_col"] = s.id_col;
    j["time_col"] = s.time_col;
    j["feature_cols"] = s.feature_cols;
    j["class_map"] = s.class_map;
    j["features_has_header"] = s.features_has_header;
    j["classes_has_header"] = s.classes_has_header;
    j["missing_class_is_error"] = s.missing_class_is_error;
    return j;
}

json synth_to_json(const SynthSpec& s) {
    json j;
    j["n_periods"] = s.n_periods;
    j["records_per_period"] = s.records_per_period;
    j["feature_dim"] = s.feature_dim;
    j["prevalence_schedule"] = s.prevalence_schedule;
    j["class_mean_shift"] = s.class_mean_shift;
    j["seed"] = s.seed;
    return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config root must be a JSON object");

    std::vector<std::string> errors;
    reject_unknown_keys(j,
                        {"dataset", "model", "protocol", "cost_ratios", "bootstrap",
                         "recal_windows", "mechanism_lags", "output_dir", "formats"},
                        "config root", errors);

    RunConfig cfg;
    try {
        if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"), errors);
        else errors.push_back("config requires a dataset section");

        if (j.contains("model")) {
            const json& m = j.at("model");
            reject_unknown_keys(m, {"lambda", "tol", "max_iter"}, "model", errors);
            get_if_present(m, "lambda", cfg.model.lambda);
            get_if_present(m, "tol", cfg.model.solver.tol);
            get_if_present(m, "max_iter", cfg.model.solver.max_iter);
        }
        if (j.contains("protocol")) {
            const json& p = j.at("protocol");
            reject_unknown_keys(
                p, {"train_frac", "split_step", "rolling_window", "min_test_labeled", "seed"},
                "protocol", errors);
            get_if_present(p, "train_frac", cfg.protocol.train_frac);
            get_if_present(p, "split_step", cfg.protocol.split_step);
            get_if_present(p, "rolling_window", cfg.protocol.rolling_window);
            get_if_present(p, "min_test_labeled", cfg.protocol.min_test_labeled);
            get_if_present(p, "seed", cfg.protocol.seed);
        }
        get_if_present(j, "cost_ratios", cfg.cost_ratios);
        if (j.contains("bootstrap")) {
            const json& b = j.at("bootstrap");
            reject_unknown_keys(b, {"block_lengths", "replications", "seed", "ci_level"},
                                "bootstrap", errors);
            get_if_present(b, "block_lengths", cfg.bootstrap.block_lengths);
            get_if_present(b, "replications", cfg.bootstrap.replications);
            get_if_present(b, "seed", cfg.bootstrap.seed);
            get_if_present(b, "ci_level", cfg.bootstrap.ci_level);
        }
        get_if_present(j, "recal_windows", cfg.recal_windows);
        get_if_present(j, "mechanism_lags", cfg.mechanism_lags);
        get_if_present(j, "output_dir", cfg.output_dir);
        get_if_present(j, "formats", cfg.formats);
    } catch (const json::exception& e) {
        throw InputError(std::string("config type error: ") + e.what());
    }

    validate_semantics(cfg, errors);
    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw InputError(msg);
    }

    // Costs are expressed as ratios with c_fp normalized to 1.
    cfg.protocol.cost_specs.clear();
    for (double r : cfg.cost_ratios) cfg.protocol.cost_specs.push_back(CostSpec{r, 1.0});
    if (cfg.dataset.kind == DatasetConfig::Kind::Elliptic && cfg.dataset.cache_path.empty())
        cfg.dataset.cache_path = std::filesystem::path(cfg.output_dir) / "dataset.csv";
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

void apply_seed_override(RunConfig& cfg, std::uint64_t seed) {
    cfg.protocol.seed = seed;
    cfg.bootstrap.seed = seed;
    cfg.dataset.synth.seed = seed;
}

std::string canonical_config_json(const RunConfig& cfg) {
    json j;
    json d;
    switch (cfg.dataset.kind) {
        case DatasetConfig::Kind::Elliptic:
            d["kind"] = "elliptic";
            d["features_path"] = cfg.dataset.features_path.string();
            d["classes_path"] = cfg.dataset.classes_path.string();
            d["schema"] = schema_to_json(cfg.dataset.schema);
            d["cache_path"] = cfg.dataset.cache_path.string();
            break;
        case DatasetConfig::Kind::Canonical:
            d["kind"] = "canonical";
            d["path"] = cfg.dataset.path.string();
            break;
        case DatasetConfig::Kind::Synthetic:
            d["kind"] = "synthetic";
            d["synth"] = synth_to_json(cfg.dataset.synth);
            break;
    }
    j["dataset"] = d;
    j["model"] = {{"lambda", cfg.model.lambda},
                  {"tol", cfg.model.solver.tol},
                  {"max_iter", cfg.model.solver.max_iter}};
    j["protocol"] = {{"train_frac", cfg.protocol.train_frac},
                     {"split_step", cfg.protocol.split_step},
                     {"rolling_window", cfg.protocol.rolling_window},
                     {"min_test_labeled", cfg.protocol.min_test_labeled},
                     {"seed", cfg.protocol.seed}};
    j["cost_ratios"] = cfg.cost_ratios;
    j["bootstrap"] = {{"block_lengths", cfg.bootstrap.block_lengths},
                      {"replications", cfg.bootstrap.replications},
                      {"seed", cfg.bootstrap.seed},
                      {"ci_level", cfg.bootstrap.ci_level}};
    j["recal_windows"] = cfg.recal_windows;
    j["mechanism_lags"] = cfg.mechanism_lags;
    j["output_dir"] = cfg.output_dir;
    j["formats"] = cfg.formats;
    return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = canonical_config_json(cfg);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

Dataset load_dataset(const RunConfig& cfg, bool allow_ingest) {
    switch (cfg.dataset.kind) {
        case DatasetConfig::Kind::Synthetic:
            return generate_synthetic(cfg.dataset.synth);
        case DatasetConfig::Kind::Canonical:
            return load_canonical(cfg.dataset.path);
        case DatasetConfig::Kind::Elliptic: {
            if (std::filesystem::exists(cfg.dataset.cache_path))
                return load_canonical(cfg.dataset.cache_path);
            if (!allow_ingest)
                throw InputError("dataset cache missing: " + cfg.dataset.cache_path.string() +
                                 " (run `driftgate ingest` first)");
            Dataset ds = ingest_elliptic(cfg.dataset.features_path, cfg.dataset.classes_path,
                                         cfg.dataset.schema);
            std::filesystem::create_directories(cfg.dataset.cache_path.parent_path());
            save_canonical(ds, cfg.dataset.cache_path);
            return ds;
        }
    }
    throw InputError("unreachable dataset kind");
}

}  // namespace driftgate
