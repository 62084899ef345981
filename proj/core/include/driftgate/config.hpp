// Run configuration: one strict JSON document drives every command. Unknown
// keys are rejected, semantic problems are reported all at once, and the
// resolved config (defaults filled in) is embedded into every output file
// together with a short hash so results stay traceable to their inputs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "driftgate/dataset.hpp"
#include "driftgate/inference.hpp"
#include "driftgate/protocols.hpp"
#include "driftgate/synthetic.hpp"

namespace driftgate {

struct DatasetConfig {
    enum class Kind { Elliptic, Canonical, Synthetic };
    Kind kind = Kind::Synthetic;

    // kind == Elliptic
    std::filesystem::path features_path;
    std::filesystem::path classes_path;
    EllipticSchema schema;
    std::filesystem::path cache_path;  // defaults to <output_dir>/dataset.csv

    // kind == Canonical
    std::filesystem::path path;

    // kind == Synthetic
    SynthSpec synth;
};

struct RunConfig {
    DatasetConfig dataset;
    ModelConfig model;
    ProtocolConfig protocol;  // cost_specs filled from cost_ratios
    std::vector<double> cost_ratios = {10.0, 25.0};  // c_fp normalized to 1
    BootstrapSpec bootstrap;
    std::vector<int> recal_windows = {2, 3, 5, 7};
    int mechanism_lags = 4;
    std::string output_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

// Sets every per-component seed (protocol, bootstrap, synthetic) to `seed`.
void apply_seed_override(RunConfig& cfg, std::uint64_t seed);

// Resolved config as canonical JSON (sorted keys, defaults explicit).
std::string canonical_config_json(const RunConfig& cfg);

// 16-hex-digit FNV-1a hash of the canonical JSON.
std::string config_hash(const RunConfig& cfg);

// Loads the configured dataset, materializing synthetic data or the Elliptic
// cache as needed. `allow_ingest` permits a cache miss to trigger ingestion.
Dataset load_dataset(const RunConfig& cfg, bool allow_ingest = true);

}  // namespace driftgate
