// Time-indexed labeled transaction data: Elliptic-format ingestion with
// label filtering, a canonical CSV cache format, and per-block descriptives.
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace driftgate {

enum class Label { Licit = 0, Illicit = 1 };

struct LabeledRecord {
    std::string tx_id;
    int time_step = 0;  // >= 1
    Label label = Label::Licit;
    std::vector<double> features;
};

// Immutable after construction; records sorted by (time_step, tx_id) so that
// iteration order is deterministic. tx_id ordering is lexicographic (ids are
// opaque strings).
struct Dataset {
    std::vector<LabeledRecord> records;
    int feature_dim = 0;
    int min_step = 0;
    int max_step = 0;

    std::size_t size() const { return records.size(); }
    std::pair<int, int> time_range() const { return {min_step, max_step}; }
};

// Builds a Dataset from parsed records: validates invariants, sorts, sets
// feature_dim and the step range.
Dataset make_dataset(std::vector<LabeledRecord> records);

// Column layout of the raw feature/class files plus the class-string map.
// Defaults match the published Elliptic layout: headerless feature rows of
// [id, time_step, features...] and a headered classes file mapping
// "1"->illicit, "2"->licit, "unknown"->unknown.
struct EllipticSchema {
    int id_col = 0;
    int time_col = 1;
    std::vector<int> feature_cols;  // empty: every remaining column
    std::map<std::string, std::string> class_map = {
        {"1", "illicit"}, {"2", "licit"}, {"unknown", "unknown"}};
    bool features_has_header = false;
    bool classes_has_header = true;
    // Ids present in the features file but absent from the classes file are
    // dropped as unknown by default; set to true to make them a hard error.
    bool missing_class_is_error = false;
};

// Inner-joins the two files on tx id, drops unknown-class records, and
// returns the remaining records sorted by (time_step, tx_id).
Dataset ingest_elliptic(const std::filesystem::path& features_path,
                        const std::filesystem::path& classes_path,
                        const EllipticSchema& schema = {});

// Canonical cache format: header tx_id,time_step,label,f0..fK with label
// encoded as 1 (illicit) / 0 (licit).
void save_canonical(const Dataset& ds, const std::filesystem::path& path);
Dataset load_canonical(const std::filesystem::path& path);

struct BlockStats {
    int lo = 0;
    int hi = 0;
    std::size_t count = 0;
    double illicit_share = 0.0;
    double cumulative_illicit_share = 0.0;
};

// Per-block record counts and illicit shares over inclusive step ranges.
// Ranges must be disjoint, ordered, and inside the dataset's time range.
std::vector<BlockStats> describe_blocks(const Dataset& ds,
                                        std::span<const std::pair<int, int>> block_edges);

// Default decade blocks covering the dataset's step range (1-10, 11-20, ...,
// last block truncated at max_step).
std::vector<std::pair<int, int>> decade_blocks(const Dataset& ds);

// Indices of records with time_step in [lo, hi], in dataset order.
std::vector<std::size_t> indices_between(const Dataset& ds, int lo, int hi);

double illicit_share(const Dataset& ds, std::span<const std::size_t> idx);

}  // namespace driftgate
