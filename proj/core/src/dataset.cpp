#include "driftgate/dataset.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "driftgate/csv.hpp"
#include "driftgate/errors.hpp"

namespace driftgate {

namespace {

enum class RawClass { Illicit, Licit, Unknown };

RawClass class_from_string(const std::string& s, const std::string& context) {
    if (s == "illicit") return RawClass::Illicit;
    if (s == "licit") return RawClass::Licit;
    if (s == "unknown") return RawClass::Unknown;
    throw InputError("class_map value must be illicit/licit/unknown, got '" + s +
                     "' (" + context + ")");
}

}  // namespace

Dataset make_dataset(std::vector<LabeledRecord> records) {
    Dataset ds;
    if (records.empty()) {
        ds.records = std::move(records);
        return ds;
    }
    const std::size_t dim = records.front().features.size();
    for (const auto& r : records) {
        if (r.features.size() != dim)
            throw InputError("inconsistent feature vector length for tx " + r.tx_id);
        if (r.time_step < 1)
            throw InputError("time_step must be >= 1, got " +
                             std::to_string(r.time_step) + " for tx " + r.tx_id);
    }
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.time_step != b.time_step) return a.time_step < b.time_step;
        return a.tx_id < b.tx_id;
    });
    ds.feature_dim = static_cast<int>(dim);
    ds.min_step = records.front().time_step;
    ds.max_step = records.back().time_step;
    ds.records = std::move(records);
    return ds;
}

Dataset ingest_elliptic(const std::filesystem::path& features_path,
                        const std::filesystem::path& classes_path,
                        const EllipticSchema& schema) {
    // Pass 1: id -> class.
    std::unordered_map<std::string, RawClass> classes;
    {
        csv::Reader reader(classes_path);
        bool first = true;
        while (auto row = reader.next()) {
            if (first && schema.classes_has_header) {
                first = false;
                continue;
            }
            first = false;
            if (row->fields.size() < 2)
                throw InputError("classes row " + std::to_string(row->line_no) +
                                 " has fewer than 2 columns (" + classes_path.string() + ")");
            const std::string& id = row->fields[0];
            const std::string& cls = row->fields[1];
            const auto it = schema.class_map.find(cls);
            if (it == schema.class_map.end())
                throw InputError("unmapped class string '" + cls + "' at row " +
                                 std::to_string(row->line_no) + " (" + classes_path.string() + ")");
            classes[id] = class_from_string(it->second, "class_map[" + cls + "]");
        }
    }

    // Pass 2: feature rows, inner join on id.
    std::vector<LabeledRecord> records;
    csv::Reader reader(features_path);
    std::optional<std::size_t> expected_cols;
    bool first = true;
    while (auto row = reader.next()) {
        if (first && schema.features_has_header) {
            first = false;
            continue;
        }
        first = false;
        const auto& f = row->fields;
        const std::string where =
            features_path.string() + " row " + std::to_string(row->line_no);
        if (!expected_cols) {
            expected_cols = f.size();
        } else if (f.size() != *expected_cols) {
            throw InputError("inconsistent feature column count at " + where + ": expected " +
                             std::to_string(*expected_cols) + ", got " + std::to_string(f.size()));
        }
        const int max_named = std::max(schema.id_col, schema.time_col);
        if (static_cast<int>(f.size()) <= max_named)
            throw InputError("row too short for schema at " + where);

        LabeledRecord rec;
        rec.tx_id = f[static_cast<std::size_t>(schema.id_col)];
        rec.time_step = static_cast<int>(
            csv::parse_int(f[static_cast<std::size_t>(schema.time_col)], where + " time_step"));

        const auto cls_it = classes.find(rec.tx_id);
        RawClass cls = RawClass::Unknown;
        if (cls_it == classes.end()) {
            if (schema.missing_class_is_error)
                throw InputError("tx " + rec.tx_id + " has no class entry (" + where + ")");
        } else {
            cls = cls_it->second;
        }
        if (cls == RawClass::Unknown) continue;
        rec.label = cls == RawClass::Illicit ? Label::Illicit : Label::Licit;

        if (schema.feature_cols.empty()) {
            rec.features.reserve(f.size() - 2);
            for (std::size_t c = 0; c < f.size(); ++c) {
                if (static_cast<int>(c) == schema.id_col || static_cast<int>(c) == schema.time_col)
                    continue;
                rec.features.push_back(csv::parse_double(f[c], where + " col " + std::to_string(c)));
            }
        } else {
            rec.features.reserve(schema.feature_cols.size());
            for (int c : schema.feature_cols) {
                if (c < 0 || c >= static_cast<int>(f.size()))
                    throw InputError("feature column " + std::to_string(c) +
                                     " out of range at " + where);
                rec.features.push_back(csv::parse_double(
                    f[static_cast<std::size_t>(c)], where + " col " + std::to_string(c)));
            }
        }
        records.push_back(std::move(rec));
    }
    return make_dataset(std::move(records));
}

void save_canonical(const Dataset& ds, const std::filesystem::path& path) {
    csv::Writer w(path);
    std::vector<std::string> header = {"tx_id", "time_step", "label"};
    for (int i = 0; i < ds.feature_dim; ++i) header.push_back("f" + std::to_string(i));
    w.row(header);
    std::vector<std::string> fields;
    for (const auto& r : ds.records) {
        fields.clear();
        fields.push_back(r.tx_id);
        fields.push_back(std::to_string(r.time_step));
        fields.push_back(r.label == Label::Illicit ? "1" : "0");
        for (double v : r.features) fields.push_back(csv::format_double(v));
        w.row(fields);
    }
}

Dataset load_canonical(const std::filesystem::path& path) {
    csv::Reader reader(path);
    auto header = reader.next();
    if (!header || header->fields.size() < 3 || header->fields[0] != "tx_id")
        throw InputError("not a canonical dataset file: " + path.string());
    const std::size_t ncols = header->fields.size();

    std::vector<LabeledRecord> records;
    while (auto row = reader.next()) {
        const std::string where = path.string() + " row " + std::to_string(row->line_no);
        if (row->fields.size() != ncols)
            throw InputError("inconsistent column count at " + where);
        LabeledRecord rec;
        rec.tx_id = row->fields[0];
        rec.time_step = static_cast<int>(csv::parse_int(row->fields[1], where + " time_step"));
        const std::int64_t lab = csv::parse_int(row->fields[2], where + " label");
        if (lab != 0 && lab != 1)
            throw InputError("label must be 0 or 1 at " + where);
        rec.label = lab == 1 ? Label::Illicit : Label::Licit;
        rec.features.reserve(ncols - 3);
        for (std::size_t c = 3; c < ncols; ++c)
            rec.features.push_back(csv::parse_double(row->fields[c], where));
        records.push_back(std::move(rec));
    }
    return make_dataset(std::move(records));
}

std::vector<BlockStats> describe_blocks(const Dataset& ds,
                                        std::span<const std::pair<int, int>> block_edges) {
    if (block_edges.empty()) throw std::invalid_argument("describe_blocks: no blocks");
    int prev_hi = ds.min_step - 1;
    for (const auto& [lo, hi] : block_edges) {
        if (lo > hi) throw std::invalid_argument("describe_blocks: empty range");
        if (lo <= prev_hi)
            throw std::invalid_argument("describe_blocks: blocks must be disjoint and ordered");
        if (lo < ds.min_step || hi > ds.max_step)
            throw std::invalid_argument("describe_blocks: block outside dataset time range");
        prev_hi = hi;
    }

    std::vector<BlockStats> out;
    out.reserve(block_edges.size());
    std::size_t cum_count = 0;
    std::size_t cum_illicit = 0;
    for (const auto& [lo, hi] : block_edges) {
        BlockStats b;
        b.lo = lo;
        b.hi = hi;
        std::size_t illicit = 0;
        for (const auto& r : ds.records) {
            if (r.time_step < lo || r.time_step > hi) continue;
            ++b.count;
            if (r.label == Label::Illicit) ++illicit;
        }
        cum_count += b.count;
        cum_illicit += illicit;
        b.illicit_share =
            b.count ? static_cast<double>(illicit) / static_cast<double>(b.count) : 0.0;
        b.cumulative_illicit_share =
            cum_count ? static_cast<double>(cum_illicit) / static_cast<double>(cum_count) : 0.0;
        out.push_back(b);
    }
    return out;
}

std::vector<std::pair<int, int>> decade_blocks(const Dataset& ds) {
    std::vector<std::pair<int, int>> edges;
    for (int lo = ds.min_step; lo <= ds.max_step; lo += 10)
        edges.emplace_back(lo, std::min(lo + 9, ds.max_step));
    return edges;
}

std::vector<std::size_t> indices_between(const Dataset& ds, int lo, int hi) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const int t = ds.records[i].time_step;
        if (t >= lo && t <= hi) idx.push_back(i);
    }
    return idx;
}

double illicit_share(const Dataset& ds, std::span<const std::size_t> idx) {
    if (idx.empty()) return 0.0;
    std::size_t illicit = 0;
    for (std::size_t i : idx)
        if (ds.records[i].label == Label::Illicit) ++illicit;
    return static_cast<double>(illicit) / static_cast<double>(idx.size());
}

}  // namespace driftgate
