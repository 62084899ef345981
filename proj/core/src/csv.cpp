#include "driftgate/csv.hpp"

#include <charconv>
#include <system_error>

#include "driftgate/errors.hpp"

namespace driftgate::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace

Reader::Reader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw InputError("cannot open file: " + path.string());
}

std::optional<Row> Reader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            comments_.push_back(line);
            continue;
        }
        return Row{line_no_, split_fields(line)};
    }
    return std::nullopt;
}

Writer::Writer(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw InputError("cannot open file for writing: " + path.string());
}

void Writer::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void Writer::row(std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << "\n";
}

void Writer::row(std::initializer_list<std::string> fields) {
    row(std::span<const std::string>(fields.begin(), fields.size()));
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw InputError("unparseable numeric cell '" + s + "' (" + context + ")");
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
    std::int64_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw InputError("unparseable integer cell '" + s + "' (" + context + ")");
    return v;
}

}  // namespace driftgate::csv
