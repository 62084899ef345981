// Minimal strict CSV reading/writing. Fields are comma-separated with no
// quoting (none of the formats handled here needs it); CRLF is tolerated.
// Lines starting with '#' carry file metadata and are surfaced separately.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace driftgate::csv {

struct Row {
    std::size_t line_no = 0;  // 1-based physical line in the file
    std::vector<std::string> fields;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path);

    // Next data row; skips blank lines and collects '#' comment lines.
    std::optional<Row> next();

    const std::vector<std::string>& comments() const { return comments_; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
    std::vector<std::string> comments_;
};

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);

    void comment(const std::string& text);
    void row(std::span<const std::string> fields);
    void row(std::initializer_list<std::string> fields);

private:
    std::ofstream out_;
};

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);
// Strict numeric parses; `context` names the cell in error messages.
double parse_double(const std::string& s, const std::string& context);
std::int64_t parse_int(const std::string& s, const std::string& context);

}  // namespace driftgate::csv
