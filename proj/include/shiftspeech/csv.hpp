#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shiftspeech::csv {

/// One data row; fields point into the reader's line buffer.
struct Row {
    std::size_t line = 0;
    std::vector<std::string_view> fields;
};

/// Reads a comma-separated file whose first line must match `expected_header`
/// exactly. Quoting is not supported; none of the canonical files need it.
/// Calls `on_row` for every non-empty data line. Throws MalformedRow.
void read_file(const std::filesystem::path& path, const std::vector<std::string>& expected_header,
               const std::function<void(const Row&)>& on_row);

/// Reads a file with a free-form header; returns the header and calls `on_row`.
std::vector<std::string> read_file_any_header(const std::filesystem::path& path,
                                              const std::function<void(const Row&)>& on_row);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

int parse_int(std::string_view s);                 // throws std::invalid_argument
double parse_double(std::string_view s);           // throws std::invalid_argument
std::optional<double> parse_optional_double(std::string_view s);  // empty -> nullopt

/// Shortest round-trip decimal representation; NaN/absent -> empty cell.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);
    void header(const std::vector<std::string>& names) { row(names); }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

}  // namespace shiftspeech::csv
