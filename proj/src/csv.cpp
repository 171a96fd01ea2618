#include "shiftspeech/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftspeech/common.hpp"

namespace shiftspeech::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

void read_rows(std::ifstream& in, const std::filesystem::path& path, std::size_t width,
               const std::function<void(const Row&)>& on_row) {
    std::string line;
    Row row;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        row.line = lineno;
        row.fields = split(line);
        if (row.fields.size() != width)
            throw MalformedRow(path.filename().string(), lineno,
                               fmt::format("expected {} fields, got {}", width, row.fields.size()));
        on_row(row);
    }
}

}  // namespace

void read_file(const std::filesystem::path& path, const std::vector<std::string>& expected_header,
               const std::function<void(const Row&)>& on_row) {
    auto in = open_or_throw(path);
    std::string header;
    if (!std::getline(in, header)) throw MalformedRow(path.filename().string(), 1, "missing header");
    strip_cr(header);
    auto names = split(header);
    bool same = names.size() == expected_header.size();
    for (std::size_t i = 0; same && i < names.size(); ++i) same = names[i] == expected_header[i];
    if (!same)
        throw MalformedRow(path.filename().string(), 1,
                           fmt::format("header mismatch, expected '{}'", fmt::join(expected_header, ",")));
    read_rows(in, path, expected_header.size(), on_row);
}

std::vector<std::string> read_file_any_header(const std::filesystem::path& path,
                                              const std::function<void(const Row&)>& on_row) {
    auto in = open_or_throw(path);
    std::string header;
    if (!std::getline(in, header)) throw MalformedRow(path.filename().string(), 1, "missing header");
    strip_cr(header);
    std::vector<std::string> names;
    for (auto f : split(header)) names.emplace_back(f);
    read_rows(in, path, names.size(), on_row);
    return names;
}

int parse_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw std::invalid_argument(fmt::format("not an integer: '{}'", s));
    return v;
}

double parse_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw std::invalid_argument(fmt::format("not a number: '{}'", s));
    return v;
}

std::optional<double> parse_optional_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

std::string format_double(double v) {
    if (std::isnan(v)) return {};
    return fmt::format("{}", v);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string{};
}

Writer::Writer(const std::filesystem::path& path) : out_(path), path_(path) {
    if (!out_) throw Error("cannot write " + path.string());
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

}  // namespace shiftspeech::csv
