#include "cyclekit/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "cyclekit/error.hpp"

namespace cyclekit {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

CsvReader::CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (line_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        header_ = split_csv_line(line);
        return;
    }
    throw Error(ErrorCode::missing_column, source_ + ": empty file, no header row");
}

bool CsvReader::has_column(const std::string& name) const {
    return std::ranges::find(header_, name) != header_.end();
}

std::size_t CsvReader::column(const std::string& name) const {
    auto it = std::ranges::find(header_, name);
    if (it == header_.end()) {
        throw Error(ErrorCode::missing_column, source_ + ": header lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header_.begin());
}

std::optional<std::vector<std::string>> CsvReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header_.size()) {
            throw Error(ErrorCode::malformed, where() + ": expected " + std::to_string(header_.size()) +
                                                  " fields, got " + std::to_string(fields.size()));
        }
        return fields;
    }
    return std::nullopt;
}

std::string CsvReader::where() const { return source_ + ":" + std::to_string(line_); }

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_fixed(double value, int digits) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    std::string out(buf);
    // avoid printing "-0.0000"
    if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

}  // namespace cyclekit
