#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cyclekit {

/// Minimal reader for the unquoted, comma-separated files this tool exchanges.
class CsvReader {
public:
    CsvReader(std::istream& in, std::string source);

    /// Index of a header column; throws Error{missing_column}.
    [[nodiscard]] std::size_t column(const std::string& name) const;
    [[nodiscard]] bool has_column(const std::string& name) const;

    /// Next non-empty data row, or nullopt at end of input.
    std::optional<std::vector<std::string>> next();

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    /// `source:line` of the row last returned.
    [[nodiscard]] std::string where() const;

private:
    std::istream& in_;
    std::string source_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Fixed-point with `digits` decimals; NaN prints as "NA".
std::string format_fixed(double value, int digits);

}  // namespace cyclekit
