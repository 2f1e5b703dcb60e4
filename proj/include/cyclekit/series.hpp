#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclekit/quarter.hpp"

namespace cyclekit {

enum class VariableKind { gdp, unemployment_rate, gva };

/// Series identifier within a country: `gdp`, `unemployment_rate` or `gva_<industry>`.
struct Variable {
    VariableKind kind = VariableKind::gdp;
    std::string industry;  // only for gva

    static Variable gdp() { return {VariableKind::gdp, {}}; }
    static Variable unemployment_rate() { return {VariableKind::unemployment_rate, {}}; }
    static Variable gva(std::string industry) { return {VariableKind::gva, std::move(industry)}; }

    [[nodiscard]] std::string to_string() const;
    /// Level series that must be strictly positive (and are logged before filtering).
    [[nodiscard]] bool is_output_level() const noexcept { return kind != VariableKind::unemployment_rate; }

    friend auto operator<=>(const Variable&, const Variable&) = default;
    friend bool operator==(const Variable&, const Variable&) = default;
};

Variable parse_variable(const std::string& text);

enum class Transform { level, log };

/// Contiguous quarterly observations of one variable for one country.
class QuarterlySeries {
public:
    QuarterlySeries(std::string country, Variable variable, Quarter start, std::vector<double> values,
                    Transform transform = Transform::level);

    [[nodiscard]] const std::string& country() const noexcept { return country_; }
    [[nodiscard]] const Variable& variable() const noexcept { return variable_; }
    [[nodiscard]] Quarter start() const noexcept { return start_; }
    /// Last observed quarter.
    [[nodiscard]] Quarter end() const { return start_ + static_cast<std::int64_t>(values_.size()) - 1; }
    [[nodiscard]] Transform transform() const noexcept { return transform_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] bool covers(Quarter q) const;
    /// Position of `q` in values(); nullopt when outside the sample.
    [[nodiscard]] std::optional<std::size_t> index_of(Quarter q) const;
    [[nodiscard]] Quarter quarter_at(std::size_t i) const { return start_ + static_cast<std::int64_t>(i); }
    /// Value at `q`; throws Error{coverage} when outside the sample.
    [[nodiscard]] double at(Quarter q) const;

    /// Observations from start() through `last` inclusive.
    [[nodiscard]] QuarterlySeries truncated(Quarter last) const;
    [[nodiscard]] QuarterlySeries with_values(std::vector<double> values, Transform transform) const;

private:
    std::string country_;
    Variable variable_;
    Quarter start_;
    std::vector<double> values_;
    Transform transform_;
};

/// Natural log of a strictly positive level series.
QuarterlySeries to_log(const QuarterlySeries& series);

struct SeriesKey {
    std::string country;
    Variable variable;
    friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
    friend bool operator==(const SeriesKey&, const SeriesKey&) = default;
};

/// At most one series per (country, variable).
class Panel {
public:
    Panel() = default;

    void insert(QuarterlySeries series);
    [[nodiscard]] const QuarterlySeries* find(const std::string& country, const Variable& variable) const;
    [[nodiscard]] const QuarterlySeries& get(const std::string& country, const Variable& variable) const;
    [[nodiscard]] std::size_t size() const noexcept { return series_.size(); }
    [[nodiscard]] bool empty() const noexcept { return series_.empty(); }
    [[nodiscard]] const std::map<SeriesKey, QuarterlySeries>& series() const noexcept { return series_; }

    /// All series of the given kind, in key order.
    [[nodiscard]] std::vector<const QuarterlySeries*> of_kind(VariableKind kind) const;

    friend bool operator==(const Panel& a, const Panel& b);

private:
    std::map<SeriesKey, QuarterlySeries> series_;
};

bool operator==(const QuarterlySeries& a, const QuarterlySeries& b);

/// Reads `country,variable,quarter,value` CSV. Error messages carry `<source>:<line>`.
Panel read_panel_csv(std::istream& in, const std::string& source = "<stream>");
Panel load_csv(const std::filesystem::path& path);

/// Long-format CSV with the same header load_csv expects.
void write_panel_csv(std::ostream& out, const Panel& panel);

}  // namespace cyclekit
