#include "cyclekit/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "cyclekit/csv.hpp"
#include "cyclekit/error.hpp"

namespace cyclekit {

std::string Variable::to_string() const {
    switch (kind) {
        case VariableKind::gdp: return "gdp";
        case VariableKind::unemployment_rate: return "unemployment_rate";
        case VariableKind::gva: return "gva_" + industry;
    }
    return {};
}

Variable parse_variable(const std::string& text) {
    if (text == "gdp") return Variable::gdp();
    if (text == "unemployment_rate") return Variable::unemployment_rate();
    if (text.size() > 4 && text.rfind("gva_", 0) == 0) return Variable::gva(text.substr(4));
    throw Error(ErrorCode::unknown_variable,
                "unknown variable '" + text + "' (expected gdp, unemployment_rate or gva_<industry>)");
}

QuarterlySeries::QuarterlySeries(std::string country, Variable variable, Quarter start,
                                 std::vector<double> values, Transform transform)
    : country_(std::move(country)),
      variable_(std::move(variable)),
      start_(start),
      values_(std::move(values)),
      transform_(transform) {
    if (values_.empty()) {
        throw Error(ErrorCode::insufficient_data, "series " + country_ + "/" + variable_.to_string() + " is empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::non_finite, "series " + country_ + "/" + variable_.to_string() +
                                                   " has a non-finite value at " + quarter_at(i).to_string());
        }
    }
}

bool QuarterlySeries::covers(Quarter q) const { return q >= start_ && q <= end(); }

std::optional<std::size_t> QuarterlySeries::index_of(Quarter q) const {
    if (!covers(q)) return std::nullopt;
    return static_cast<std::size_t>(quarter_diff(q, start_));
}

double QuarterlySeries::at(Quarter q) const {
    auto i = index_of(q);
    if (!i) {
        throw Error(ErrorCode::coverage, "series " + country_ + "/" + variable_.to_string() + " (" +
                                             start_.to_string() + "-" + end().to_string() +
                                             ") does not cover " + q.to_string());
    }
    return values_[*i];
}

QuarterlySeries QuarterlySeries::truncated(Quarter last) const {
    auto i = index_of(last);
    if (!i) throw Error(ErrorCode::coverage, "cannot truncate " + country_ + " at " + last.to_string());
    return with_values(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(*i) + 1),
                       transform_);
}

QuarterlySeries QuarterlySeries::with_values(std::vector<double> values, Transform transform) const {
    return QuarterlySeries(country_, variable_, start_, std::move(values), transform);
}

bool operator==(const QuarterlySeries& a, const QuarterlySeries& b) {
    return a.country() == b.country() && a.variable() == b.variable() && a.start() == b.start() &&
           a.transform() == b.transform() && std::ranges::equal(a.values(), b.values());
}

QuarterlySeries to_log(const QuarterlySeries& series) {
    if (series.transform() == Transform::log) {
        throw Error(ErrorCode::invalid_spec, "series " + series.country() + "/" + series.variable().to_string() +
                                                 " is already in logs");
    }
    std::vector<double> out;
    out.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series[i] > 0.0)) {
            throw Error(ErrorCode::non_positive, "cannot log non-positive value " + std::to_string(series[i]) +
                                                     " of " + series.country() + "/" +
                                                     series.variable().to_string() + " at " +
                                                     series.quarter_at(i).to_string());
        }
        out.push_back(std::log(series[i]));
    }
    return series.with_values(std::move(out), Transform::log);
}

void Panel::insert(QuarterlySeries series) {
    SeriesKey key{series.country(), series.variable()};
    auto [it, inserted] = series_.try_emplace(std::move(key), std::move(series));
    if (!inserted) {
        throw Error(ErrorCode::duplicate,
                    "duplicate series " + it->first.country + "/" + it->first.variable.to_string());
    }
}

const QuarterlySeries* Panel::find(const std::string& country, const Variable& variable) const {
    auto it = series_.find(SeriesKey{country, variable});
    return it == series_.end() ? nullptr : &it->second;
}

const QuarterlySeries& Panel::get(const std::string& country, const Variable& variable) const {
    const auto* s = find(country, variable);
    if (s == nullptr) {
        throw Error(ErrorCode::missing_input, "panel has no series " + country + "/" + variable.to_string());
    }
    return *s;
}

std::vector<const QuarterlySeries*> Panel::of_kind(VariableKind kind) const {
    std::vector<const QuarterlySeries*> out;
    for (const auto& [key, s] : series_) {
        if (key.variable.kind == kind) out.push_back(&s);
    }
    return out;
}

bool operator==(const Panel& a, const Panel& b) { return a.series_ == b.series_; }

namespace {

struct Observation {
    Quarter quarter;
    double value;
    std::size_t line;
};

double parse_number(const std::string& text, const std::string& where) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::non_numeric, where + ": non-numeric value '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::non_numeric, where + ": non-finite value '" + text + "'");
    }
    return value;
}

}  // namespace

Panel read_panel_csv(std::istream& in, const std::string& source) {
    CsvReader reader(in, source);
    auto col_country = reader.column("country");
    auto col_variable = reader.column("variable");
    auto col_quarter = reader.column("quarter");
    auto col_value = reader.column("value");

    std::map<SeriesKey, std::vector<Observation>> grouped;
    while (auto row = reader.next()) {
        const std::string where = reader.where();
        const auto& fields = *row;
        auto rethrow = [&](const Error& e) -> void { throw Error(e.code(), where + ": " + e.what()); };
        SeriesKey key;
        Quarter quarter;
        try {
            key.country = fields[col_country];
            key.variable = parse_variable(fields[col_variable]);
            quarter = parse_quarter(fields[col_quarter]);
        } catch (const Error& e) {
            rethrow(e);
        }
        if (key.country.empty()) throw Error(ErrorCode::malformed, where + ": empty country code");
        double value = parse_number(fields[col_value], where);
        if (key.variable.is_output_level() && !(value > 0.0)) {
            throw Error(ErrorCode::non_positive, where + ": " + key.variable.to_string() +
                                                     " level must be positive, got " + fields[col_value]);
        }
        grouped[key].push_back(Observation{quarter, value, reader.line()});
    }

    Panel panel;
    for (auto& [key, obs] : grouped) {
        std::ranges::sort(obs, [](const Observation& a, const Observation& b) {
            return std::tie(a.quarter, a.line) < std::tie(b.quarter, b.line);
        });
        std::vector<double> values;
        values.reserve(obs.size());
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (i > 0) {
                auto step = quarter_diff(obs[i].quarter, obs[i - 1].quarter);
                if (step == 0) {
                    throw Error(ErrorCode::duplicate, source + ":" + std::to_string(obs[i].line) + ": duplicate row " +
                                                          key.country + "/" + key.variable.to_string() + "/" +
                                                          obs[i].quarter.to_string() + " (first at line " +
                                                          std::to_string(obs[i - 1].line) + ")");
                }
                if (step > 1) {
                    throw Error(ErrorCode::gap, source + ": gap in " + key.country + "/" + key.variable.to_string() +
                                                    " between " + obs[i - 1].quarter.to_string() + " and " +
                                                    obs[i].quarter.to_string());
                }
            }
            values.push_back(obs[i].value);
        }
        panel.insert(QuarterlySeries(key.country, key.variable, obs.front().quarter, std::move(values)));
    }
    return panel;
}

Panel load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return read_panel_csv(in, path.string());
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
    out << "country,variable,quarter,value\n";
    for (const auto& [key, s] : panel.series()) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << key.country << ',' << key.variable.to_string() << ',' << s.quarter_at(i).to_string() << ','
                << format_double(s[i]) << '\n';
        }
    }
}

}  // namespace cyclekit
