#include "cyclekit/episodes.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "cyclekit/csv.hpp"
#include "cyclekit/error.hpp"

#ifndef CYCLEKIT_DEFAULT_FIXTURE_DIR
#define CYCLEKIT_DEFAULT_FIXTURE_DIR "data"
#endif

namespace cyclekit {

namespace {

const Quarter kInflationTargetingEra{1990, 1};

CycleEpisode make_episode(const std::string& country, Quarter peak, Quarter trough) {
    CycleEpisode e;
    e.country = country;
    e.peak = peak;
    e.trough = trough;
    e.flexible_group = is_flexible_labour_market(country);
    e.pre_1990 = peak < kInflationTargetingEra;
    e.recession_duration = static_cast<int>(quarter_diff(trough, peak));
    return e;
}

std::string label(const CycleEpisode& e) { return e.country + " " + e.peak.to_string(); }

double median(std::vector<double> v) {
    std::ranges::sort(v);
    auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

bool is_flexible_labour_market(const std::string& country) {
    return country == "AU" || country == "CA" || country == "GB" || country == "US";
}

void EpisodePanel::validate() const {
    std::set<std::pair<std::string, Quarter>> seen;
    for (const auto& e : episodes) {
        if (!seen.emplace(e.country, e.peak).second) {
            throw Error(ErrorCode::duplicate, "duplicate episode " + label(e));
        }
    }
}

EpisodePanel build_episodes(const std::vector<CycleChronology>& chronologies, const Panel& unemployment,
                            const std::map<std::string, FilterOutput>& output_cycles) {
    EpisodePanel panel;
    panel.provenance = Provenance::computed;
    for (const auto& chron : chronologies) {
        const auto* u = unemployment.find(chron.country, Variable::unemployment_rate());
        auto cycle_it = output_cycles.find(chron.country);
        const FilterOutput* cycle = cycle_it == output_cycles.end() ? nullptr : &cycle_it->second;

        for (const auto& row : phase_table(chron)) {
            auto e = make_episode(chron.country, row.peak, row.trough);
            e.preceding_expansion_duration = row.preceding_expansion_duration;
            e.expansion_censored = row.expansion_censored;
            auto next = std::ranges::find_if(chron.points, [&](const TurningPoint& p) {
                return p.kind == TurningKind::peak && p.quarter > row.trough;
            });
            if (next != chron.points.end()) e.next_peak = next->quarter;

            if (u != nullptr) {
                e.du_recession = u->at(e.trough) - u->at(e.peak);
                if (e.next_peak) e.du_expansion = u->at(*e.next_peak) - u->at(e.trough);
            }
            if (cycle != nullptr) {
                auto at_peak = cycle->at(e.peak);
                auto at_trough = cycle->at(e.trough);
                if (at_peak && at_trough) e.dy_recession = *at_trough - *at_peak;
                if (at_trough && e.next_peak) {
                    if (auto at_next = cycle->at(*e.next_peak)) e.dy_expansion = *at_next - *at_trough;
                }
            }
            panel.episodes.push_back(std::move(e));
        }
    }
    panel.validate();
    return panel;
}

LaggedDeltas lagged_du(const CycleEpisode& episode, const Panel& unemployment, int lag) {
    if (lag < 0 || lag > 2) throw Error(ErrorCode::invalid_spec, "unemployment lag must be 0, 1 or 2");
    const auto& u = unemployment.get(episode.country, Variable::unemployment_rate());
    LaggedDeltas out;
    out.du_recession = u.at(episode.trough + lag) - u.at(episode.peak + lag);
    if (episode.next_peak) out.du_expansion = u.at(*episode.next_peak + lag) - u.at(episode.trough + lag);
    return out;
}

TrendEffect trend_growth_effect(const QuarterlySeries& log_y, Quarter peak, const FilterConfig& cfg) {
    constexpr int kLongHorizon = 20;
    constexpr int kLateOrigin = 12;
    if (!log_y.covers(peak + kLateOrigin)) {
        throw Error(ErrorCode::insufficient_data, log_y.country() + " sample ends before " +
                                                      (peak + kLateOrigin).to_string() + ", three years after the " +
                                                      peak.to_string() + " peak");
    }
    ForecastOptions options{ForecastForm::differences, peak};
    TrendEffect out;
    out.at_peak = {peak, kLongHorizon, direct_forecast(log_y, peak, kLongHorizon, cfg, options)};
    out.after_peak = {peak + kLateOrigin, kLongHorizon - kLateOrigin,
                      direct_forecast(log_y, peak + kLateOrigin, kLongHorizon - kLateOrigin, cfg, options)};
    out.effect = 100.0 * (out.after_peak.value - out.at_peak.value);
    return out;
}

EpisodePanel attach_trend_effects(EpisodePanel panel, const std::map<std::string, QuarterlySeries>& log_gdp,
                                  const FilterConfig& cfg) {
    for (auto& e : panel.episodes) {
        auto it = log_gdp.find(e.country);
        if (it == log_gdp.end()) continue;
        try {
            e.trend_gr = trend_growth_effect(it->second, e.peak, cfg).effect;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::insufficient_data && err.code() != ErrorCode::coverage) throw;
            e.trend_gr.reset();
        }
    }
    return panel;
}

const char* to_string(Group group) noexcept {
    switch (group) {
        case Group::all: return "all";
        case Group::flexible: return "flexible";
        case Group::remaining: return "remaining";
    }
    return "?";
}

const char* to_string(SampleFilter sample) noexcept {
    switch (sample) {
        case SampleFilter::full: return "full";
        case SampleFilter::pre1990: return "pre1990";
        case SampleFilter::post1990: return "post1990";
        case SampleFilter::short_recessions: return "short";
        case SampleFilter::long_recessions: return "long";
    }
    return "?";
}

Group parse_group(const std::string& text) {
    for (auto g : {Group::all, Group::flexible, Group::remaining}) {
        if (text == to_string(g)) return g;
    }
    throw Error(ErrorCode::invalid_spec, "unknown group '" + text + "' (all, flexible, remaining)");
}

SampleFilter parse_sample(const std::string& text) {
    for (auto s : {SampleFilter::full, SampleFilter::pre1990, SampleFilter::post1990, SampleFilter::short_recessions,
                   SampleFilter::long_recessions}) {
        if (text == to_string(s)) return s;
    }
    if (text == "short_recessions") return SampleFilter::short_recessions;
    if (text == "long_recessions") return SampleFilter::long_recessions;
    throw Error(ErrorCode::invalid_spec, "unknown sample '" + text + "' (full, pre1990, post1990, short, long)");
}

namespace {

class Selector {
public:
    Selector(const EpisodePanel& panel, const RegressionOptions& options) : options_(options) {
        if (panel.episodes.empty()) throw Error(ErrorCode::too_few, "episode panel is empty");
        std::vector<double> durations;
        for (const auto& e : panel.episodes) durations.push_back(e.recession_duration);
        median_duration_ = median(std::move(durations));
    }

    [[nodiscard]] bool operator()(const CycleEpisode& e) const {
        switch (options_.group) {
            case Group::all: break;
            case Group::flexible:
                if (!e.flexible_group) return false;
                break;
            case Group::remaining:
                if (e.flexible_group) return false;
                break;
        }
        switch (options_.sample) {
            case SampleFilter::full: return true;
            case SampleFilter::pre1990: return e.pre_1990;
            case SampleFilter::post1990: return !e.pre_1990;
            case SampleFilter::short_recessions: return e.recession_duration <= median_duration_;
            case SampleFilter::long_recessions: return e.recession_duration > median_duration_;
        }
        return false;
    }

private:
    RegressionOptions options_;
    double median_duration_ = 0.0;
};

/// Episodes of each country in chronological order.
std::vector<std::vector<const CycleEpisode*>> by_country(const EpisodePanel& panel) {
    std::map<std::string, std::vector<const CycleEpisode*>> grouped;
    for (const auto& e : panel.episodes) grouped[e.country].push_back(&e);
    std::vector<std::vector<const CycleEpisode*>> out;
    for (auto& [country, list] : grouped) {
        std::ranges::sort(list, {}, &CycleEpisode::peak);
        out.push_back(std::move(list));
    }
    return out;
}

EquationFit fit_equation(std::string dependent, std::string regressor, std::vector<double> x, std::vector<double> y,
                         std::vector<std::string> labels, HcType hc) {
    if (x.size() < 3) {
        throw Error(ErrorCode::too_few, dependent + " on " + regressor + ": only " + std::to_string(x.size()) +
                                            " usable episodes, need at least 3");
    }
    EquationFit fit{std::move(dependent), std::move(regressor), std::move(x), std::move(y), std::move(labels), {}};
    fit.result = fit_bivariate(fit.x, fit.y, hc);
    return fit;
}


/// Same-episode pairs: outcome measured over the expansion or trend that follows the
/// recession in `regressor`.
EquationFit same_episode_fit(const EpisodePanel& panel, const Selector& select, std::string dependent,
                             std::string regressor, const std::function<std::optional<double>(const CycleEpisode&)>& y_of,
                             const std::function<std::optional<double>(const CycleEpisode&)>& x_of, HcType hc) {
    std::vector<double> x, y;
    std::vector<std::string> labels;
    for (const auto& list : by_country(panel)) {
        for (const auto* e : list) {
            if (!select(*e)) continue;
            auto xv = x_of(*e);
            auto yv = y_of(*e);
            if (!xv || !yv) continue;
            x.push_back(*xv);
            y.push_back(*yv);
            labels.push_back(label(*e));
        }
    }
    return fit_equation(std::move(dependent), std::move(regressor), std::move(x), std::move(y), std::move(labels), hc);
}

/// Recession outcome on the expansion that preceded it, within a country.
EquationFit previous_expansion_fit(const EpisodePanel& panel, const Selector& select, std::string dependent,
                                   std::string regressor,
                                   const std::function<std::optional<double>(const CycleEpisode&)>& recession_of,
                                   const std::function<std::optional<double>(const CycleEpisode&)>& expansion_of,
                                   HcType hc) {
    std::vector<double> x, y;
    std::vector<std::string> labels;
    for (const auto& list : by_country(panel)) {
        for (std::size_t i = 1; i < list.size(); ++i) {
            const auto& prev = *list[i - 1];
            const auto& cur = *list[i];
            if (!select(cur) || prev.next_peak != cur.peak) continue;
            auto xv = expansion_of(prev);
            auto yv = recession_of(cur);
            if (!xv || !yv) continue;
            x.push_back(*xv);
            y.push_back(*yv);
            labels.push_back(label(cur));
        }
    }
    return fit_equation(std::move(dependent), std::move(regressor), std::move(x), std::move(y), std::move(labels), hc);
}

}  // namespace

std::pair<EquationFit, EquationFit> run_unemployment_regressions(const EpisodePanel& panel,
                                                                 const RegressionOptions& options) {
    Selector select(panel, options);
    std::function<std::optional<double>(const CycleEpisode&)> recession = [](const CycleEpisode& e) {
        return e.du_recession;
    };
    std::function<std::optional<double>(const CycleEpisode&)> expansion = [](const CycleEpisode& e) {
        return e.du_expansion;
    };
    if (options.lag != 0) {
        if (options.unemployment == nullptr) {
            throw Error(ErrorCode::missing_input, "lagged unemployment changes need the unemployment series");
        }
        const Panel& u = *options.unemployment;
        const int lag = options.lag;
        recession = [&u, lag](const CycleEpisode& e) -> std::optional<double> { return lagged_du(e, u, lag).du_recession; };
        expansion = [&u, lag](const CycleEpisode& e) { return lagged_du(e, u, lag).du_expansion; };
    }
    auto eq1 = same_episode_fit(panel, select, "du_expansion", "du_prev_recession", expansion, recession, options.hc);
    auto eq2 = previous_expansion_fit(panel, select, "du_recession", "du_prev_expansion", recession, expansion, options.hc);
    return {std::move(eq1), std::move(eq2)};
}

std::array<EquationFit, 3> run_output_regressions(const EpisodePanel& panel, const RegressionOptions& options) {
    Selector select(panel, options);
    auto recession = [](const CycleEpisode& e) { return e.dy_recession; };
    auto expansion = [](const CycleEpisode& e) { return e.dy_expansion; };
    auto trend = [](const CycleEpisode& e) { return e.trend_gr; };
    return {same_episode_fit(panel, select, "dy_expansion", "dy_prev_recession", expansion, recession, options.hc),
            previous_expansion_fit(panel, select, "dy_recession", "dy_prev_expansion", recession, expansion, options.hc),
            same_episode_fit(panel, select, "trend_gr_expansion", "dy_prev_recession", trend, recession, options.hc)};
}

DurationSummary duration_stats(const EpisodePanel& panel) {
    if (panel.episodes.empty()) throw Error(ErrorCode::too_few, "no episodes to summarise");
    DurationSummary s;
    std::vector<double> recessions;
    std::vector<double> expansions;
    std::vector<double> cycles;
    for (const auto& e : panel.episodes) {
        recessions.push_back(e.recession_duration);
        s.max_recession = std::max(s.max_recession, e.recession_duration);
        if (e.expansion_censored || !e.preceding_expansion_duration) continue;
        int d = *e.preceding_expansion_duration;
        expansions.push_back(d);
        cycles.push_back(d + e.recession_duration);
        if (!s.longest_expansion || d > s.longest_expansion->duration) {
            s.longest_expansion = LongestExpansion{e.country, e.peak - d, e.peak, d};
        }
    }
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    s.episodes = static_cast<int>(panel.episodes.size());
    s.mean_recession = mean(recessions);
    s.median_recession = median(recessions);
    s.expansions = static_cast<int>(expansions.size());
    s.mean_expansion = mean(expansions);
    s.median_expansion = expansions.empty() ? std::numeric_limits<double>::quiet_NaN() : median(expansions);
    s.max_expansion = s.longest_expansion ? s.longest_expansion->duration : 0;
    s.mean_cycle = mean(cycles);
    return s;
}

std::vector<TableA1Row> read_table_a1(std::istream& in, const std::string& source) {
    CsvReader reader(in, source);
    const auto c_country = reader.column("country");
    const auto c_peak = reader.column("peak");
    const auto c_trough = reader.column("trough");
    const auto c_rec = reader.column("recession_duration");
    const auto c_exp = reader.column("expansion_duration");
    const auto c_up = reader.column("u_peak");
    const auto c_ut = reader.column("u_trough");
    const auto c_un = reader.column("u_next_peak");
    const auto c_yp = reader.column("y_peak");
    const auto c_yt = reader.column("y_trough");
    const auto c_yn = reader.column("y_next_peak");

    std::vector<TableA1Row> rows;
    while (auto fields = reader.next()) {
        const auto& f = *fields;
        auto num = [&](std::size_t col) {
            try {
                std::size_t used = 0;
                double v = std::stod(f[col], &used);
                if (used == f[col].size()) return v;
            } catch (const std::exception&) {
            }
            throw Error(ErrorCode::non_numeric, reader.where() + ": non-numeric value '" + f[col] + "'");
        };
        TableA1Row row;
        row.country = f[c_country];
        try {
            row.peak = parse_quarter(f[c_peak]);
            row.trough = parse_quarter(f[c_trough]);
        } catch (const Error& e) {
            throw Error(e.code(), reader.where() + ": " + e.what());
        }
        row.printed_recession_duration = static_cast<int>(num(c_rec));
        row.printed_expansion_duration = static_cast<int>(num(c_exp));
        row.u_peak = num(c_up);
        row.u_trough = num(c_ut);
        row.u_next_peak = num(c_un);
        row.y_peak = num(c_yp);
        row.y_trough = num(c_yt);
        row.y_next_peak = num(c_yn);
        if (row.trough <= row.peak) {
            throw Error(ErrorCode::malformed, reader.where() + ": trough does not follow peak");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TableA1Row> load_table_a1(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open fixture " + path.string());
    return read_table_a1(in, path.string());
}

namespace {

std::vector<std::vector<const TableA1Row*>> rows_by_country(const std::vector<TableA1Row>& rows) {
    std::map<std::string, std::vector<const TableA1Row*>> grouped;
    for (const auto& r : rows) grouped[r.country].push_back(&r);
    std::vector<std::vector<const TableA1Row*>> out;
    for (auto& [c, list] : grouped) {
        std::ranges::sort(list, {}, &TableA1Row::peak);
        out.push_back(std::move(list));
    }
    return out;
}

}  // namespace

EpisodePanel episodes_from_table_a1(const std::vector<TableA1Row>& rows) {
    EpisodePanel panel;
    panel.provenance = Provenance::table_a1_fixture;
    for (const auto& list : rows_by_country(rows)) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& r = *list[i];
            auto e = make_episode(r.country, r.peak, r.trough);
            e.du_recession = r.u_trough - r.u_peak;
            if (i == 0) {
                e.expansion_censored = true;
                e.preceding_expansion_duration = r.printed_expansion_duration;
            } else {
                e.preceding_expansion_duration = static_cast<int>(quarter_diff(r.peak, list[i - 1]->trough));
            }
            if (i + 1 < list.size()) {
                e.next_peak = list[i + 1]->peak;
                e.du_expansion = r.u_next_peak - r.u_trough;
            }
            panel.episodes.push_back(std::move(e));
        }
    }
    panel.validate();
    return panel;
}

std::vector<std::string> table_a1_discrepancies(const std::vector<TableA1Row>& rows) {
    std::vector<std::string> out;
    for (const auto& list : rows_by_country(rows)) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& r = *list[i];
            auto where = r.country + " " + r.peak.to_string() + "-" + r.trough.to_string();
            auto dated = quarter_diff(r.trough, r.peak);
            if (dated != r.printed_recession_duration) {
                out.push_back(where + ": printed recession duration " + std::to_string(r.printed_recession_duration) +
                              ", dates span " + std::to_string(dated));
            }
            if (i == 0) continue;
            const auto& prev = *list[i - 1];
            auto expansion = quarter_diff(r.peak, prev.trough);
            if (expansion != r.printed_expansion_duration) {
                out.push_back(where + ": printed expansion duration " + std::to_string(r.printed_expansion_duration) +
                              ", dates span " + std::to_string(expansion));
            }
            if (prev.u_next_peak != r.u_peak) {
                out.push_back(where + ": unemployment at peak " + format_double(r.u_peak) +
                              " differs from previous row's subsequent-peak value " + format_double(prev.u_next_peak));
            }
            if (prev.y_next_peak != r.y_peak) {
                out.push_back(where + ": output index at peak " + format_double(r.y_peak) +
                              " differs from previous row's subsequent-peak value " + format_double(prev.y_next_peak));
            }
        }
    }
    return out;
}

std::filesystem::path fixture_directory() {
    if (const char* env = std::getenv("CYCLEKIT_FIXTURES"); env != nullptr && *env != '\0') return env;
    return CYCLEKIT_DEFAULT_FIXTURE_DIR;
}

std::filesystem::path fixture_path(const std::string& name) {
    auto path = fixture_directory() / (name + ".csv");
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::missing_input, "fixture '" + name + "' not found at " + path.string());
    }
    return path;
}

}  // namespace cyclekit
