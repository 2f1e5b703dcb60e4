#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclekit/dating.hpp"
#include "cyclekit/filters.hpp"
#include "cyclekit/ols.hpp"
#include "cyclekit/series.hpp"

namespace cyclekit {

/// AU, CA, GB and US: the four lowest employment-protection scores in the sample.
bool is_flexible_labour_market(const std::string& country);

/// One recession with the expansions on either side. Unemployment deltas are in
/// percentage points, output deltas and trend effects in per cent.
struct CycleEpisode {
    std::string country;
    Quarter peak;
    Quarter trough;
    std::optional<Quarter> next_peak;  // absent when the sample ends mid-expansion

    std::optional<double> du_recession;
    std::optional<double> du_expansion;
    std::optional<double> dy_recession;
    std::optional<double> dy_expansion;
    std::optional<double> trend_gr;

    bool flexible_group = false;
    bool pre_1990 = false;  // peak before 1990Q1
    int recession_duration = 0;
    std::optional<int> preceding_expansion_duration;
    bool expansion_censored = false;
};

enum class Provenance { computed, table_a1_fixture };

struct EpisodePanel {
    std::vector<CycleEpisode> episodes;
    Provenance provenance = Provenance::computed;

    /// Throws Error{duplicate} when (country, peak) repeats.
    void validate() const;
};

/// Episodes at GDP turning points. Unemployment deltas need the country's
/// unemployment_rate series to cover every turning point (Error{coverage} otherwise);
/// countries without one get no unemployment deltas. Output deltas are left empty where the
/// cycle is not yet defined.
EpisodePanel build_episodes(const std::vector<CycleChronology>& chronologies, const Panel& unemployment,
                            const std::map<std::string, FilterOutput>& output_cycles);

struct LaggedDeltas {
    double du_recession = 0.0;
    std::optional<double> du_expansion;
};

/// Unemployment deltas with every endpoint moved `lag` quarters later (lag in 0..2).
LaggedDeltas lagged_du(const CycleEpisode& episode, const Panel& unemployment, int lag);

struct ForecastLeg {
    Quarter origin;
    int horizon = 0;
    double value = 0.0;  // log points

    [[nodiscard]] Quarter target() const { return origin + horizon; }
};

/// Trend effect of the recession that starts at `peak`: the forecast of log GDP at peak+20
/// made at peak+12 (8 ahead) minus the one made at the peak (20 ahead), in per cent.
/// Both legs use the differences-form direct projection with coefficients estimated on
/// data through the peak.
struct TrendEffect {
    double effect = 0.0;
    ForecastLeg at_peak;
    ForecastLeg after_peak;
};
TrendEffect trend_growth_effect(const QuarterlySeries& log_y, Quarter peak, const FilterConfig& cfg);

/// Fills trend_gr from per-country log GDP; episodes without enough data keep it empty.
EpisodePanel attach_trend_effects(EpisodePanel panel, const std::map<std::string, QuarterlySeries>& log_gdp,
                                  const FilterConfig& cfg);

enum class Group { all, flexible, remaining };
enum class SampleFilter { full, pre1990, post1990, short_recessions, long_recessions };

const char* to_string(Group group) noexcept;
const char* to_string(SampleFilter sample) noexcept;
Group parse_group(const std::string& text);
/// Accepts full, pre1990, post1990, short, long.
SampleFilter parse_sample(const std::string& text);

/// A fitted equation together with the observations behind it (for scatter plots).
struct EquationFit {
    std::string dependent;
    std::string regressor;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::string> labels;  // "<country> <peak>" of the outcome episode
    RegressionResult result;
};

struct RegressionOptions {
    Group group = Group::all;
    SampleFilter sample = SampleFilter::full;
    int lag = 0;
    const Panel* unemployment = nullptr;  // needed when lag != 0
    HcType hc = HcType::hc1;
};

/// du_expansion on du_prev_recession and du_recession on du_prev_expansion.
std::pair<EquationFit, EquationFit> run_unemployment_regressions(const EpisodePanel& panel,
                                                                 const RegressionOptions& options = {});

/// dy_expansion on dy_prev_recession, dy_recession on dy_prev_expansion,
/// trend_gr on dy_prev_recession.
std::array<EquationFit, 3> run_output_regressions(const EpisodePanel& panel, const RegressionOptions& options = {});

struct LongestExpansion {
    std::string country;
    Quarter start;
    Quarter end;
    int duration = 0;
};

struct DurationSummary {
    int episodes = 0;
    double mean_recession = 0.0;
    double median_recession = 0.0;
    int max_recession = 0;
    int expansions = 0;  // uncensored preceding expansions
    double mean_expansion = 0.0;
    double median_expansion = 0.0;
    int max_expansion = 0;
    double mean_cycle = 0.0;  // expansion + following recession
    std::optional<LongestExpansion> longest_expansion;
};

DurationSummary duration_stats(const EpisodePanel& panel);

/// One row of the recession timeline fixture, as printed.
struct TableA1Row {
    std::string country;
    Quarter peak;
    Quarter trough;
    int printed_recession_duration = 0;
    int printed_expansion_duration = 0;  // expansion preceding the peak
    double u_peak = 0.0;
    double u_trough = 0.0;
    double u_next_peak = 0.0;
    double y_peak = 0.0;
    double y_trough = 0.0;
    double y_next_peak = 0.0;
};

std::vector<TableA1Row> read_table_a1(std::istream& in, const std::string& source = "<stream>");
std::vector<TableA1Row> load_table_a1(const std::filesystem::path& path);

/// Episodes from the timeline: durations recomputed from dates, the last row of each country
/// treated as an open expansion, the first row's expansion flagged censored.
EpisodePanel episodes_from_table_a1(const std::vector<TableA1Row>& rows);

/// Where the printed table disagrees with itself (durations vs dates, shared endpoints).
std::vector<std::string> table_a1_discrepancies(const std::vector<TableA1Row>& rows);

/// Directory holding shipped fixtures; CYCLEKIT_FIXTURES overrides the built-in location.
std::filesystem::path fixture_directory();
std::filesystem::path fixture_path(const std::string& name);

}  // namespace cyclekit
