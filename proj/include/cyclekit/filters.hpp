#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclekit/quarter.hpp"
#include "cyclekit/series.hpp"

namespace cyclekit {

enum class FilterKind { hamilton, quast_wolters, hp_one_sided };

const char* to_string(FilterKind kind) noexcept;
/// Accepts "hamilton", "qw"/"quast_wolters", "hp"/"hp_one_sided".
FilterKind parse_filter_kind(const std::string& text);

struct FilterConfig {
    int lags = 4;
    int horizon = 8;
    // Horizons averaged by the Quast-Wolters filter, inclusive.
    int horizon_min = 4;
    int horizon_max = 12;
    // Observations needed before the first cycle value; defaults to lags + horizon + 20.
    std::optional<int> min_window;
    FilterKind kind = FilterKind::quast_wolters;
    double hp_lambda = 1600.0;

    [[nodiscard]] int resolved_min_window() const { return min_window.value_or(lags + horizon + 20); }
    void validate() const;
};

/// Cyclical component in per cent (100 x log points), defined from first_valid onward.
struct FilterOutput {
    QuarterlySeries cycle;
    Quarter first_valid;

    [[nodiscard]] std::optional<double> at(Quarter q) const;
};

/// One-sided Hamilton filter: at each t, regress y_s on a constant and
/// y_{s-h}, ..., y_{s-h-L+1} over s <= t and keep the residual at t.
FilterOutput hamilton_cycle(const QuarterlySeries& log_y, const FilterConfig& cfg);

/// Mean of the one-sided Hamilton residuals over horizons horizon_min..horizon_max.
FilterOutput quast_wolters_cycle(const QuarterlySeries& log_y, const FilterConfig& cfg);

/// Final-point deviation of a two-sided HP smoother run on every expanding subsample.
FilterOutput hp_one_sided_cycle(const QuarterlySeries& log_y, const FilterConfig& cfg);

/// Dispatches on cfg.kind.
FilterOutput apply_filter(const QuarterlySeries& log_y, const FilterConfig& cfg);

/// Two-sided HP trend of `y` with smoothing parameter `lambda`.
std::vector<double> hp_trend(std::span<const double> y, double lambda);

enum class ForecastForm {
    levels,       // y_{s} on constant + y_{s-h}, ..., y_{s-h-L+1}
    differences,  // y_{s} - y_{s-h} on constant + dy_{s-h}, ..., dy_{s-h-L+1}
};

struct ForecastOptions {
    ForecastForm form = ForecastForm::levels;
    // Last quarter used to estimate coefficients; defaults to the origin.
    std::optional<Quarter> estimation_end;
};

/// Direct projection of log y at origin + horizon, in log points.
double direct_forecast(const QuarterlySeries& log_y, Quarter origin, int horizon, const FilterConfig& cfg,
                       const ForecastOptions& options = {});

}  // namespace cyclekit
