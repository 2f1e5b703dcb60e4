#include "cyclekit/filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cyclekit/error.hpp"
#include "cyclekit/ols.hpp"

namespace cyclekit {

const char* to_string(FilterKind kind) noexcept {
    switch (kind) {
        case FilterKind::hamilton: return "hamilton";
        case FilterKind::quast_wolters: return "quast_wolters";
        case FilterKind::hp_one_sided: return "hp_one_sided";
    }
    return "?";
}

FilterKind parse_filter_kind(const std::string& text) {
    if (text == "hamilton") return FilterKind::hamilton;
    if (text == "qw" || text == "quast_wolters") return FilterKind::quast_wolters;
    if (text == "hp" || text == "hp_one_sided") return FilterKind::hp_one_sided;
    throw Error(ErrorCode::invalid_spec, "unknown filter kind '" + text + "' (hamilton, qw, hp)");
}

void FilterConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::invalid_spec, what); };
    if (lags < 1) bad("lags must be >= 1");
    if (horizon < 1) bad("horizon must be >= 1");
    if (horizon_min < 1 || horizon_max < horizon_min) bad("horizon set must be a non-empty range of positive horizons");
    if (!(hp_lambda > 0.0)) bad("hp_lambda must be positive");
    int longest = std::max(horizon, horizon_max);
    int needed = lags + longest + lags + 1;
    if (resolved_min_window() < needed) {
        bad("min_window " + std::to_string(resolved_min_window()) + " is below lags + horizon + lags + 1 = " +
            std::to_string(needed));
    }
}

std::optional<double> FilterOutput::at(Quarter q) const {
    auto i = cycle.index_of(q);
    if (!i) return std::nullopt;
    return cycle[*i];
}

namespace {

void require_log(const QuarterlySeries& y) {
    if (y.transform() != Transform::log) {
        throw Error(ErrorCode::invalid_spec, "filters expect log series; " + y.country() + "/" +
                                                 y.variable().to_string() + " is in levels");
    }
}

std::size_t first_valid_index(const QuarterlySeries& y, const FilterConfig& cfg) {
    auto window = static_cast<std::size_t>(cfg.resolved_min_window());
    if (y.size() < window) {
        throw Error(ErrorCode::insufficient_data, "series " + y.country() + "/" + y.variable().to_string() + " has " +
                                                      std::to_string(y.size()) + " observations; the filter needs " +
                                                      std::to_string(window));
    }
    return window - 1;
}

FilterOutput make_output(const QuarterlySeries& y, std::size_t first, std::vector<double> cycle) {
    Quarter first_q = y.quarter_at(first);
    return FilterOutput{QuarterlySeries(y.country(), y.variable(), first_q, std::move(cycle)), first_q};
}

/// Rows s = first_row..last of the lag design for horizon h: [1, y_{s-h}, ..., y_{s-h-L+1}].
Eigen::MatrixXd lag_design(std::span<const double> regressor, std::size_t first_row, std::size_t last, int h, int lags) {
    auto rows = static_cast<Eigen::Index>(last - first_row + 1);
    Eigen::MatrixXd X(rows, lags + 1);
    for (Eigen::Index r = 0; r < rows; ++r) {
        auto s = first_row + static_cast<std::size_t>(r);
        X(r, 0) = 1.0;
        for (int j = 0; j < lags; ++j) X(r, j + 1) = regressor[s - static_cast<std::size_t>(h + j)];
    }
    return X;
}

std::vector<double> hamilton_values(std::span<const double> y, std::size_t first, int h, int lags) {
    const auto first_row = static_cast<std::size_t>(h + lags - 1);
    std::vector<double> out;
    out.reserve(y.size() - first);
    for (std::size_t t = first; t < y.size(); ++t) {
        Eigen::MatrixXd X = lag_design(y, first_row, t, h, lags);
        Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data() + first_row, X.rows());
        auto fit = least_squares(X, Y);
        double fitted = X.row(X.rows() - 1).dot(fit.coefficients);
        out.push_back(100.0 * (y[t] - fitted));
    }
    return out;
}

}  // namespace

FilterOutput hamilton_cycle(const QuarterlySeries& log_y, const FilterConfig& cfg) {
    cfg.validate();
    require_log(log_y);
    auto first = first_valid_index(log_y, cfg);
    return make_output(log_y, first, hamilton_values(log_y.values(), first, cfg.horizon, cfg.lags));
}

FilterOutput quast_wolters_cycle(const QuarterlySeries& log_y, const FilterConfig& cfg) {
    cfg.validate();
    require_log(log_y);
    auto first = first_valid_index(log_y, cfg);
    std::vector<double> sum(log_y.size() - first, 0.0);
    for (int h = cfg.horizon_min; h <= cfg.horizon_max; ++h) {
        auto cycle = hamilton_values(log_y.values(), first, h, cfg.lags);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += cycle[i];
    }
    const double count = cfg.horizon_max - cfg.horizon_min + 1;
    for (auto& v : sum) v /= count;
    return make_output(log_y, first, std::move(sum));
}

std::vector<double> hp_trend(std::span<const double> y, double lambda) {
    const auto n = y.size();
    if (n < 3) throw Error(ErrorCode::insufficient_data, "HP filter needs at least 3 observations");
    // Banded Cholesky of A = I + lambda D'D (D = second differences), bandwidth 2.
    std::vector<double> d0(n, 1.0), d1(n, 0.0), d2(n, 0.0);
    constexpr double kSecondDiff[3] = {1.0, -2.0, 1.0};
    for (std::size_t r = 0; r + 2 < n; ++r) {
        for (std::size_t a = 0; a < 3; ++a) {
            d0[r + a] += lambda * kSecondDiff[a] * kSecondDiff[a];
            if (a + 1 < 3) d1[r + a] += lambda * kSecondDiff[a] * kSecondDiff[a + 1];
        }
        d2[r] += lambda * kSecondDiff[0] * kSecondDiff[2];
    }
    // A = L L' with L lower triangular, two sub-diagonals l1, l2.
    std::vector<double> l0(n), l1(n, 0.0), l2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double a = d0[i];
        if (i >= 1) a -= l1[i - 1] * l1[i - 1];
        if (i >= 2) a -= l2[i - 2] * l2[i - 2];
        l0[i] = std::sqrt(a);
        if (i + 1 < n) {
            double b = d1[i];
            if (i >= 1) b -= l2[i - 1] * l1[i - 1];
            l1[i] = b / l0[i];
        }
        if (i + 2 < n) l2[i] = d2[i] / l0[i];
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = y[i];
        if (i >= 1) v -= l1[i - 1] * z[i - 1];
        if (i >= 2) v -= l2[i - 2] * z[i - 2];
        z[i] = v / l0[i];
    }
    std::vector<double> tau(n);
    for (std::size_t k = n; k-- > 0;) {
        double v = z[k];
        if (k + 1 < n) v -= l1[k] * tau[k + 1];
        if (k + 2 < n) v -= l2[k] * tau[k + 2];
        tau[k] = v / l0[k];
    }
    return tau;
}

FilterOutput hp_one_sided_cycle(const QuarterlySeries& log_y, const FilterConfig& cfg) {
    cfg.validate();
    require_log(log_y);
    auto first = first_valid_index(log_y, cfg);
    auto y = log_y.values();
    std::vector<double> out;
    out.reserve(y.size() - first);
    for (std::size_t t = first; t < y.size(); ++t) {
        auto tau = hp_trend(y.first(t + 1), cfg.hp_lambda);
        out.push_back(100.0 * (y[t] - tau.back()));
    }
    return make_output(log_y, first, std::move(out));
}

FilterOutput apply_filter(const QuarterlySeries& log_y, const FilterConfig& cfg) {
    switch (cfg.kind) {
        case FilterKind::hamilton: return hamilton_cycle(log_y, cfg);
        case FilterKind::quast_wolters: return quast_wolters_cycle(log_y, cfg);
        case FilterKind::hp_one_sided: return hp_one_sided_cycle(log_y, cfg);
    }
    throw Error(ErrorCode::invalid_spec, "unknown filter kind");
}

double direct_forecast(const QuarterlySeries& log_y, Quarter origin, int horizon, const FilterConfig& cfg,
                       const ForecastOptions& options) {
    require_log(log_y);
    if (horizon < 1) throw Error(ErrorCode::invalid_spec, "forecast horizon must be >= 1");
    if (cfg.lags < 1) throw Error(ErrorCode::invalid_spec, "lags must be >= 1");
    auto origin_index = log_y.index_of(origin);
    if (!origin_index) {
        throw Error(ErrorCode::coverage, "forecast origin " + origin.to_string() + " outside " + log_y.country() +
                                             " sample " + log_y.start().to_string() + "-" + log_y.end().to_string());
    }
    Quarter est_end = options.estimation_end.value_or(origin);
    if (est_end > origin) throw Error(ErrorCode::invalid_spec, "estimation cannot extend past the forecast origin");
    auto end_index = log_y.index_of(est_end);
    if (!end_index) throw Error(ErrorCode::coverage, "estimation end " + est_end.to_string() + " outside sample");

    const int lags = cfg.lags;
    const bool diffs = options.form == ForecastForm::differences;
    const auto first_row = static_cast<std::size_t>(horizon + lags - 1 + (diffs ? 1 : 0));
    auto insufficient = [&]() {
        return Error(ErrorCode::insufficient_data, "not enough data through " + est_end.to_string() + " for a " +
                                                       std::to_string(horizon) + "-quarter forecast of " +
                                                       log_y.country());
    };
    if (*end_index + 1 < static_cast<std::size_t>(cfg.resolved_min_window())) throw insufficient();
    if (*end_index < first_row || *end_index - first_row + 1 < static_cast<std::size_t>(lags + 2)) throw insufficient();

    auto y = log_y.values();
    std::vector<double> regressor(y.begin(), y.end());
    if (diffs) {
        regressor[0] = 0.0;  // never used: first_row skips it
        for (std::size_t i = 1; i < y.size(); ++i) regressor[i] = y[i] - y[i - 1];
    }
    Eigen::MatrixXd X = lag_design(regressor, first_row, *end_index, horizon, lags);
    Eigen::VectorXd Y(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        auto s = first_row + static_cast<std::size_t>(r);
        Y(r) = diffs ? y[s] - y[s - static_cast<std::size_t>(horizon)] : y[s];
    }
    auto fit = least_squares(X, Y);

    Eigen::VectorXd x(lags + 1);
    x(0) = 1.0;
    for (int j = 0; j < lags; ++j) {
        if (*origin_index < static_cast<std::size_t>(j + (diffs ? 1 : 0))) throw insufficient();
        x(j + 1) = regressor[*origin_index - static_cast<std::size_t>(j)];
    }
    double projection = x.dot(fit.coefficients);
    return diffs ? y[*origin_index] + projection : projection;
}

}  // namespace cyclekit
