#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace cyclekit {

/// Heteroskedasticity-consistent covariance flavours.
enum class HcType { hc0, hc1, hc2, hc3 };

const char* to_string(HcType type) noexcept;
HcType parse_hc_type(const std::string& text);

enum class Stars { none, ten, five, one };

/// "", "*", "**" or "***".
const char* to_string(Stars stars) noexcept;
/// *** below 1%, ** below 5%, * below 10%.
Stars stars_for(double p_value) noexcept;

struct RegressionResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd robust_se;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    std::vector<Stars> stars;
    Eigen::VectorXd residuals;
    int n_obs = 0;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    HcType hc = HcType::hc1;

    [[nodiscard]] int dof() const noexcept { return n_obs - static_cast<int>(coefficients.size()); }
};

/// OLS with robust standard errors. The first column of `X` must be the constant.
/// p-values come from a two-sided t distribution with n - k degrees of freedom.
RegressionResult fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, HcType hc = HcType::hc1);

/// Regression of `y` on a constant and `x`.
RegressionResult fit_bivariate(std::span<const double> x, std::span<const double> y, HcType hc = HcType::hc1);

/// Two-sided p-value of a t statistic.
double t_test_p_value(double t, int dof);

/// Least squares that tolerates collinear regressors: returns the minimum-norm solution,
/// whose fitted values are unique. Used by the filters, where exact trends make the lag
/// matrix rank deficient. Throws Error{non_finite} on non-finite inputs.
struct LeastSquaresFit {
    Eigen::VectorXd coefficients;
    Eigen::Index rank = 0;
};
LeastSquaresFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace cyclekit
