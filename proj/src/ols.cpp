#include "cyclekit/ols.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "cyclekit/error.hpp"

namespace cyclekit {

const char* to_string(HcType type) noexcept {
    switch (type) {
        case HcType::hc0: return "HC0";
        case HcType::hc1: return "HC1";
        case HcType::hc2: return "HC2";
        case HcType::hc3: return "HC3";
    }
    return "?";
}

HcType parse_hc_type(const std::string& text) {
    if (text == "hc0" || text == "HC0") return HcType::hc0;
    if (text == "hc1" || text == "HC1") return HcType::hc1;
    if (text == "hc2" || text == "HC2") return HcType::hc2;
    if (text == "hc3" || text == "HC3") return HcType::hc3;
    throw Error(ErrorCode::invalid_spec, "unknown robust covariance '" + text + "' (hc0..hc3)");
}

const char* to_string(Stars stars) noexcept {
    switch (stars) {
        case Stars::none: return "";
        case Stars::ten: return "*";
        case Stars::five: return "**";
        case Stars::one: return "***";
    }
    return "";
}

Stars stars_for(double p_value) noexcept {
    if (!(p_value < 0.10)) return Stars::none;
    if (p_value < 0.01) return Stars::one;
    if (p_value < 0.05) return Stars::five;
    return Stars::ten;
}

double t_test_p_value(double t, int dof) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(static_cast<double>(dof));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

namespace {

void require_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (!X.allFinite() || !y.allFinite()) {
        throw Error(ErrorCode::non_finite, "regression inputs contain NaN or infinite values");
    }
}

}  // namespace

RegressionResult fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, HcType hc) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (y.size() != n) {
        throw Error(ErrorCode::invalid_spec, "design has " + std::to_string(n) + " rows but response has " +
                                                 std::to_string(y.size()));
    }
    if (n <= k) {
        throw Error(ErrorCode::too_few, "regression needs more observations (" + std::to_string(n) +
                                            ") than coefficients (" + std::to_string(k) + ")");
    }
    require_finite(X, y);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
        throw Error(ErrorCode::rank_deficient, "design matrix has rank " + std::to_string(qr.rank()) + " < " +
                                                   std::to_string(k) + " columns");
    }

    RegressionResult r;
    r.hc = hc;
    r.n_obs = static_cast<int>(n);
    r.coefficients = qr.solve(y);
    r.residuals = y - X * r.coefficients;

    // (X'X)^{-1} = P R^{-1} R^{-T} P'
    Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd r_inv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd bread = qr.colsPermutation() * (r_inv * r_inv.transpose()) * qr.colsPermutation().transpose();

    Eigen::VectorXd weights = r.residuals.array().square();
    if (hc == HcType::hc2 || hc == HcType::hc3) {
        Eigen::VectorXd leverage = ((X * bread).array() * X.array()).rowwise().sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            double one_minus = 1.0 - leverage(i);
            weights(i) /= hc == HcType::hc2 ? one_minus : one_minus * one_minus;
        }
    }
    Eigen::MatrixXd meat = X.transpose() * weights.asDiagonal() * X;
    Eigen::MatrixXd cov = bread * meat * bread;
    if (hc == HcType::hc1) cov *= static_cast<double>(n) / static_cast<double>(n - k);

    r.robust_se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    r.t_stats = r.coefficients.cwiseQuotient(r.robust_se);
    r.p_values.resize(k);
    r.stars.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        r.p_values(j) = t_test_p_value(r.t_stats(j), r.dof());
        r.stars[static_cast<std::size_t>(j)] = stars_for(r.p_values(j));
    }

    double ssr = r.residuals.squaredNorm();
    double sst = (y.array() - y.mean()).square().sum();
    if (sst > 0.0) {
        r.r2 = 1.0 - ssr / sst;
        r.adj_r2 = 1.0 - (1.0 - r.r2) * static_cast<double>(n - 1) / static_cast<double>(n - k);
    } else {
        r.r2 = r.adj_r2 = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

RegressionResult fit_bivariate(std::span<const double> x, std::span<const double> y, HcType hc) {
    if (x.size() != y.size()) throw Error(ErrorCode::invalid_spec, "x and y differ in length");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd Y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = x[static_cast<std::size_t>(i)];
        Y(i) = y[static_cast<std::size_t>(i)];
    }
    return fit_ols(X, Y, hc);
}

LeastSquaresFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    require_finite(X, y);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(X);
    LeastSquaresFit fit;
    fit.rank = cod.rank();
    if (fit.rank == 0) throw Error(ErrorCode::singular, "regressor matrix is zero");
    fit.coefficients = cod.solve(y);
    if (!fit.coefficients.allFinite()) throw Error(ErrorCode::singular, "least-squares solution is not finite");
    return fit;
}

}  // namespace cyclekit
