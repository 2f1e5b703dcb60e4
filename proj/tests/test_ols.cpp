#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cyclekit/error.hpp"
#include "cyclekit/ols.hpp"
#include "oracles.hpp"

using namespace cyclekit;

namespace {

struct Reference {
    std::vector<long double> beta;
    std::vector<long double> se;
};

// Normal equations and the sandwich written out element by element.
Reference reference_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, HcType hc) {
    const auto n = static_cast<std::size_t>(X.rows()), k = static_cast<std::size_t>(X.cols());
    oracle::Matrix xtx(k, std::vector<long double>(k, 0));
    std::vector<long double> xty(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += static_cast<long double>(X(i, a)) * y(i);
            for (std::size_t b = 0; b < k; ++b) xtx[a][b] += static_cast<long double>(X(i, a)) * X(i, b);
        }
    }
    auto inv = oracle::invert(xtx);
    Reference r;
    r.beta.assign(k, 0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) r.beta[a] += inv[a][b] * xty[b];
    }
    oracle::Matrix meat(k, std::vector<long double>(k, 0));
    for (std::size_t i = 0; i < n; ++i) {
        long double e = y(i);
        for (std::size_t a = 0; a < k; ++a) e -= X(i, a) * r.beta[a];
        long double h = 0;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) h += X(i, a) * inv[a][b] * X(i, b);
        }
        long double w = e * e;
        if (hc == HcType::hc2) w /= (1 - h);
        if (hc == HcType::hc3) w /= (1 - h) * (1 - h);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) meat[a][b] += w * X(i, a) * X(i, b);
        }
    }
    long double scale = hc == HcType::hc1 ? static_cast<long double>(n) / static_cast<long double>(n - k) : 1;
    for (std::size_t a = 0; a < k; ++a) {
        long double v = 0;
        for (std::size_t b = 0; b < k; ++b) {
            for (std::size_t c = 0; c < k; ++c) v += inv[a][b] * meat[b][c] * inv[c][a];
        }
        r.se.push_back(std::sqrt(v * scale));
    }
    return r;
}

struct Instance {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

Instance random_instance(std::mt19937_64& rng, int n, int k) {
    std::normal_distribution<double> z;
    Instance in{Eigen::MatrixXd(n, k), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        in.X(i, 0) = 1;
        for (int j = 1; j < k; ++j) in.X(i, j) = 3 * z(rng) + j;
        double sd = 0.5 + std::abs(in.X(i, k > 1 ? 1 : 0));
        in.y(i) = 1.5 - 0.7 * in.X(i, k - 1) + sd * z(rng);
    }
    return in;
}

bool rel_close(double got, long double want, double tol) {
    return std::abs(got - static_cast<double>(want)) <= tol * std::max(1.0L, std::abs(want));
}

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::io;
}

}  // namespace

TEST_SUITE("ols") {

TEST_CASE("exact fit") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double v : x) y.push_back(2 * v + 1);
    auto r = fit_bivariate(x, y);
    CHECK(r.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.coefficients[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.residuals.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(r.adj_r2 == doctest::Approx(1.0));
    CHECK(r.n_obs == 5);
    CHECK(r.dof() == 3);
}

TEST_CASE("matches the normal-equation oracle for every HC flavour") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> kd(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        int k = kd(rng);
        int n = std::uniform_int_distribution<int>(k + 2, 50)(rng);
        auto in = random_instance(rng, n, k);
        for (auto hc : {HcType::hc0, HcType::hc1, HcType::hc2, HcType::hc3}) {
            auto r = fit_ols(in.X, in.y, hc);
            auto ref = reference_fit(in.X, in.y, hc);
            for (int j = 0; j < k; ++j) {
                REQUIRE(rel_close(r.coefficients[j], ref.beta[static_cast<std::size_t>(j)], 1e-10));
                REQUIRE(rel_close(r.robust_se[j], ref.se[static_cast<std::size_t>(j)], 1e-10));
            }
        }
    }
}

TEST_CASE("result invariants") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        auto in = random_instance(rng, 30, 3);
        auto r = fit_ols(in.X, in.y);
        for (int j = 0; j < 3; ++j) {
            CHECK(r.t_stats[j] == doctest::Approx(r.coefficients[j] / r.robust_se[j]));
            CHECK(r.p_values[j] >= 0.0);
            CHECK(r.p_values[j] <= 1.0);
            CHECK(r.stars[static_cast<std::size_t>(j)] == stars_for(r.p_values[j]));
        }
        CHECK((in.X.transpose() * r.residuals).cwiseAbs().maxCoeff() <= 1e-8 * 30);
        double sst = (in.y.array() - in.y.mean()).square().sum();
        double r2 = 1 - r.residuals.squaredNorm() / sst;
        CHECK(r.r2 == doctest::Approx(r2));
        CHECK(r.adj_r2 == doctest::Approx(1 - (1 - r2) * 29.0 / 27.0));
    }
}

TEST_CASE("constant-only regression returns the mean") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(6, 1);
    Eigen::VectorXd y(6);
    y << 1, 4, 2, 8, 5, 7;
    auto r = fit_ols(X, y);
    CHECK(r.coefficients[0] == doctest::Approx(27.0 / 6.0));
    CHECK(std::abs(r.adj_r2) <= 1e-12);
}

TEST_CASE("row permutation leaves everything unchanged") {
    std::mt19937_64 rng(8);
    auto in = random_instance(rng, 25, 3);
    auto base = fit_ols(in.X, in.y);
    std::vector<int> order(25);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd X(25, 3);
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) {
        X.row(i) = in.X.row(order[static_cast<std::size_t>(i)]);
        y(i) = in.y(order[static_cast<std::size_t>(i)]);
    }
    auto r = fit_ols(X, y);
    for (int j = 0; j < 3; ++j) {
        CHECK(r.coefficients[j] == doctest::Approx(base.coefficients[j]).epsilon(1e-12));
        CHECK(r.robust_se[j] == doctest::Approx(base.robust_se[j]).epsilon(1e-12));
    }
    CHECK(r.adj_r2 == doctest::Approx(base.adj_r2).epsilon(1e-12));
}

TEST_CASE("rescaling a regressor rescales its coefficient and SE") {
    std::mt19937_64 rng(9);
    auto in = random_instance(rng, 40, 2);
    auto base = fit_ols(in.X, in.y);
    Eigen::MatrixXd X = in.X;
    X.col(1) *= 250.0;
    auto r = fit_ols(X, in.y);
    CHECK(r.coefficients[1] == doctest::Approx(base.coefficients[1] / 250.0).epsilon(1e-10));
    CHECK(r.robust_se[1] == doctest::Approx(base.robust_se[1] / 250.0).epsilon(1e-10));
    CHECK(r.t_stats[1] == doctest::Approx(base.t_stats[1]).epsilon(1e-10));
    CHECK(r.p_values[1] == doctest::Approx(base.p_values[1]).epsilon(1e-8));
    CHECK(r.stars == base.stars);
    CHECK(r.adj_r2 == doctest::Approx(base.adj_r2).epsilon(1e-12));
}

TEST_CASE("HC1 approaches the classical SE under homoskedasticity") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> z;
    const int n = 10000;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1;
        X(i, 1) = z(rng);
        y(i) = 0.3 + 0.8 * X(i, 1) + z(rng);
    }
    auto r = fit_ols(X, y);
    double s2 = r.residuals.squaredNorm() / (n - 2);
    Eigen::MatrixXd classical = s2 * (X.transpose() * X).inverse();
    for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(r.robust_se[j] / std::sqrt(classical(j, j)) - 1) < 0.05);
    }
}

TEST_CASE("p-values and stars") {
    CHECK(t_test_p_value(2.228138851986274, 10) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(t_test_p_value(-2.228138851986274, 10) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(t_test_p_value(0.0, 5) == doctest::Approx(1.0));
    CHECK(t_test_p_value(INFINITY, 5) == 0.0);
    CHECK(std::isnan(t_test_p_value(NAN, 5)));
    CHECK(stars_for(0.009) == Stars::one);
    CHECK(stars_for(0.01) == Stars::five);
    CHECK(stars_for(0.049) == Stars::five);
    CHECK(stars_for(0.05) == Stars::ten);
    CHECK(stars_for(0.0999) == Stars::ten);
    CHECK(stars_for(0.10) == Stars::none);
    CHECK(stars_for(NAN) == Stars::none);
    CHECK(std::string(to_string(Stars::one)) == "***");
    CHECK(parse_hc_type("hc3") == HcType::hc3);
}

TEST_CASE("error paths") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 1, 1, 2;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK(code_of([&] { (void)fit_ols(X, y); }) == ErrorCode::too_few);

    Eigen::MatrixXd collinear(5, 3);
    Eigen::VectorXd y5(5);
    for (int i = 0; i < 5; ++i) {
        collinear(i, 0) = 1;
        collinear(i, 1) = i;
        collinear(i, 2) = 2 * i + 1;
        y5(i) = i * i;
    }
    CHECK(code_of([&] { (void)fit_ols(collinear, y5); }) == ErrorCode::rank_deficient);
    y5(2) = NAN;
    CHECK(code_of([&] { (void)fit_ols(collinear.leftCols(2), y5); }) == ErrorCode::non_finite);
    std::vector<double> a{1, 2, 3}, b{1, 2};
    CHECK(code_of([&] { (void)fit_bivariate(a, b); }) == ErrorCode::invalid_spec);
}

TEST_CASE("least squares tolerates collinear columns") {
    Eigen::MatrixXd X(6, 3);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = 1;
        X(i, 1) = i;
        X(i, 2) = i + 1;
        y(i) = 3 + 2 * i;
    }
    auto fit = least_squares(X, y);
    CHECK(fit.rank == 2);
    CHECK((X * fit.coefficients - y).cwiseAbs().maxCoeff() <= 1e-10);
}

}
