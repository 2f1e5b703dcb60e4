#include <doctest.h>

#include <cmath>
#include <random>

#include "cyclekit/dating.hpp"
#include "cyclekit/error.hpp"
#include "cyclekit/synthgen.hpp"

using namespace cyclekit;

namespace {

const Quarter kStart(1970, 1);

QuarterlySeries series_of(std::vector<double> v) {
    return QuarterlySeries("XX", Variable::gdp(), kStart, std::move(v), Transform::log);
}

TurningPoint peak(int i, double v) { return {TurningKind::peak, kStart + i, v}; }
TurningPoint trough(int i, double v) { return {TurningKind::trough, kStart + i, v}; }

// Direct scan of the local-extremum rule: strict against the past, weak against the future.
std::vector<TurningPoint> scan(const std::vector<double>& y, int w) {
    std::vector<TurningPoint> out;
    const int n = static_cast<int>(y.size());
    for (int t = w; t + w < n; ++t) {
        bool is_peak = true, is_trough = true;
        for (int k = 1; k <= w; ++k) {
            is_peak = is_peak && y[t] > y[t - k] && y[t] >= y[t + k];
            is_trough = is_trough && y[t] < y[t - k] && y[t] <= y[t + k];
        }
        if (is_peak) out.push_back(peak(t, y[t]));
        if (is_trough) out.push_back(trough(t, y[t]));
    }
    return out;
}

double total_amplitude(const std::vector<TurningPoint>& pts) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += std::abs(pts[i].value - pts[i + 1].value);
    return s;
}

// Best rule-satisfying subset by total amplitude, by enumeration.
std::vector<TurningPoint> exhaustive(const std::vector<TurningPoint>& cands, const PhaseSpec& spec) {
    std::vector<TurningPoint> best;
    double best_amp = -1;
    const auto n = cands.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<TurningPoint> pick;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) pick.push_back(cands[i]);
        }
        CycleChronology c{"XX", pick, {}, {}};
        if (!check_chronology(c, spec).empty()) continue;
        double amp = total_amplitude(pick);
        if (amp > best_amp + 1e-12) {
            best_amp = amp;
            best = pick;
        }
    }
    return best;
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

TEST_SUITE("dating") {

TEST_CASE("phase spec validation") {
    CHECK_NOTHROW(PhaseSpec{}.validate());
    CHECK(code_of([] { PhaseSpec{0, 2, 5}.validate(); }) == ErrorCode::invalid_spec);
    CHECK(code_of([] { PhaseSpec{2, 0, 5}.validate(); }) == ErrorCode::invalid_spec);
    CHECK(code_of([] { PhaseSpec{2, 3, 5}.validate(); }) == ErrorCode::invalid_spec);
}

TEST_CASE("find_candidates examples") {
    PhaseSpec spec;
    CHECK(find_candidates(series_of({0, 1, 2, 3, 4, 5}), spec).empty());

    auto c = find_candidates(series_of({100, 101, 102, 100, 98, 99, 101, 103}), spec);
    REQUIRE(c.size() == 2);
    CHECK(c[0].kind == TurningKind::peak);
    CHECK(c[0].quarter == kStart + 2);
    CHECK(c[0].value == 102);
    CHECK(c[1].kind == TurningKind::trough);
    CHECK(c[1].quarter == kStart + 4);

    CHECK(find_candidates(series_of({1, 2, 1, 2, 1}), spec).empty());
    CHECK(code_of([&] { (void)find_candidates(series_of({1, 2, 3, 4}), spec); }) == ErrorCode::insufficient_data);
}

TEST_CASE("flat top resolves to its earliest quarter") {
    auto c = find_candidates(series_of({0, 1, 2, 3, 3, 3, 2, 1, 0}), PhaseSpec{});
    REQUIRE(c.size() == 1);
    CHECK(c[0].quarter == kStart + 3);
}

TEST_CASE("find_candidates matches a brute-force scan") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> rounding(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        int w = 1 + trial % 3;
        std::vector<double> y(30);
        bool coarse = rounding(rng) == 1;  // coarse values produce ties
        for (auto& v : y) v = coarse ? std::round(2 * z(rng)) : z(rng);
        auto got = find_candidates(series_of(y), PhaseSpec{w, 1, 2});
        REQUIRE(got == scan(y, w));
    }
}

TEST_CASE("enforce_rules keeps the higher of two peaks") {
    auto c = enforce_rules({peak(0, 5), peak(3, 7)}, PhaseSpec{});
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0].value == 7);

    auto tie = enforce_rules({trough(0, 1), trough(4, 1)}, PhaseSpec{});
    REQUIRE(tie.points.size() == 1);
    CHECK(tie.points[0].quarter == kStart);
    CHECK(enforce_rules({}, PhaseSpec{}).points.empty());
}

TEST_CASE("enforce_rules leaves a valid chronology unchanged") {
    std::vector<TurningPoint> pts{peak(2, 10), trough(5, 6), peak(12, 11), trough(15, 8), peak(30, 13)};
    CHECK(enforce_rules(pts, PhaseSpec{}).points == pts);
}

TEST_CASE("planted short phase is dropped as in the exhaustive search") {
    std::vector<TurningPoint> cands{peak(0, 10),  trough(4, 5),    peak(8, 10),
                                    trough(9, 9.9), peak(12, 10.1), trough(16, 5)};
    PhaseSpec spec;
    auto got = enforce_rules(cands, spec, "XX");
    auto want = exhaustive(cands, spec);
    CHECK(got.points == want);
    REQUIRE(got.points.size() == 4);
    CHECK(got.points[2].quarter == kStart + 12);
    CHECK(got.country == "XX");
}

TEST_CASE("enforce_rules agrees with exhaustive search on small planted cases") {
    PhaseSpec spec;
    std::vector<std::vector<TurningPoint>> interior{
        {trough(0, 5), peak(4, 10), trough(5, 9.8), peak(6, 10.2), trough(12, 4)},
        {peak(0, 10), trough(5, 4), peak(7, 9), trough(8, 8.9), peak(15, 12), trough(19, 7)},
        {peak(0, 10), trough(3, 5), peak(6, 8), trough(9, 3)},
    };
    for (const auto& c : interior) {
        auto got = enforce_rules(c, spec);
        CHECK(check_chronology(got, spec).empty());
        CHECK(got.points == exhaustive(c, spec));
    }
    // Only pairs are dropped, so a violation at the first point can cost more than the optimum,
    // which here drops the lone opening peak.
    std::vector<TurningPoint> edge{peak(0, 10), trough(1, 9.5), peak(6, 10.5), trough(10, 6)};
    auto got = enforce_rules(edge, spec);
    CHECK(check_chronology(got, spec).empty());
    CHECK(got.points == std::vector<TurningPoint>{peak(6, 10.5), trough(10, 6)});
    CHECK(total_amplitude(got.points) < total_amplitude(exhaustive(edge, spec)));
}

TEST_CASE("dated chronologies always satisfy the rules") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<double> y(80);
        double level = 0, ar = 0;
        for (auto& v : y) {
            ar = 0.6 * ar + z(rng);
            level += 0.1 * z(rng);
            v = level + ar;
        }
        PhaseSpec spec{1 + trial % 3, 1 + trial % 2, 2 * (1 + trial % 2) + trial % 4};
        auto c = date_cycles(series_of(y), spec);
        INFO("trial " << trial);
        REQUIRE(check_chronology(c, spec).empty());
        for (const auto& p : c.points) CHECK(p.value == y[static_cast<std::size_t>(quarter_diff(p.quarter, kStart))]);
    }
}

TEST_CASE("translation invariance and negation duality") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> y(60), shifted(60), negated(60);
        double ar = 0;
        for (std::size_t t = 0; t < y.size(); ++t) {
            ar = 0.7 * ar + z(rng);
            y[t] = 0.005 * static_cast<double>(t) + 0.01 * ar;
            shifted[t] = y[t] + 4.6;
            negated[t] = -y[t];
        }
        auto base = date_cycles(series_of(y));
        auto moved = date_cycles(series_of(shifted));
        REQUIRE(base.points.size() == moved.points.size());
        for (std::size_t i = 0; i < base.points.size(); ++i) {
            CHECK(base.points[i].quarter == moved.points[i].quarter);
            CHECK(base.points[i].kind == moved.points[i].kind);
        }
        auto flipped = date_cycles(series_of(negated));
        REQUIRE(base.points.size() == flipped.points.size());
        for (std::size_t i = 0; i < base.points.size(); ++i) {
            CHECK(base.points[i].quarter == flipped.points[i].quarter);
            CHECK(base.points[i].kind != flipped.points[i].kind);
        }
    }
}

TEST_CASE("time reversal mirrors the candidates") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> y(40);
        for (auto& v : y) v = z(rng);
        std::vector<double> r(y.rbegin(), y.rend());
        auto fwd = find_candidates(series_of(y), PhaseSpec{});
        auto bwd = find_candidates(series_of(r), PhaseSpec{});
        REQUIRE(fwd.size() == bwd.size());
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            const auto& b = bwd[bwd.size() - 1 - i];
            CHECK(quarter_diff(fwd[i].quarter, kStart) == 39 - quarter_diff(b.quarter, kStart));
            CHECK(fwd[i].kind == b.kind);
        }
    }
}

TEST_CASE("date_cycles on generated series") {
    DgpSpec spec;
    spec.kind = DgpKind::plucking;
    spec.trend_growth = 0.5;
    spec.recessions = {{Quarter(1980, 1), 3, 2.0, 1.0}};
    auto s = generate(spec, 60);
    auto c = date_cycles(s.log_levels());
    REQUIRE(c.points.size() == 2);
    CHECK(c.points[0].kind == TurningKind::peak);
    CHECK(c.points[0].quarter == Quarter(1980, 1));
    CHECK(c.points[1].quarter == Quarter(1980, 4));
    CHECK(c.points == s.truth.points);

    // monotone
    spec.recessions.clear();
    spec.kind = DgpKind::trend_only;
    CHECK(date_cycles(generate(spec, 60).log_levels()).points.empty());

    // a one-quarter dip is censored by min_phase
    spec.kind = DgpKind::plucking;
    spec.recessions = {{Quarter(1980, 1), 1, 2.0, 1.0}};
    CHECK(date_cycles(generate(spec, 60).log_levels()).points.empty());
}

TEST_CASE("phase_table") {
    CycleChronology au{"AU",
                       {{TurningKind::peak, parse_quarter("1981Q3"), 1},
                        {TurningKind::trough, parse_quarter("1983Q2"), 0},
                        {TurningKind::peak, parse_quarter("1990Q2"), 2},
                        {TurningKind::trough, parse_quarter("1991Q2"), 1},
                        {TurningKind::peak, parse_quarter("2019Q4"), 3}},
                       parse_quarter("1977Q4"),
                       parse_quarter("2021Q4")};
    auto rows = phase_table(au);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].recession_duration == 7);
    CHECK(rows[0].expansion_censored);
    CHECK(rows[0].preceding_expansion_duration == 15);
    CHECK(rows[1].recession_duration == 4);
    CHECK_FALSE(rows[1].expansion_censored);
    CHECK(rows[1].preceding_expansion_duration == 28);

    CycleChronology ca{"CA",
                       {{TurningKind::peak, parse_quarter("2008Q3"), 1}, {TurningKind::trough, parse_quarter("2009Q2"), 0}},
                       {},
                       {}};
    auto ca_rows = phase_table(ca);
    REQUIRE(ca_rows.size() == 1);
    CHECK(ca_rows[0].recession_duration == 3);
    CHECK(ca_rows[0].expansion_censored);
    CHECK_FALSE(ca_rows[0].preceding_expansion_duration.has_value());
}

TEST_CASE("determinism") {
    std::vector<double> y;
    for (int t = 0; t < 50; ++t) y.push_back(std::sin(t / 3.0) + 0.01 * t);
    CHECK(date_cycles(series_of(y)) == date_cycles(series_of(y)));
}

}
