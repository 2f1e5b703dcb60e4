#include "cyclekit/dating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyclekit/error.hpp"

namespace cyclekit {

void PhaseSpec::validate() const {
    if (window < 1) throw Error(ErrorCode::invalid_spec, "window must be >= 1, got " + std::to_string(window));
    if (min_phase < 1) {
        throw Error(ErrorCode::invalid_spec, "min_phase must be >= 1, got " + std::to_string(min_phase));
    }
    if (min_cycle < 2 * min_phase) {
        throw Error(ErrorCode::invalid_spec, "min_cycle (" + std::to_string(min_cycle) +
                                                 ") must be at least twice min_phase (" +
                                                 std::to_string(min_phase) + ")");
    }
}

const char* to_string(TurningKind kind) noexcept { return kind == TurningKind::peak ? "peak" : "trough"; }

TurningKind parse_turning_kind(const std::string& text) {
    if (text == "peak") return TurningKind::peak;
    if (text == "trough") return TurningKind::trough;
    throw Error(ErrorCode::malformed, "turning point kind must be 'peak' or 'trough', got '" + text + "'");
}

std::vector<Quarter> CycleChronology::peaks() const {
    std::vector<Quarter> out;
    for (const auto& p : points) {
        if (p.kind == TurningKind::peak) out.push_back(p.quarter);
    }
    return out;
}

std::vector<Quarter> CycleChronology::troughs() const {
    std::vector<Quarter> out;
    for (const auto& p : points) {
        if (p.kind == TurningKind::trough) out.push_back(p.quarter);
    }
    return out;
}

namespace {

// Unknown (NaN) values, as in chronologies read from CSV, are not flagged.
bool above(const TurningPoint& peak, const TurningPoint& trough) { return !(peak.value <= trough.value); }

/// Height difference between two adjacent turning points, signed so that a valid phase is positive.
double swing(const TurningPoint& a, const TurningPoint& b) {
    return a.kind == TurningKind::peak ? a.value - b.value : b.value - a.value;
}

}  // namespace

std::vector<std::string> check_chronology(const CycleChronology& chronology, const PhaseSpec& spec) {
    std::vector<std::string> problems;
    const auto& pts = chronology.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[i + 1];
        auto where = a.quarter.to_string() + "/" + b.quarter.to_string();
        if (a.kind == b.kind) problems.push_back("non-alternating points at " + where);
        if (b.quarter <= a.quarter) problems.push_back("quarters not increasing at " + where);
        if (quarter_diff(b.quarter, a.quarter) < spec.min_phase) problems.push_back("phase shorter than min_phase at " + where);
        if (a.kind != b.kind) {
            const auto& peak = a.kind == TurningKind::peak ? a : b;
            const auto& trough = a.kind == TurningKind::peak ? b : a;
            if (!above(peak, trough)) problems.push_back("peak not above adjacent trough at " + where);
        }
    }
    for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
        if (quarter_diff(pts[i + 2].quarter, pts[i].quarter) < spec.min_cycle) {
            problems.push_back("cycle shorter than min_cycle at " + pts[i].quarter.to_string() + "/" +
                               pts[i + 2].quarter.to_string());
        }
    }
    return problems;
}

std::vector<TurningPoint> find_candidates(const QuarterlySeries& series, const PhaseSpec& spec) {
    spec.validate();
    const auto n = series.size();
    const auto w = static_cast<std::size_t>(spec.window);
    if (n < 2 * w + 1) {
        throw Error(ErrorCode::insufficient_data, "series " + series.country() + " has " + std::to_string(n) +
                                                      " observations; dating needs at least " +
                                                      std::to_string(2 * w + 1));
    }
    auto y = series.values();
    std::vector<TurningPoint> out;
    for (std::size_t t = w; t + w < n; ++t) {
        // Strict against the past, weak against the future: a flat top resolves to its
        // earliest quarter.
        bool peak = true;
        bool trough = true;
        for (std::size_t k = 1; k <= w; ++k) {
            peak = peak && y[t] > y[t - k] && y[t] >= y[t + k];
            trough = trough && y[t] < y[t - k] && y[t] <= y[t + k];
        }
        if (peak) out.push_back({TurningKind::peak, series.quarter_at(t), y[t]});
        if (trough) out.push_back({TurningKind::trough, series.quarter_at(t), y[t]});
    }
    return out;
}

namespace {

void enforce_alternation(std::vector<TurningPoint>& pts) {
    std::vector<TurningPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (!out.empty() && out.back().kind == p.kind) {
            bool better = p.kind == TurningKind::peak ? p.value > out.back().value : p.value < out.back().value;
            if (better) out.back() = p;  // ties keep the earlier point
            continue;
        }
        out.push_back(p);
    }
    pts = std::move(out);
}

/// Total amplitude lost by removing the adjacent pair (j, j+1).
double removal_loss(const std::vector<TurningPoint>& pts, std::size_t j) {
    double removed = std::abs(pts[j].value - pts[j + 1].value);
    bool has_left = j > 0;
    bool has_right = j + 2 < pts.size();
    if (has_left) removed += std::abs(pts[j - 1].value - pts[j].value);
    if (has_right) removed += std::abs(pts[j + 1].value - pts[j + 2].value);
    double added = (has_left && has_right) ? std::abs(pts[j - 1].value - pts[j + 2].value) : 0.0;
    return removed - added;
}

}  // namespace

CycleChronology enforce_rules(std::vector<TurningPoint> candidates, const PhaseSpec& spec, std::string country) {
    spec.validate();
    std::ranges::stable_sort(candidates, {}, &TurningPoint::quarter);
    enforce_alternation(candidates);

    auto& pts = candidates;
    for (;;) {
        // Pairs whose removal would resolve some violation; pick the cheapest.
        std::vector<std::size_t> options;
        auto offer = [&](std::ptrdiff_t j) {
            if (j >= 0 && static_cast<std::size_t>(j) + 1 < pts.size()) options.push_back(static_cast<std::size_t>(j));
        };
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            bool short_phase = quarter_diff(pts[i + 1].quarter, pts[i].quarter) < spec.min_phase;
            bool inverted = swing(pts[i], pts[i + 1]) <= 0.0;
            if (short_phase || inverted) {
                auto j = static_cast<std::ptrdiff_t>(i);
                offer(j - 1);
                offer(j);
                offer(j + 1);
            }
        }
        for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
            if (quarter_diff(pts[i + 2].quarter, pts[i].quarter) < spec.min_cycle) {
                offer(static_cast<std::ptrdiff_t>(i));
                offer(static_cast<std::ptrdiff_t>(i) + 1);
            }
        }
        if (options.empty()) break;

        std::size_t best = options.front();
        double best_loss = std::numeric_limits<double>::infinity();
        for (auto j : options) {
            double loss = removal_loss(pts, j);
            if (loss < best_loss || (loss == best_loss && j < best)) {
                best_loss = loss;
                best = j;
            }
        }
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(best), pts.begin() + static_cast<std::ptrdiff_t>(best) + 2);
    }

    CycleChronology out;
    out.country = std::move(country);
    out.points = std::move(pts);
    return out;
}

CycleChronology date_cycles(const QuarterlySeries& series, const PhaseSpec& spec) {
    auto chronology = enforce_rules(find_candidates(series, spec), spec, series.country());
    chronology.sample_start = series.start();
    chronology.sample_end = series.end();
    return chronology;
}

std::vector<PhaseRow> phase_table(const CycleChronology& chronology) {
    std::vector<PhaseRow> rows;
    const auto& pts = chronology.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i].kind != TurningKind::peak || pts[i + 1].kind != TurningKind::trough) continue;
        PhaseRow row;
        row.peak = pts[i].quarter;
        row.trough = pts[i + 1].quarter;
        row.recession_duration = static_cast<int>(quarter_diff(row.trough, row.peak));
        if (i > 0 && pts[i - 1].kind == TurningKind::trough) {
            row.preceding_expansion_duration = static_cast<int>(quarter_diff(row.peak, pts[i - 1].quarter));
        } else {
            row.expansion_censored = true;
            if (chronology.sample_start) {
                row.preceding_expansion_duration = static_cast<int>(quarter_diff(row.peak, *chronology.sample_start));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cyclekit
