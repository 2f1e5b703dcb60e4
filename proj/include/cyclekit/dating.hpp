#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclekit/quarter.hpp"
#include "cyclekit/series.hpp"

namespace cyclekit {

/// Censoring rules of the quarterly turning-point algorithm.
struct PhaseSpec {
    int window = 2;     // local-extremum comparison radius, quarters
    int min_phase = 2;  // minimum expansion or recession length
    int min_cycle = 5;  // minimum peak-to-peak / trough-to-trough length

    /// Throws Error{invalid_spec} unless window >= 1, min_phase >= 1, min_cycle >= 2*min_phase.
    void validate() const;
};

enum class TurningKind { peak, trough };

const char* to_string(TurningKind kind) noexcept;
TurningKind parse_turning_kind(const std::string& text);

struct TurningPoint {
    TurningKind kind = TurningKind::peak;
    Quarter quarter;
    double value = 0.0;  // log level at the turning point

    friend bool operator==(const TurningPoint&, const TurningPoint&) = default;
};

struct CycleChronology {
    std::string country;
    std::vector<TurningPoint> points;
    // Sample bounds of the dated series, used to measure censored phases.
    std::optional<Quarter> sample_start;
    std::optional<Quarter> sample_end;

    [[nodiscard]] std::vector<Quarter> peaks() const;
    [[nodiscard]] std::vector<Quarter> troughs() const;

    friend bool operator==(const CycleChronology&, const CycleChronology&) = default;
};

/// Lists every rule a chronology breaks; empty when it is valid under `spec`.
std::vector<std::string> check_chronology(const CycleChronology& chronology, const PhaseSpec& spec);

/// Local maxima and minima of a log series. Points within `spec.window` quarters of
/// either end are censored.
std::vector<TurningPoint> find_candidates(const QuarterlySeries& series, const PhaseSpec& spec);

/// Alternation, then minimum-phase and minimum-cycle censoring.
CycleChronology enforce_rules(std::vector<TurningPoint> candidates, const PhaseSpec& spec,
                              std::string country = {});

/// find_candidates followed by enforce_rules; `series` must hold log GDP.
CycleChronology date_cycles(const QuarterlySeries& series, const PhaseSpec& spec = {});

struct PhaseRow {
    Quarter peak;
    Quarter trough;
    int recession_duration = 0;
    /// Quarters from the previous trough (or the sample start) to the peak.
    std::optional<int> preceding_expansion_duration;
    bool expansion_censored = false;
};

std::vector<PhaseRow> phase_table(const CycleChronology& chronology);

}  // namespace cyclekit
