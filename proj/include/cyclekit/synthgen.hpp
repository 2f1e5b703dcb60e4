#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "cyclekit/dating.hpp"
#include "cyclekit/filters.hpp"
#include "cyclekit/series.hpp"

namespace cyclekit {

enum class DgpKind { trend_only, ar_cycle, plucking, boom_bust, permanent_drop };

const char* to_string(DgpKind kind) noexcept;
DgpKind parse_dgp_kind(const std::string& text);

struct PlantedRecession {
    Quarter peak;
    int duration = 2;                // quarters from peak to trough
    double amplitude = 2.0;          // per cent
    double recovery_fraction = 1.0;  // share of the drop reversed over the following expansion
};

/// Data-generating process. The cyclical path is piecewise linear between planted turning
/// points; noise is white on log differences.
///
///  - plucking: the gap falls by `amplitude` from its peak level and regains
///    `recovery_fraction` of that over the following expansion. With `overshoot`, troughs sit
///    `amplitude` below trend and the next peak `recovery_fraction * amplitude` above it.
///  - permanent_drop: plucking with no recovery.
///  - boom_bust: peak at +amplitude/2, trough at -amplitude/2, each boom independent.
///  - ar_cycle: AR(1) gap, nothing planted.
struct DgpSpec {
    DgpKind kind = DgpKind::trend_only;
    double trend_growth = 0.5;  // per cent per quarter
    double noise_sigma = 0.0;   // per cent per quarter
    std::vector<PlantedRecession> recessions;
    std::uint64_t seed = 0;

    std::string country = "XX";
    Variable variable = Variable::gdp();
    Quarter start{1970, 1};
    double initial_level = 100.0;
    bool overshoot = false;
    double ar_coefficient = 0.8;
    double ar_sigma = 0.5;

    void validate(int length) const;
};

struct SyntheticSeries {
    QuarterlySeries levels;
    CycleChronology truth;
    /// Deviation from the no-recession path, per cent.
    std::vector<double> cycle;
    /// Unrecovered losses, per cent; cycle minus this is the transitory part.
    std::vector<double> permanent;

    [[nodiscard]] QuarterlySeries log_levels() const { return to_log(levels); }
    /// The planted cycle packaged like a filter output.
    [[nodiscard]] FilterOutput truth_cycle() const;
};

SyntheticSeries generate(const DgpSpec& spec, int length);

/// Series-level settings plus one row per planted recession:
/// `country,variable,kind,length,start,trend_growth,noise_sigma,peak,duration,amplitude,recovery_fraction`
/// (recession fields empty for series without recessions; optional `overshoot` column).
struct SimulationPlan {
    std::vector<DgpSpec> specs;
    std::vector<int> lengths;
};
SimulationPlan read_simulation_plan(std::istream& in, const std::string& source = "<stream>");

/// Per-series seed derived from a run seed and the series key.
std::uint64_t derive_seed(std::uint64_t run_seed, const std::string& country, const Variable& variable);

}  // namespace cyclekit
