#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cyclekit/dating.hpp"
#include "cyclekit/filters.hpp"
#include "cyclekit/ols.hpp"
#include "cyclekit/series.hpp"

namespace cyclekit {

/// Cyclical GVA of one industry around one aggregate recession, in per cent.
struct SectorEpisode {
    std::string country;
    std::string industry;
    Quarter peak;
    Quarter trough;
    std::optional<Quarter> next_peak;
    double r = 0.0;            // at the trough
    std::optional<double> e;   // at the following expansion peak
};

struct SectorRegressionPair {
    std::string industry;  // "all" when pooled over industries
    double beta_recovery = 0.0;  // e on r
    double beta_bust = 0.0;      // next r on e
    double se_recovery = 0.0;
    double se_bust = 0.0;
    int n_recovery = 0;
    int n_bust = 0;
    RegressionResult recovery;
    RegressionResult bust;
};

struct SectorCycles {
    std::map<SeriesKey, FilterOutput> cycles;
    std::vector<std::string> warnings;
};

/// Hamilton cycle at the single horizon cfg.horizon for every gva_ series in the panel.
/// Series too short for the window are skipped with a warning.
SectorCycles sector_cycles(const Panel& gva, const FilterConfig& cfg);

struct SectorEpisodes {
    std::vector<SectorEpisode> episodes;
    std::vector<std::string> warnings;
};

/// Episodes dated by each country's aggregate GDP chronology.
SectorEpisodes build_sector_episodes(const std::vector<CycleChronology>& chronologies,
                                     const std::map<SeriesKey, FilterOutput>& cycles);

struct SectorRegressions {
    std::vector<SectorRegressionPair> pairs;
    std::vector<std::string> warnings;
};

/// Pools countries within each industry (or everything when by_industry is false).
/// Industries with fewer than three observations in either direction are skipped with a warning.
SectorRegressions sector_regressions(const std::vector<SectorEpisode>& episodes, bool by_industry,
                                     HcType hc = HcType::hc1);

}  // namespace cyclekit
