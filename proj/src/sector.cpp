#include "cyclekit/sector.hpp"

#include <algorithm>

#include "cyclekit/error.hpp"

namespace cyclekit {

SectorCycles sector_cycles(const Panel& gva, const FilterConfig& cfg) {
    FilterConfig hamilton = cfg;
    hamilton.kind = FilterKind::hamilton;
    hamilton.validate();

    SectorCycles out;
    for (const auto* series : gva.of_kind(VariableKind::gva)) {
        try {
            auto log_y = series->transform() == Transform::log ? *series : to_log(*series);
            out.cycles.emplace(SeriesKey{series->country(), series->variable()}, hamilton_cycle(log_y, hamilton));
        } catch (const Error& err) {
            if (err.code() != ErrorCode::insufficient_data) throw;
            out.warnings.push_back("skipping " + series->country() + "/" + series->variable().to_string() + ": " +
                                   err.what());
        }
    }
    return out;
}

SectorEpisodes build_sector_episodes(const std::vector<CycleChronology>& chronologies,
                                     const std::map<SeriesKey, FilterOutput>& cycles) {
    std::map<std::string, const CycleChronology*> by_country;
    for (const auto& c : chronologies) by_country[c.country] = &c;

    SectorEpisodes out;
    for (const auto& [key, cycle] : cycles) {
        auto it = by_country.find(key.country);
        if (it == by_country.end()) {
            out.warnings.push_back("no chronology for " + key.country + "; " + key.variable.to_string() + " skipped");
            continue;
        }
        const auto& points = it->second->points;
        int dropped = 0;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            if (points[i].kind != TurningKind::peak || points[i + 1].kind != TurningKind::trough) continue;
            auto r = cycle.at(points[i + 1].quarter);
            if (!r) {
                ++dropped;
                continue;
            }
            SectorEpisode e;
            e.country = key.country;
            e.industry = key.variable.industry;
            e.peak = points[i].quarter;
            e.trough = points[i + 1].quarter;
            e.r = *r;
            if (i + 2 < points.size()) {
                e.next_peak = points[i + 2].quarter;
                e.e = cycle.at(*e.next_peak);
            }
            out.episodes.push_back(std::move(e));
        }
        if (dropped > 0) {
            out.warnings.push_back(key.country + "/" + key.variable.to_string() + ": " + std::to_string(dropped) +
                                   " recession(s) before the cycle is defined");
        }
    }
    return out;
}

SectorRegressions sector_regressions(const std::vector<SectorEpisode>& episodes, bool by_industry, HcType hc) {
    // reported industry -> (country, industry) -> episodes by peak
    std::map<std::string, std::map<std::pair<std::string, std::string>, std::vector<const SectorEpisode*>>> grouped;
    for (const auto& e : episodes) grouped[by_industry ? e.industry : "all"][{e.country, e.industry}].push_back(&e);

    SectorRegressions out;
    for (auto& [industry, countries] : grouped) {
        std::vector<double> rec_x, rec_y, bust_x, bust_y;
        for (auto& [series, list] : countries) {
            std::ranges::sort(list, {}, &SectorEpisode::peak);
            for (std::size_t i = 0; i < list.size(); ++i) {
                const auto& cur = *list[i];
                if (!cur.e) continue;
                rec_x.push_back(cur.r);
                rec_y.push_back(*cur.e);
                if (i + 1 < list.size() && list[i + 1]->peak == cur.next_peak) {
                    bust_x.push_back(*cur.e);
                    bust_y.push_back(list[i + 1]->r);
                }
            }
        }
        if (rec_x.size() < 3 || bust_x.size() < 3) {
            out.warnings.push_back("industry " + industry + " skipped: " + std::to_string(rec_x.size()) +
                                   " recovery and " + std::to_string(bust_x.size()) +
                                   " bust observations, need at least 3 of each");
            continue;
        }
        SectorRegressionPair pair;
        pair.industry = industry;
        pair.recovery = fit_bivariate(rec_x, rec_y, hc);
        pair.bust = fit_bivariate(bust_x, bust_y, hc);
        pair.beta_recovery = pair.recovery.coefficients[1];
        pair.beta_bust = pair.bust.coefficients[1];
        pair.se_recovery = pair.recovery.robust_se[1];
        pair.se_bust = pair.bust.robust_se[1];
        pair.n_recovery = static_cast<int>(rec_x.size());
        pair.n_bust = static_cast<int>(bust_x.size());
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

}  // namespace cyclekit
