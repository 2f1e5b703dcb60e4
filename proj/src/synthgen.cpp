#include "cyclekit/synthgen.hpp"

#include <cmath>
#include <map>
#include <random>

#include "cyclekit/csv.hpp"
#include "cyclekit/error.hpp"

namespace cyclekit {

const char* to_string(DgpKind kind) noexcept {
    switch (kind) {
        case DgpKind::trend_only: return "trend_only";
        case DgpKind::ar_cycle: return "ar_cycle";
        case DgpKind::plucking: return "plucking";
        case DgpKind::boom_bust: return "boom_bust";
        case DgpKind::permanent_drop: return "permanent_drop";
    }
    return "?";
}

DgpKind parse_dgp_kind(const std::string& text) {
    for (auto kind : {DgpKind::trend_only, DgpKind::ar_cycle, DgpKind::plucking, DgpKind::boom_bust,
                      DgpKind::permanent_drop}) {
        if (text == to_string(kind)) return kind;
    }
    throw Error(ErrorCode::invalid_spec, "unknown DGP kind '" + text + "'");
}

void DgpSpec::validate(int length) const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::invalid_spec, what); };
    if (length < 40) bad("synthetic series need at least 40 quarters, got " + std::to_string(length));
    if (!(noise_sigma >= 0.0)) bad("noise_sigma must be non-negative");
    if (!(initial_level > 0.0)) bad("initial_level must be positive");
    if (!std::isfinite(trend_growth)) bad("trend_growth must be finite");
    bool planted = kind == DgpKind::plucking || kind == DgpKind::boom_bust || kind == DgpKind::permanent_drop;
    if (!planted && !recessions.empty()) bad(std::string(to_string(kind)) + " takes no planted recessions");
    if (kind == DgpKind::ar_cycle && !(std::abs(ar_coefficient) < 1.0 && ar_sigma >= 0.0)) {
        bad("ar_cycle needs |ar_coefficient| < 1 and ar_sigma >= 0");
    }
    Quarter last = start + (length - 1);
    std::optional<Quarter> previous_trough;
    for (const auto& r : recessions) {
        auto where = " (recession at " + r.peak.to_string() + ")";
        if (!(r.amplitude > 0.0)) bad("amplitude must be positive" + where);
        if (r.duration < 1) bad("duration must be >= 1" + where);
        if (!(r.recovery_fraction >= 0.0 && r.recovery_fraction <= 1.0)) bad("recovery_fraction must be in [0,1]" + where);
        if (r.peak <= start || r.peak + r.duration >= last) bad("recession must lie strictly inside the sample" + where);
        if (previous_trough && r.peak <= *previous_trough) bad("recessions must be ordered and non-overlapping" + where);
        previous_trough = r.peak + r.duration;
    }
}

FilterOutput SyntheticSeries::truth_cycle() const {
    QuarterlySeries series(levels.country(), levels.variable(), levels.start(), cycle);
    return FilterOutput{std::move(series), levels.start()};
}

namespace {

struct Knot {
    std::int64_t index;
    double gap;
};

std::vector<double> interpolate(const std::vector<Knot>& knots, int length) {
    std::vector<double> out(static_cast<std::size_t>(length), 0.0);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const auto& a = knots[k];
        const auto& b = knots[k + 1];
        for (auto t = a.index; t <= b.index; ++t) {
            double w = b.index == a.index ? 1.0 : static_cast<double>(t - a.index) / static_cast<double>(b.index - a.index);
            out[static_cast<std::size_t>(t)] = a.gap + w * (b.gap - a.gap);
        }
    }
    return out;
}

}  // namespace

SyntheticSeries generate(const DgpSpec& spec, int length) {
    spec.validate(length);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<std::size_t>(length);

    std::vector<double> gap(n, 0.0);
    std::vector<double> permanent(n, 0.0);
    auto index_of = [&](Quarter q) { return quarter_diff(q, spec.start); };

    if (spec.kind == DgpKind::ar_cycle) {
        for (std::size_t t = 1; t < n; ++t) gap[t] = spec.ar_coefficient * gap[t - 1] + spec.ar_sigma * normal(rng);
    } else if (!spec.recessions.empty()) {
        std::vector<Knot> knots{{0, 0.0}};
        double level = 0.0;  // gap at the upcoming peak
        for (std::size_t i = 0; i < spec.recessions.size(); ++i) {
            const auto& r = spec.recessions[i];
            auto p = index_of(r.peak);
            auto tr = p + r.duration;
            double peak_gap = 0.0;
            double trough_gap = 0.0;
            switch (spec.kind) {
                case DgpKind::boom_bust:
                    peak_gap = r.amplitude / 2.0;
                    trough_gap = -r.amplitude / 2.0;
                    level = 0.0;
                    break;
                case DgpKind::plucking:
                    if (spec.overshoot) {
                        peak_gap = level;
                        trough_gap = -r.amplitude;
                        level = r.recovery_fraction * r.amplitude;
                        break;
                    }
                    [[fallthrough]];
                case DgpKind::permanent_drop: {
                    double recovered = spec.kind == DgpKind::permanent_drop ? 0.0 : r.recovery_fraction;
                    peak_gap = level;
                    trough_gap = level - r.amplitude;
                    level = trough_gap + recovered * r.amplitude;
                    for (auto t = static_cast<std::size_t>(tr); t < n; ++t) permanent[t] -= (1.0 - recovered) * r.amplitude;
                    break;
                }
                default: break;
            }
            knots.push_back({p, peak_gap});
            knots.push_back({tr, trough_gap});
        }
        knots.push_back({static_cast<std::int64_t>(n) - 1, level});
        gap = interpolate(knots, length);
    }

    std::vector<double> log_level(n);
    double noise = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0 && spec.noise_sigma > 0.0) noise += spec.noise_sigma * normal(rng);
        log_level[t] = std::log(spec.initial_level) + (spec.trend_growth * static_cast<double>(t) + gap[t] + noise) / 100.0;
    }
    std::vector<double> levels(n);
    for (std::size_t t = 0; t < n; ++t) levels[t] = std::exp(log_level[t]);

    CycleChronology truth;
    truth.country = spec.country;
    truth.sample_start = spec.start;
    truth.sample_end = spec.start + (length - 1);
    for (const auto& r : spec.recessions) {
        auto p = static_cast<std::size_t>(index_of(r.peak));
        auto tr = p + static_cast<std::size_t>(r.duration);
        truth.points.push_back({TurningKind::peak, r.peak, log_level[p]});
        truth.points.push_back({TurningKind::trough, r.peak + r.duration, log_level[tr]});
    }

    return SyntheticSeries{QuarterlySeries(spec.country, spec.variable, spec.start, std::move(levels)),
                           std::move(truth), std::move(gap), std::move(permanent)};
}

std::uint64_t derive_seed(std::uint64_t run_seed, const std::string& country, const Variable& variable) {
    // FNV-1a over the key, folded with the run seed
    std::uint64_t h = 1469598103934665603ULL ^ run_seed;
    for (char c : country + "/" + variable.to_string()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

SimulationPlan read_simulation_plan(std::istream& in, const std::string& source) {
    CsvReader reader(in, source);
    const auto c_country = reader.column("country");
    const auto c_variable = reader.column("variable");
    const auto c_kind = reader.column("kind");
    const auto c_length = reader.column("length");
    const auto c_start = reader.column("start");
    const auto c_growth = reader.column("trend_growth");
    const auto c_sigma = reader.column("noise_sigma");
    const auto c_peak = reader.column("peak");
    const auto c_duration = reader.column("duration");
    const auto c_amplitude = reader.column("amplitude");
    const auto c_recovery = reader.column("recovery_fraction");
    const bool has_overshoot = reader.has_column("overshoot");
    const auto c_overshoot = has_overshoot ? reader.column("overshoot") : 0;

    auto number = [&](const std::string& text, const char* field) {
        try {
            std::size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(field);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::non_numeric, reader.where() + ": non-numeric " + field + " '" + text + "'");
        }
    };

    SimulationPlan plan;
    std::map<SeriesKey, std::size_t> slot;
    while (auto row = reader.next()) {
        const auto& f = *row;
        try {
            SeriesKey key{f[c_country], parse_variable(f[c_variable])};
            auto it = slot.find(key);
            if (it == slot.end()) {
                DgpSpec spec;
                spec.country = key.country;
                spec.variable = key.variable;
                spec.kind = parse_dgp_kind(f[c_kind]);
                spec.start = parse_quarter(f[c_start]);
                spec.trend_growth = number(f[c_growth], "trend_growth");
                spec.noise_sigma = number(f[c_sigma], "noise_sigma");
                spec.overshoot = has_overshoot && (f[c_overshoot] == "1" || f[c_overshoot] == "true");
                it = slot.emplace(key, plan.specs.size()).first;
                plan.specs.push_back(std::move(spec));
                plan.lengths.push_back(static_cast<int>(number(f[c_length], "length")));
            }
            if (!f[c_peak].empty()) {
                PlantedRecession r;
                r.peak = parse_quarter(f[c_peak]);
                r.duration = static_cast<int>(number(f[c_duration], "duration"));
                r.amplitude = number(f[c_amplitude], "amplitude");
                r.recovery_fraction = f[c_recovery].empty() ? 1.0 : number(f[c_recovery], "recovery_fraction");
                plan.specs[it->second].recessions.push_back(r);
            }
        } catch (const Error& e) {
            if (std::string(e.what()).starts_with(source)) throw;
            throw Error(e.code(), reader.where() + ": " + e.what());
        }
    }
    return plan;
}

}  // namespace cyclekit
