#include "cyclekit/report.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "cyclekit/csv.hpp"
#include "cyclekit/error.hpp"
#include "cyclekit/synthgen.hpp"

namespace cyclekit {

namespace {

std::string cell(const RegressionResult& r, int i) {
    return format_fixed(r.coefficients[i], 4) + to_string(r.stars[static_cast<std::size_t>(i)]) + " (" +
           format_fixed(r.robust_se[i], 4) + ")";
}

std::string row(const std::vector<std::string>& cells) {
    std::string s = "|";
    for (const auto& c : cells) s += " " + c + " |";
    return s + "\n";
}

}  // namespace

std::string regression_table_markdown(const std::string& title, const std::vector<TableColumn>& columns) {
    std::vector<std::string> regressors;
    for (const auto& c : columns) {
        if (std::ranges::find(regressors, c.fit.regressor) == regressors.end()) regressors.push_back(c.fit.regressor);
    }
    std::ostringstream out;
    out << "## " << title << "\n\n";
    std::vector<std::string> head{""}, rule{"---"}, sample{"Sample"}, dep{"Dependent variable"}, cons{"Constant"};
    std::vector<std::string> nobs{"No. of observations"}, adj{"Adjusted R2"};
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        head.push_back("(" + std::to_string(j + 1) + ")");
        rule.push_back("---:");
        sample.push_back(c.sample);
        dep.push_back(c.fit.dependent);
        cons.push_back(cell(c.fit.result, 0));
        nobs.push_back(std::to_string(c.fit.result.n_obs));
        adj.push_back(format_fixed(c.fit.result.adj_r2, 4));
    }
    out << row(head) << row(rule) << row(sample) << row(dep) << row(cons);
    for (const auto& reg : regressors) {
        std::vector<std::string> r{reg};
        for (const auto& c : columns) r.push_back(c.fit.regressor == reg ? cell(c.fit.result, 1) : "-");
        out << row(r);
    }
    out << row(nobs) << row(adj) << "\n";
    auto hc = columns.empty() ? HcType::hc1 : columns.front().fit.result.hc;
    out << "***, ** and * mark significance at the 1%, 5% and 10% levels. OLS with " << to_string(hc)
        << " robust standard errors in parentheses.\n";
    return out.str();
}

std::string regression_table_csv(const std::vector<TableColumn>& columns) {
    std::ostringstream out;
    out << "column,sample,dependent,term,estimate,std_error,t_stat,p_value,stars,n_obs,adj_r2\n";
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        const auto& r = c.fit.result;
        for (int i = 0; i < 2; ++i) {
            out << j + 1 << ',' << c.sample << ',' << c.fit.dependent << ',' << (i == 0 ? "constant" : c.fit.regressor)
                << ',' << format_double(r.coefficients[i]) << ',' << format_double(r.robust_se[i]) << ','
                << format_double(r.t_stats[i]) << ',' << format_double(r.p_values[i]) << ','
                << to_string(r.stars[static_cast<std::size_t>(i)]) << ',' << r.n_obs << ','
                << format_double(r.adj_r2) << '\n';
        }
    }
    return out.str();
}

std::string scatter_csv(const EquationFit& fit) {
    std::ostringstream out;
    out << "country,peak," << fit.regressor << ',' << fit.dependent << '\n';
    for (std::size_t i = 0; i < fit.x.size(); ++i) {
        auto space = fit.labels[i].find(' ');
        out << fit.labels[i].substr(0, space) << ',' << fit.labels[i].substr(space + 1) << ','
            << format_double(fit.x[i]) << ',' << format_double(fit.y[i]) << '\n';
    }
    return out.str();
}

std::string chronology_csv(const std::vector<CycleChronology>& chronologies) {
    std::ostringstream out;
    out << "country,kind,quarter\n";
    for (const auto& c : chronologies) {
        for (const auto& p : c.points) out << c.country << ',' << to_string(p.kind) << ',' << p.quarter.to_string() << '\n';
    }
    return out.str();
}

std::vector<CycleChronology> read_chronology_csv(std::istream& in, const std::string& source) {
    CsvReader reader(in, source);
    const auto c_country = reader.column("country");
    const auto c_kind = reader.column("kind");
    const auto c_quarter = reader.column("quarter");
    std::map<std::string, std::vector<TurningPoint>> points;
    while (auto fields = reader.next()) {
        const auto& f = *fields;
        try {
            points[f[c_country]].push_back(
                {parse_turning_kind(f[c_kind]), parse_quarter(f[c_quarter]), std::numeric_limits<double>::quiet_NaN()});
        } catch (const Error& e) {
            throw Error(e.code(), reader.where() + ": " + e.what());
        }
    }
    std::vector<CycleChronology> out;
    for (auto& [country, list] : points) {
        std::ranges::stable_sort(list, {}, &TurningPoint::quarter);
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].quarter == list[i - 1].quarter) {
                throw Error(ErrorCode::duplicate, source + ": " + country + " has two turning points at " +
                                                      list[i].quarter.to_string());
            }
            if (list[i].kind == list[i - 1].kind) {
                throw Error(ErrorCode::malformed, source + ": " + country + " turning points do not alternate at " +
                                                      list[i].quarter.to_string());
            }
        }
        out.push_back({country, std::move(list), std::nullopt, std::nullopt});
    }
    return out;
}

std::vector<CycleChronology> load_chronology_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return read_chronology_csv(in, path.string());
}

std::string filter_csv(const std::map<std::string, FilterOutput>& cycles) {
    std::ostringstream out;
    out << "country,quarter,cycle\n";
    for (const auto& [country, f] : cycles) {
        const auto& c = f.cycle;
        for (std::size_t i = 0; i < c.size(); ++i) {
            out << country << ',' << c.quarter_at(i).to_string() << ',' << format_double(c[i]) << '\n';
        }
    }
    return out.str();
}

std::string episodes_csv(const EpisodePanel& panel) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
    std::ostringstream out;
    out << "country,peak,trough,next_peak,recession_duration,preceding_expansion_duration,expansion_censored,"
           "flexible_group,pre_1990,du_recession,du_expansion,dy_recession,dy_expansion,trend_gr\n";
    for (const auto& e : panel.episodes) {
        out << e.country << ',' << e.peak.to_string() << ',' << e.trough.to_string() << ','
            << (e.next_peak ? e.next_peak->to_string() : "NA") << ',' << e.recession_duration << ','
            << (e.preceding_expansion_duration ? std::to_string(*e.preceding_expansion_duration) : "NA") << ','
            << int(e.expansion_censored) << ',' << int(e.flexible_group) << ',' << int(e.pre_1990) << ','
            << opt(e.du_recession) << ',' << opt(e.du_expansion) << ',' << opt(e.dy_recession) << ','
            << opt(e.dy_expansion) << ',' << opt(e.trend_gr) << '\n';
    }
    return out.str();
}

std::string sector_csv(const SectorRegressions& regressions) {
    std::ostringstream out;
    out << "industry,pooling,beta_recovery,se_recovery,n_recovery,beta_bust,se_bust,n_bust\n";
    for (const auto& p : regressions.pairs) {
        out << p.industry << ",countries_pooled," << format_double(p.beta_recovery) << ','
            << format_double(p.se_recovery) << ',' << p.n_recovery << ',' << format_double(p.beta_bust) << ','
            << format_double(p.se_bust) << ',' << p.n_bust << '\n';
    }
    return out.str();
}

namespace {

std::vector<std::pair<std::string, std::string>> summary_rows(const DurationSummary& s) {
    std::vector<std::pair<std::string, std::string>> rows{
        {"recessions", std::to_string(s.episodes)},
        {"mean_recession", format_fixed(s.mean_recession, 4)},
        {"median_recession", format_fixed(s.median_recession, 4)},
        {"max_recession", std::to_string(s.max_recession)},
        {"expansions", std::to_string(s.expansions)},
        {"mean_expansion", format_fixed(s.mean_expansion, 4)},
        {"median_expansion", format_fixed(s.median_expansion, 4)},
        {"max_expansion", std::to_string(s.max_expansion)},
        {"mean_cycle", format_fixed(s.mean_cycle, 4)},
    };
    if (s.longest_expansion) {
        const auto& l = *s.longest_expansion;
        rows.emplace_back("longest_expansion",
                          l.country + " " + l.start.to_string() + "-" + l.end.to_string());
    }
    return rows;
}

}  // namespace

std::string duration_summary_markdown(const DurationSummary& summary) {
    std::ostringstream out;
    out << "## Phase durations (quarters)\n\n| statistic | value |\n| --- | ---: |\n";
    for (const auto& [k, v] : summary_rows(summary)) out << "| " << k << " | " << v << " |\n";
    out << "\nExpansions exclude the censored opening phase of each country.\n";
    return out.str();
}

std::string duration_summary_csv(const DurationSummary& summary) {
    std::ostringstream out;
    out << "statistic,value\n";
    for (const auto& [k, v] : summary_rows(summary)) out << k << ',' << v << '\n';
    return out.str();
}

const char* to_string(Subcommand sub) noexcept {
    switch (sub) {
        case Subcommand::date: return "date";
        case Subcommand::filter: return "filter";
        case Subcommand::episodes: return "episodes";
        case Subcommand::regress: return "regress";
        case Subcommand::sector: return "sector";
        case Subcommand::simulate: return "simulate";
        case Subcommand::report: return "report";
    }
    return "?";
}

namespace {

/// Files to emit, in order.
using Outputs = std::vector<std::pair<std::string, std::string>>;

class Pipeline {
public:
    Pipeline(const RunConfig& config, std::ostream& err) : cfg_(config), err_(err) {}

    const Panel& panel() {
        if (!panel_) {
            if (!cfg_.input) throw Error(ErrorCode::missing_input, std::string(to_string(cfg_.subcommand)) + " needs --input");
            panel_ = load_csv(*cfg_.input);
        }
        return *panel_;
    }

    bool has_input() const { return cfg_.input.has_value(); }

    const std::map<std::string, QuarterlySeries>& log_gdp() {
        if (!log_gdp_) {
            std::map<std::string, QuarterlySeries> m;
            for (const auto* s : panel().of_kind(VariableKind::gdp)) m.emplace(s->country(), to_log(*s));
            if (m.empty()) throw Error(ErrorCode::missing_input, cfg_.input->string() + " holds no gdp series");
            log_gdp_ = std::move(m);
        }
        return *log_gdp_;
    }

    const std::vector<CycleChronology>& chronologies() {
        if (!chronologies_) {
            if (cfg_.chronology) {
                chronologies_ = load_chronology_csv(*cfg_.chronology);
            } else {
                cfg_.phase.validate();
                std::vector<CycleChronology> out;
                for (const auto& [country, y] : log_gdp()) out.push_back(date_cycles(y, cfg_.phase));
                chronologies_ = std::move(out);
            }
        }
        return *chronologies_;
    }

    const std::map<std::string, FilterOutput>& cycles() {
        if (!cycles_) {
            cfg_.filter.validate();
            std::map<std::string, FilterOutput> m;
            for (const auto& [country, y] : log_gdp()) m.emplace(country, apply_filter(y, cfg_.filter));
            cycles_ = std::move(m);
        }
        return *cycles_;
    }

    EpisodePanel computed_episodes(bool with_output) {
        static const std::map<std::string, FilterOutput> none;
        auto panel_out = build_episodes(chronologies(), panel(), with_output ? cycles() : none);
        if (with_output) panel_out = attach_trend_effects(std::move(panel_out), log_gdp(), cfg_.filter);
        return panel_out;
    }

    EpisodePanel fixture_episodes() {
        auto rows = load_table_a1(fixture_path(*cfg_.fixture));
        for (const auto& note : table_a1_discrepancies(rows)) err_ << "note: " << *cfg_.fixture << ": " << note << '\n';
        return episodes_from_table_a1(rows);
    }

    void warn(const std::string& msg) { err_ << "warning: " << msg << '\n'; }

    const RunConfig& config() const { return cfg_; }

private:
    const RunConfig& cfg_;
    std::ostream& err_;
    std::optional<Panel> panel_;
    std::optional<std::map<std::string, QuarterlySeries>> log_gdp_;
    std::optional<std::vector<CycleChronology>> chronologies_;
    std::optional<std::map<std::string, FilterOutput>> cycles_;
};

const char* sample_label(Group g) {
    switch (g) {
        case Group::all: return "all countries";
        case Group::flexible: return "flexible labour markets";
        case Group::remaining: return "remaining countries";
    }
    return "?";
}

std::vector<Group> groups_of(const RunConfig& cfg) {
    if (cfg.group) return {*cfg.group};
    return {Group::all, Group::flexible, Group::remaining};
}

void add_table(Outputs& out, const std::string& stem, const std::string& title, const std::vector<TableColumn>& cols,
               OutputFormat format, bool both) {
    if (both || format == OutputFormat::markdown) out.emplace_back(stem + ".md", regression_table_markdown(title, cols));
    if (both || format == OutputFormat::csv) out.emplace_back(stem + ".csv", regression_table_csv(cols));
}

/// Fits per group; when every group was requested, groups with too few episodes are skipped.
template <typename Fit>
std::vector<std::pair<Group, Fit>> fit_groups(Pipeline& p, const std::function<Fit(const RegressionOptions&)>& fit) {
    const auto& cfg = p.config();
    std::vector<std::pair<Group, Fit>> fits;
    for (auto g : groups_of(cfg)) {
        RegressionOptions o;
        o.group = g;
        o.sample = cfg.sample;
        o.lag = cfg.lag;
        if (cfg.lag != 0 && p.has_input()) o.unemployment = &p.panel();
        try {
            fits.emplace_back(g, fit(o));
        } catch (const Error& e) {
            if (cfg.group || e.code() != ErrorCode::too_few) throw;
            p.warn(std::string(sample_label(g)) + " column skipped: " + e.what());
        }
    }
    if (fits.empty()) throw Error(ErrorCode::too_few, "no group has enough episodes to estimate");
    return fits;
}

void table1(Pipeline& p, const EpisodePanel& panel, Outputs& out, const std::string& prefix, bool both) {
    auto fits = fit_groups<std::pair<EquationFit, EquationFit>>(
        p, [&](const RegressionOptions& o) { return run_unemployment_regressions(panel, o); });
    std::vector<TableColumn> cols;
    for (const auto& [g, f] : fits) cols.push_back({sample_label(g), f.first});
    for (const auto& [g, f] : fits) cols.push_back({sample_label(g), f.second});
    add_table(out, prefix + "table1", "Unemployment cycles", cols, p.config().format, both);
    for (const auto& [g, f] : fits) {
        out.emplace_back(prefix + "scatter_eq1_" + to_string(g) + ".csv", scatter_csv(f.first));
        out.emplace_back(prefix + "scatter_eq2_" + to_string(g) + ".csv", scatter_csv(f.second));
    }
}

void table2(Pipeline& p, Outputs& out, bool both) {
    if (!p.has_input()) throw Error(ErrorCode::missing_input, "table 2 needs GDP input (--input)");
    auto panel = p.computed_episodes(true);
    auto fits = fit_groups<std::array<EquationFit, 3>>(
        p, [&](const RegressionOptions& o) { return run_output_regressions(panel, o); });
    std::vector<TableColumn> cols;
    for (int eq = 0; eq < 3; ++eq) {
        for (const auto& [g, f] : fits) cols.push_back({sample_label(g), f[eq]});
    }
    add_table(out, "table2", "Output cycles", cols, p.config().format, both);
    for (const auto& [g, f] : fits) {
        for (int eq = 0; eq < 3; ++eq) {
            out.emplace_back("scatter_eq" + std::to_string(eq + 3) + "_" + to_string(g) + ".csv", scatter_csv(f[eq]));
        }
    }
}

EpisodePanel table1_panel(Pipeline& p) {
    const auto& cfg = p.config();
    if (cfg.fixture) return p.fixture_episodes();
    return p.computed_episodes(false);
}

SectorRegressions sector(Pipeline& p) {
    Panel gva;
    for (const auto& [key, s] : p.panel().series()) {
        if (key.variable.kind == VariableKind::gva) gva.insert(s);
    }
    if (p.config().gva) {
        for (const auto& [key, s] : load_csv(*p.config().gva).series()) {
            if (key.variable.kind == VariableKind::gva) gva.insert(s);
        }
    }
    if (gva.empty()) throw Error(ErrorCode::missing_input, "no gva_ series in the input");
    auto cycles = sector_cycles(gva, p.config().filter);
    for (const auto& w : cycles.warnings) p.warn(w);
    auto episodes = build_sector_episodes(p.chronologies(), cycles.cycles);
    for (const auto& w : episodes.warnings) p.warn(w);
    auto regs = sector_regressions(episodes.episodes, !p.config().pooled);
    for (const auto& w : regs.warnings) p.warn(w);
    if (regs.pairs.empty()) throw Error(ErrorCode::too_few, "no industry has enough episodes");
    return regs;
}

Outputs simulate(const RunConfig& cfg) {
    if (!cfg.spec) throw Error(ErrorCode::missing_input, "simulate needs --spec");
    std::ifstream in(*cfg.spec);
    if (!in) throw Error(ErrorCode::io, "cannot open " + cfg.spec->string());
    auto plan = read_simulation_plan(in, cfg.spec->string());
    Panel panel;
    std::vector<CycleChronology> truth;
    for (std::size_t i = 0; i < plan.specs.size(); ++i) {
        auto spec = plan.specs[i];
        spec.seed = derive_seed(cfg.seed, spec.country, spec.variable);
        auto s = generate(spec, plan.lengths[i]);
        if (spec.variable.kind == VariableKind::gdp) truth.push_back(s.truth);
        panel.insert(s.levels);
    }
    std::ostringstream csv;
    write_panel_csv(csv, panel);
    return {{"panel.csv", csv.str()}, {"truth_chronology.csv", chronology_csv(truth)}};
}

Outputs produce(const RunConfig& cfg, std::ostream& err) {
    Pipeline p(cfg, err);
    Outputs out;
    switch (cfg.subcommand) {
        case Subcommand::date:
            out.emplace_back("chronology.csv", chronology_csv(p.chronologies()));
            break;
        case Subcommand::filter:
            out.emplace_back("cycles.csv", filter_csv(p.cycles()));
            break;
        case Subcommand::episodes: {
            auto panel = cfg.fixture ? p.fixture_episodes() : p.computed_episodes(true);
            out.emplace_back("episodes.csv", episodes_csv(panel));
            break;
        }
        case Subcommand::regress:
            if (cfg.table == 1) {
                table1(p, table1_panel(p), out, "", false);
            } else if (cfg.table == 2) {
                table2(p, out, false);
            } else {
                throw Error(ErrorCode::invalid_spec, "--table must be 1 or 2");
            }
            break;
        case Subcommand::sector:
            out.emplace_back("sector_coefficients.csv", sector_csv(sector(p)));
            break;
        case Subcommand::simulate:
            return simulate(cfg);
        case Subcommand::report: {
            if (!cfg.input && !cfg.fixture) throw Error(ErrorCode::missing_input, "report needs --input or --fixture");
            if (cfg.fixture) {
                auto panel = p.fixture_episodes();
                auto prefix = cfg.input ? std::string("fixture_") : std::string();
                table1(p, panel, out, prefix, true);
                auto s = duration_stats(panel);
                out.emplace_back(prefix + "durations.md", duration_summary_markdown(s));
                out.emplace_back(prefix + "durations.csv", duration_summary_csv(s));
            }
            if (cfg.input) {
                out.emplace_back("chronology.csv", chronology_csv(p.chronologies()));
                out.emplace_back("cycles.csv", filter_csv(p.cycles()));
                auto panel = p.computed_episodes(true);
                out.emplace_back("episodes.csv", episodes_csv(panel));
                if (p.panel().of_kind(VariableKind::unemployment_rate).empty()) {
                    p.warn("no unemployment_rate series in the input; table1 skipped");
                } else {
                    table1(p, panel, out, "", true);
                }
                table2(p, out, true);
                auto s = duration_stats(panel);
                out.emplace_back("durations.md", duration_summary_markdown(s));
                out.emplace_back("durations.csv", duration_summary_csv(s));
                bool has_gva = cfg.gva.has_value() || !p.panel().of_kind(VariableKind::gva).empty();
                if (has_gva) out.emplace_back("sector_coefficients.csv", sector_csv(sector(p)));
            }
            break;
        }
    }
    return out;
}

void emit(const Outputs& files, const std::optional<std::filesystem::path>& dir, std::ostream& out) {
    if (!dir) {
        for (const auto& [name, text] : files) {
            if (files.size() > 1) out << "==> " << name << " <==\n";
            out << text;
        }
        return;
    }
    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(*dir);
        for (const auto& [name, text] : files) {
            auto path = *dir / name;
            std::ofstream f(path, std::ios::binary);
            written.push_back(path);
            if (!(f << text) || !f.flush()) throw Error(ErrorCode::io, "cannot write " + path.string());
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& path : written) std::filesystem::remove(path, ec);
        throw;
    }
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        emit(produce(config, err), config.output, out);
        return 0;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return e.is_numerical() ? 3 : 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error [io]: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace cyclekit
