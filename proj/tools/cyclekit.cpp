#include <CLI11.hpp>

#include <iostream>

#include "cyclekit/error.hpp"
#include "cyclekit/report.hpp"

namespace {

using namespace cyclekit;

struct Args {
    std::string input, chronology, gva, spec, fixture, output;
    std::string kind = "qw", horizons, group, sample = "full", format = "markdown";
};

void add_phase(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--min-phase", cfg.phase.min_phase, "minimum expansion/recession length")->capture_default_str();
    sub->add_option("--min-cycle", cfg.phase.min_cycle, "minimum full cycle length")->capture_default_str();
    sub->add_option("--window", cfg.phase.window, "turning-point comparison radius")->capture_default_str();
}

void add_filter(CLI::App* sub, RunConfig& cfg, Args& a) {
    sub->add_option("--kind", a.kind, "hamilton, qw or hp")->capture_default_str();
    sub->add_option("--lags", cfg.filter.lags, "autoregressive lags")->capture_default_str();
    sub->add_option("--horizon", cfg.filter.horizon, "Hamilton horizon")->capture_default_str();
    sub->add_option("--horizons", a.horizons, "Quast-Wolters horizon range a:b");
    sub->add_option("--min-window", cfg.filter.min_window, "observations before the first cycle value");
}

void add_output(CLI::App* sub, Args& a) {
    sub->add_option("--output", a.output, "output directory (stdout when omitted)");
}

int to_int(const std::string& text) {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
}

void finish(RunConfig& cfg, const Args& a) {
    if (!a.input.empty()) cfg.input = a.input;
    if (!a.chronology.empty()) cfg.chronology = a.chronology;
    if (!a.gva.empty()) cfg.gva = a.gva;
    if (!a.spec.empty()) cfg.spec = a.spec;
    if (!a.fixture.empty()) cfg.fixture = a.fixture;
    if (!a.output.empty()) cfg.output = a.output;
    if (cfg.subcommand == Subcommand::report && !cfg.output) cfg.output = "report";
    cfg.filter.kind = parse_filter_kind(a.kind);
    if (!a.horizons.empty()) {
        auto colon = a.horizons.find(':');
        try {
            if (colon == std::string::npos) throw std::invalid_argument(a.horizons);
            cfg.filter.horizon_min = to_int(a.horizons.substr(0, colon));
            cfg.filter.horizon_max = to_int(a.horizons.substr(colon + 1));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::invalid_spec, "--horizons expects a:b, got '" + a.horizons + "'");
        }
    }
    if (!a.group.empty()) cfg.group = parse_group(a.group);
    cfg.sample = parse_sample(a.sample);
    if (a.format == "csv") {
        cfg.format = OutputFormat::csv;
    } else if (a.format == "markdown" || a.format == "md") {
        cfg.format = OutputFormat::markdown;
    } else {
        throw Error(ErrorCode::invalid_spec, "--format must be csv or markdown");
    }
    if (cfg.lag < 0 || cfg.lag > 2) throw Error(ErrorCode::invalid_spec, "--lag must be 0, 1 or 2");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyclekit: business-cycle dating, filtering and asymmetry regressions"};
    app.require_subcommand(1);
    RunConfig cfg;
    Args a;

    auto* date = app.add_subcommand("date", "date turning points of log GDP");
    date->add_option("--input", a.input, "panel CSV")->required();
    add_phase(date, cfg);
    add_output(date, a);

    auto* filter = app.add_subcommand("filter", "cyclical component of log GDP");
    filter->add_option("--input", a.input, "panel CSV")->required();
    add_filter(filter, cfg, a);
    add_output(filter, a);

    auto* episodes = app.add_subcommand("episodes", "episode records");
    episodes->add_option("--input", a.input, "panel CSV");
    episodes->add_option("--fixture", a.fixture, "shipped fixture, e.g. table_a1");
    episodes->add_option("--chronology", a.chronology, "chronology CSV instead of dating the input");
    add_phase(episodes, cfg);
    add_filter(episodes, cfg, a);
    add_output(episodes, a);

    auto* regress = app.add_subcommand("regress", "Table 1 or Table 2 regressions");
    regress->add_option("--table", cfg.table, "1 (unemployment) or 2 (output)")->capture_default_str();
    regress->add_option("--input", a.input, "panel CSV");
    regress->add_option("--fixture", a.fixture, "shipped fixture, e.g. table_a1");
    regress->add_option("--chronology", a.chronology, "chronology CSV instead of dating the input");
    regress->add_option("--group", a.group, "all, flexible or remaining (default: all three)");
    regress->add_option("--sample", a.sample, "full, pre1990, post1990, short or long")->capture_default_str();
    regress->add_option("--lag", cfg.lag, "unemployment lag in quarters (0-2)")->capture_default_str();
    regress->add_option("--format", a.format, "csv or markdown")->capture_default_str();
    add_phase(regress, cfg);
    add_filter(regress, cfg, a);
    add_output(regress, a);

    auto* sector = app.add_subcommand("sector", "industry recovery and bust slopes");
    sector->add_option("--input", a.input, "panel CSV with gva_ series")->required();
    sector->add_option("--chronology", a.chronology, "aggregate chronology CSV (else dated from gdp in the input)");
    sector->add_flag("--pooled", cfg.pooled, "pool all industries into one regression");
    sector->add_option("--lags", cfg.filter.lags, "autoregressive lags")->capture_default_str();
    sector->add_option("--horizon", cfg.filter.horizon, "Hamilton horizon")->capture_default_str();
    sector->add_option("--min-window", cfg.filter.min_window, "observations before the first cycle value");
    add_phase(sector, cfg);
    add_output(sector, a);

    auto* simulate = app.add_subcommand("simulate", "synthetic panel from a plan CSV");
    simulate->add_option("--spec", a.spec, "simulation plan CSV")->required();
    simulate->add_option("--seed", cfg.seed, "run seed")->capture_default_str();
    add_output(simulate, a);

    auto* report = app.add_subcommand("report", "full pipeline");
    report->add_option("--input", a.input, "panel CSV");
    report->add_option("--gva", a.gva, "separate GVA panel CSV");
    report->add_option("--fixture", a.fixture, "shipped fixture, e.g. table_a1");
    report->add_option("--chronology", a.chronology, "chronology CSV instead of dating the input");
    report->add_option("--group", a.group, "all, flexible or remaining (default: all three)");
    report->add_option("--sample", a.sample, "full, pre1990, post1990, short or long")->capture_default_str();
    report->add_option("--lag", cfg.lag, "unemployment lag in quarters (0-2)")->capture_default_str();
    add_phase(report, cfg);
    add_filter(report, cfg, a);
    report->add_option("--output", a.output, "output directory (default: report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::pair<CLI::App*, Subcommand> subs[] = {
        {date, Subcommand::date},         {filter, Subcommand::filter},     {episodes, Subcommand::episodes},
        {regress, Subcommand::regress},   {sector, Subcommand::sector},     {simulate, Subcommand::simulate},
        {report, Subcommand::report}};
    for (auto& [app_sub, kind] : subs) {
        if (app_sub->parsed()) cfg.subcommand = kind;
    }
    try {
        finish(cfg, a);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    }
    return run(cfg, std::cout, std::cerr);
}
