#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cyclekit/dating.hpp"
#include "cyclekit/episodes.hpp"
#include "cyclekit/filters.hpp"
#include "cyclekit/sector.hpp"

namespace cyclekit {

/// One column of a Table-1/2-shaped regression table.
struct TableColumn {
    std::string sample;  // e.g. "all countries"
    EquationFit fit;
};

/// Rows: constant, one row per distinct regressor, observations, adjusted R2.
std::string regression_table_markdown(const std::string& title, const std::vector<TableColumn>& columns);
/// Long format, one row per (column, term).
std::string regression_table_csv(const std::vector<TableColumn>& columns);

/// One row per episode behind a fit: `label,country,peak,x,y`.
std::string scatter_csv(const EquationFit& fit);

/// `country,kind,quarter`.
std::string chronology_csv(const std::vector<CycleChronology>& chronologies);
/// Inverse of chronology_csv. Turning-point values are NaN.
std::vector<CycleChronology> read_chronology_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<CycleChronology> load_chronology_csv(const std::filesystem::path& path);

/// `country,quarter,cycle` from first_valid onward.
std::string filter_csv(const std::map<std::string, FilterOutput>& cycles);

std::string episodes_csv(const EpisodePanel& panel);

/// `industry,pooling,beta_recovery,se_recovery,n_recovery,beta_bust,se_bust,n_bust`.
std::string sector_csv(const SectorRegressions& regressions);

std::string duration_summary_markdown(const DurationSummary& summary);
std::string duration_summary_csv(const DurationSummary& summary);

enum class Subcommand { date, filter, episodes, regress, sector, simulate, report };
enum class OutputFormat { csv, markdown };

const char* to_string(Subcommand sub) noexcept;

struct RunConfig {
    Subcommand subcommand = Subcommand::report;
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> chronology;
    std::optional<std::filesystem::path> gva;
    std::optional<std::filesystem::path> spec;
    std::optional<std::string> fixture;
    PhaseSpec phase;
    FilterConfig filter;
    int table = 1;
    std::optional<Group> group;  // all three when unset
    SampleFilter sample = SampleFilter::full;
    int lag = 0;
    bool pooled = false;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> output;  // stdout when unset
    OutputFormat format = OutputFormat::markdown;
};

/// Executes one subcommand. Returns 0, 2 for input errors or 3 for numerical failures;
/// diagnostics go to `err`. Files are written only when every stage succeeded.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace cyclekit
