#pragma once

#include "excitonium/heom.hpp"
#include "excitonium/scenario.hpp"
#include "excitonium/trajectory.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace excitonium {

struct RunOptions {
    int workers = 0;  ///< HEOM workers per run; 0: configured_worker_count()
    ValidityTolerances validity{};
};

/// Negative-eigenvalue tolerance for full Redfield runs. The non-secular
/// generator is not completely positive and drives a site-localized start
/// to eigenvalues around -0.05 in FMO; the excursion is reported in the CSV
/// header and the entropies clamp negative eigenvalues to zero.
inline constexpr double redfield_full_negativity = 0.25;

/// Propagates one validated scenario. Throws ConfigError for invalid input
/// and PropagationFailure (with the partial trajectory) on a validity
/// violation mid-run.
Trajectory run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Outcome of one run as written to disk.
struct RunRecord {
    Trajectory trajectory;
    bool complete = true;
    std::string failure;  ///< diagnostic when !complete
};

/// Runs the scenario and catches PropagationFailure into the record.
RunRecord run_recorded(const Scenario& scenario, const RunOptions& options = {});

/// Provenance header lines (without the leading "# ").
std::vector<std::string> run_metadata(const Scenario& scenario, const RunRecord& record);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Trajectory CSV with the resolved config and run status as '#' lines.
std::string run_csv(const Scenario& scenario, const RunRecord& record);

/// Probe times of the solver comparison, fs.
inline const std::vector<double>& probe_times() {
    static const std::vector<double> t{100.0, 200.0, 500.0, 1000.0};
    return t;
}

/// Local maxima of `values` on t <= t_max whose prominence (height above
/// the higher of the two minima separating it from higher ground) is at
/// least `min_prominence`.
int count_local_maxima(const std::vector<double>& times, const std::vector<double>& values, double t_max,
                       double min_prominence);

/// Prominence threshold used by the comparison summary.
inline constexpr double default_maximum_prominence = 1e-3;

struct SolverSummary {
    std::string label;
    double peak_E = 0.0;
    double peak_time = 0.0;
    std::vector<std::optional<double>> probe_E;  ///< per probe time; empty beyond the horizon
    int local_maxima = 0;                        ///< on [0, 500] fs
};

struct ComparisonResult {
    std::vector<RunRecord> runs;
    std::vector<std::string> labels;  ///< unique column labels, e.g. heom, heom.2
    std::vector<SolverSummary> summary;
    std::string table_csv;     ///< side-by-side columns on the shared grid
    std::string summary_text;  ///< human-readable summary with orderings
    bool complete() const;
};

/// Same scenario under each solver; needs at least two.
ComparisonResult compare_solvers(const Scenario& scenario, const std::vector<SolverKind>& solvers,
                                 const RunOptions& options = {});

enum class SweepAxis { temperature, initial_site, depth };
std::string to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepEntry {
    std::string value;  ///< as written in file names and the manifest
    std::filesystem::path file;
    RunRecord record;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::vector<ConvergenceRow> convergence;  ///< depth sweeps only
    bool complete() const;
};

/// Applies `value` along `axis`; throws ConfigError for a value the axis
/// cannot take.
Scenario with_axis_value(const Scenario& base, SweepAxis axis, double value);

/// One CSV per value in `out_dir` (named <axis>_<value>.csv), written
/// atomically; manifest.csv is written last. Independent values run
/// concurrently on up to `parallel_runs` threads.
SweepResult run_sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
                      const std::filesystem::path& out_dir, const RunOptions& options = {}, int parallel_runs = 0);

/// Polyline chart for quick inspection.
struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

}  // namespace excitonium
