// excitonium: run, compare and sweep exciton-entanglement scenarios.
//
//   excitonium run --preset fig2 --out results --svg
//   excitonium compare --preset figS3 --horizon 1000 --out results
//   excitonium sweep --preset fig3 --axis temperature --values 77,300 --out sweep
//   excitonium presets [NAME]
//   excitonium validate --config scenario.ini
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
// partial CSV is still written and flagged in its header), 1 anything else.

#include "excitonium/runner.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace excitonium;
namespace fs = std::filesystem;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct ScenarioFlags {
    std::string config;
    std::string preset;
    std::optional<double> temp;
    std::optional<int> site;
    std::optional<int> depth;
    std::optional<double> horizon;
    std::optional<double> dt;
    std::string out = ".";
    bool svg = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "scenario config file (sections of key = value)");
        app->add_option("--preset", preset, "figure preset, see 'excitonium presets'");
        app->add_option("--temp", temp, "bath temperature, K");
        app->add_option("--site", site, "initially excited site (1-based)");
        app->add_option("--depth", depth, "hierarchy truncation depth");
        app->add_option("--horizon", horizon, "propagation horizon, fs");
        app->add_option("--dt", dt, "integration step, fs");
        app->add_option("--out", out, "output directory")->capture_default_str();
        app->add_flag("--svg", svg, "also write an SVG plot");
    }

    std::string label() const {
        if (!config.empty()) return fs::path(config).stem().string();
        if (!preset.empty()) return preset;
        return "scenario";
    }

    Scenario resolve(const std::optional<std::string>& solver = std::nullopt) const {
        Scenario s = preset.empty() ? Scenario{} : excitonium::preset(preset);
        if (!config.empty()) s = load_scenario(config, s);
        if (solver) set_field(s, "solver", "name", *solver);
        if (temp) s.temperature = *temp;
        if (site) s.initial_site = *site;
        if (depth) s.depth = *depth;
        if (horizon) s.horizon_fs = *horizon;
        if (dt) s.integrator.dt = *dt;
        s.validate();
        return s;
    }
};

std::vector<PlotSeries> trajectory_series(const Trajectory& t) {
    std::vector<PlotSeries> out{{"E", t.times, t.global_entanglement()}, {"trace", t.times, t.traces()}};
    // The four pairwise concurrences with the largest maximum.
    const int n = t.n_sites();
    std::vector<std::pair<double, std::pair<int, int>>> pairs;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const auto c = t.concurrence(i, j);
            double m = 0.0;
            for (double v : c) m = std::max(m, v);
            pairs.push_back({m, {i, j}});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; k < std::min<std::size_t>(4, pairs.size()); ++k) {
        const auto [i, j] = pairs[k].second;
        out.push_back({"C" + std::to_string(i) + std::to_string(j), t.times, t.concurrence(i, j)});
    }
    return out;
}

int do_run(const ScenarioFlags& f, const std::optional<std::string>& solver) {
    const Scenario s = f.resolve(solver);
    const RunRecord r = run_recorded(s);
    const fs::path csv = fs::path(f.out) / (f.label() + ".csv");
    write_file_atomic(csv, run_csv(s, r));
    std::cout << csv.string() << "\n";
    if (f.svg) {
        const fs::path svg = fs::path(f.out) / (f.label() + ".svg");
        write_file_atomic(svg, render_svg(f.label() + " (" + to_string(s.solver) + ", " +
                                              format_number(s.temperature) + " K, site " +
                                              std::to_string(s.initial_site) + ")",
                                          "t (fs)", "", trajectory_series(r.trajectory)));
        std::cout << svg.string() << "\n";
    }
    if (!r.complete) {
        std::cerr << "numerical failure: " << r.failure << "\n";
        return exit_numerical;
    }
    return 0;
}

int do_compare(const ScenarioFlags& f, const std::vector<std::string>& names) {
    const Scenario s = f.resolve();
    std::vector<SolverKind> solvers;
    for (const auto& n : names) solvers.push_back(parse_solver(n));
    if (solvers.empty()) solvers = {SolverKind::heom, SolverKind::redfield_full, SolverKind::redfield_secular};
    const auto result = compare_solvers(s, solvers);
    const fs::path dir(f.out);
    write_file_atomic(dir / (f.label() + "_compare.csv"), result.table_csv);
    write_file_atomic(dir / (f.label() + "_compare_summary.txt"), result.summary_text);
    if (f.svg) {
        std::vector<PlotSeries> series;
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
            const auto& t = result.runs[i].trajectory;
            series.push_back({result.labels[i], t.times, t.global_entanglement()});
        }
        write_file_atomic(dir / (f.label() + "_compare.svg"), render_svg("global entanglement", "t (fs)", "E", series));
    }
    std::cout << result.summary_text;
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        if (!result.runs[i].complete) std::cerr << result.labels[i] << ": numerical failure: " << result.runs[i].failure << "\n";
    }
    return result.complete() ? 0 : exit_numerical;
}

int do_sweep(const ScenarioFlags& f, const std::string& axis_name, const std::vector<double>& values) {
    const Scenario s = f.resolve();
    const SweepAxis axis = parse_sweep_axis(axis_name);
    const fs::path dir(f.out);
    const auto result = run_sweep(s, axis, values, dir);
    for (const auto& e : result.entries) {
        std::cout << to_string(axis) << " = " << e.value << " -> " << (dir / e.file).string()
                  << (e.record.complete ? "" : "  (partial: " + e.record.failure + ")") << "\n";
    }
    if (f.svg) {
        std::vector<PlotSeries> series;
        for (const auto& e : result.entries) {
            series.push_back({to_string(axis) + " " + e.value, e.record.trajectory.times,
                              e.record.trajectory.global_entanglement()});
        }
        write_file_atomic(dir / ("sweep_" + to_string(axis) + ".svg"),
                          render_svg("global entanglement", "t (fs)", "E", series));
    }
    if (!result.convergence.empty()) {
        std::cout << "depth  ->  depth   max|dE|        max|dpop|\n";
        for (const auto& row : result.convergence) {
            std::cout << row.from.depth << " -> " << row.to.depth << "   " << format_number(row.max_entanglement_deviation)
                      << "   " << format_number(row.max_population_deviation) << "\n";
        }
    }
    return result.complete() ? 0 : exit_numerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement dynamics of exciton transport (HEOM and Redfield)"};
    app.require_subcommand(1);

    ScenarioFlags run_flags, compare_flags, sweep_flags, validate_flags;
    std::optional<std::string> run_solver;
    std::vector<std::string> compare_solvers_names;
    std::string axis;
    std::vector<double> values;
    std::string preset_name;

    auto* run = app.add_subcommand("run", "propagate one scenario and write its trajectory CSV");
    run_flags.attach(run);
    run->add_option("--solver", run_solver, "heom | redfield-full | redfield-secular");

    auto* compare = app.add_subcommand("compare", "run one scenario under several solvers side by side");
    compare_flags.attach(compare);
    compare->add_option("--solver", compare_solvers_names, "solver to include (repeatable; default all three)");

    auto* sweep = app.add_subcommand("sweep", "one run per value of temperature, initial_site or depth");
    sweep_flags.attach(sweep);
    sweep->add_option("--axis", axis, "temperature | initial_site | depth")->required();
    sweep->add_option("--values", values, "comma-separated values")->delimiter(',')->required();

    auto* presets = app.add_subcommand("presets", "list figure presets, or print one resolved");
    presets->add_option("name", preset_name, "preset to print");

    auto* validate = app.add_subcommand("validate", "check a config and print it fully resolved");
    validate_flags.attach(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (run->parsed()) return do_run(run_flags, run_solver);
        if (compare->parsed()) return do_compare(compare_flags, compare_solvers_names);
        if (sweep->parsed()) return do_sweep(sweep_flags, axis, values);
        if (presets->parsed()) {
            if (preset_name.empty()) {
                for (const auto& p : preset_catalog()) std::cout << p.name << "\t" << p.description << "\n";
            } else {
                std::cout << preset(preset_name).to_config_text();
            }
            return 0;
        }
        if (validate->parsed()) {
            std::cout << validate_flags.resolve().to_config_text();
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error";
        if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
        std::cerr << ": " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
