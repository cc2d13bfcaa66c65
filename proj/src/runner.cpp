#include "excitonium/runner.hpp"

#include "excitonium/parallel.hpp"
#include "excitonium/redfield.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace excitonium {

Trajectory run_scenario(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    const ElectronicHamiltonian h = scenario.load_hamiltonian();
    const int n = h.n_sites();
    const auto rho0 = site_state(scenario.initial_site, n);
    const auto baths = scenario.site_baths(n);
    const auto grid = scenario.time_grid();
    const auto trapping = scenario.effective_trapping();

    if (scenario.solver == SolverKind::heom) {
        HeomOptions heom;
        heom.depth = scenario.depth;
        heom.terminator = scenario.terminator;
        heom.workers = options.workers;
        return propagate_heom(h, baths, trapping, rho0, grid, heom, scenario.integrator, options.validity);
    }
    const bool full = scenario.solver == SolverKind::redfield_full;
    ValidityTolerances validity = options.validity;
    if (full) validity.negativity = std::max(validity.negativity, redfield_full_negativity);
    const auto tensor = build_redfield_tensor(h, baths);
    return propagate_redfield(tensor, trapping, rho0, grid, full ? RedfieldVariant::full : RedfieldVariant::secular,
                              scenario.integrator, validity);
}

RunRecord run_recorded(const Scenario& scenario, const RunOptions& options) {
    RunRecord r;
    try {
        r.trajectory = run_scenario(scenario, options);
    } catch (const PropagationFailure& e) {
        r.trajectory = e.partial();
        r.complete = false;
        r.failure = e.what();
    } catch (const IntegrationError& e) {
        r.trajectory.solver = to_string(scenario.solver);
        r.complete = false;
        r.failure = e.what();
    }
    return r;
}

namespace {
constexpr double record_negativity_note = 1e-6;
}

std::vector<std::string> run_metadata(const Scenario& scenario, const RunRecord& record) {
    std::vector<std::string> lines;
    lines.push_back("excitonium trajectory");
    lines.push_back("solver: " + to_string(scenario.solver));
    if (record.complete) {
        lines.push_back("status: complete");
    } else {
        lines.push_back("status: PARTIAL (" + record.failure + ")");
    }
    double min_eig = 0.0, at = 0.0;
    for (std::size_t i = 0; i < record.trajectory.size(); ++i) {
        const double m = validate_state(record.trajectory.states[i]).min_eigenvalue;
        if (m < min_eig) min_eig = m, at = record.trajectory.times[i];
    }
    if (min_eig < -record_negativity_note) {
        lines.push_back("positivity: min eigenvalue " + format_number(min_eig) + " at t = " + format_number(at) +
                        " fs (entropies clamp negative eigenvalues to 0)");
    }
    std::istringstream cfg(scenario.to_config_text());
    for (std::string line; std::getline(cfg, line);) lines.push_back(line);
    return lines;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string run_csv(const Scenario& scenario, const RunRecord& record) {
    std::ostringstream out;
    write_trajectory_csv(out, record.trajectory, run_metadata(scenario, record));
    return out.str();
}

int count_local_maxima(const std::vector<double>& times, const std::vector<double>& values, double t_max,
                       double min_prominence) {
    std::size_t end = 0;
    while (end < times.size() && times[end] <= t_max) ++end;
    int count = 0;
    for (std::size_t i = 1; i + 1 < end; ++i) {
        if (!(values[i] > values[i - 1] && values[i] >= values[i + 1])) continue;
        double left_min = values[i];
        for (std::size_t k = i; k-- > 0;) {
            if (values[k] > values[i]) break;
            left_min = std::min(left_min, values[k]);
        }
        double right_min = values[i];
        for (std::size_t k = i + 1; k < end; ++k) {
            if (values[k] > values[i]) break;
            right_min = std::min(right_min, values[k]);
        }
        if (values[i] - std::max(left_min, right_min) >= min_prominence) ++count;
    }
    return count;
}

namespace {

std::optional<double> value_at(const Trajectory& t, double probe) {
    if (t.size() == 0) return std::nullopt;
    const double spacing = t.size() > 1 ? t.times[1] - t.times[0] : 0.0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t.times[i] - probe) < std::abs(t.times[best] - probe)) best = i;
    }
    if (std::abs(t.times[best] - probe) > 0.5 * spacing + 1e-9) return std::nullopt;
    return t.reports[best].global_E;
}

SolverSummary summarize(const std::string& label, const Trajectory& t) {
    SolverSummary s;
    s.label = label;
    const auto e = t.global_entanglement();
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > s.peak_E) {
            s.peak_E = e[i];
            s.peak_time = t.times[i];
        }
    }
    for (double p : probe_times()) s.probe_E.push_back(value_at(t, p));
    s.local_maxima = count_local_maxima(t.times, e, 500.0, default_maximum_prominence);
    return s;
}

std::string summary_text(const std::vector<SolverSummary>& summary) {
    std::ostringstream o;
    o << "solver,peak_E,peak_time_fs,local_maxima_0_500fs";
    for (double p : probe_times()) o << ",E_at_" << format_number(p) << "fs";
    o << "\n";
    for (const auto& s : summary) {
        o << s.label << "," << format_number(s.peak_E) << "," << format_number(s.peak_time) << "," << s.local_maxima;
        for (const auto& v : s.probe_E) o << "," << (v ? format_number(*v) : std::string("n/a"));
        o << "\n";
    }
    o << "\nordering by E at probe times:\n";
    for (std::size_t p = 0; p < probe_times().size(); ++p) {
        std::vector<std::pair<double, std::string>> at;
        for (const auto& s : summary) {
            if (s.probe_E[p]) at.emplace_back(*s.probe_E[p], s.label);
        }
        o << "  t = " << format_number(probe_times()[p]) << " fs: ";
        if (at.empty()) {
            o << "beyond horizon\n";
            continue;
        }
        std::stable_sort(at.begin(), at.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; i < at.size(); ++i) {
            if (i > 0) o << (at[i - 1].first == at[i].first ? " = " : " > ");
            o << at[i].second;
        }
        o << "\n";
    }
    return o.str();
}

/// Runs `count` jobs on up to `threads` threads; job i writes only slot i.
template <typename Job>
void run_jobs(std::size_t count, int threads, Job job) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

bool ComparisonResult::complete() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.complete; });
}

ComparisonResult compare_solvers(const Scenario& scenario, const std::vector<SolverKind>& solvers,
                                 const RunOptions& options) {
    if (solvers.size() < 2) throw ConfigError("compare needs at least two solvers", 0, "solver");
    scenario.validate();

    ComparisonResult result;
    std::map<std::string, int> seen;
    for (SolverKind s : solvers) {
        const std::string base = to_string(s);
        const int k = ++seen[base];
        result.labels.push_back(k == 1 ? base : base + "." + std::to_string(k));
    }

    // HEOM parallelizes internally; the Redfield runs are cheap.
    result.runs.resize(solvers.size());
    for (std::size_t i = 0; i < solvers.size(); ++i) {
        Scenario s = scenario;
        s.solver = solvers[i];
        result.runs[i] = run_recorded(s, options);
    }

    const int n = scenario.load_hamiltonian().n_sites();
    std::ostringstream csv;
    csv << "# excitonium solver comparison\n";
    for (std::size_t i = 0; i < solvers.size(); ++i) {
        csv << "# " << result.labels[i] << ": "
            << (result.runs[i].complete ? "complete" : "PARTIAL (" + result.runs[i].failure + ")") << "\n";
    }
    std::istringstream cfg(scenario.to_config_text());
    for (std::string line; std::getline(cfg, line);) {
        if (line.rfind("name = ", 0) == 0) continue;  // solver differs per column
        csv << "# " << line << "\n";
    }
    csv << "t_fs";
    for (const auto& label : result.labels) {
        csv << ",E[" << label << "],W[" << label << "],trace[" << label << "]";
        for (int i = 1; i <= n; ++i) csv << ",rho_" << i << "_" << i << "[" << label << "]";
    }
    csv << "\n";
    std::size_t rows = 0;
    for (const auto& r : result.runs) rows = std::max(rows, r.trajectory.size());
    const Trajectory* longest = nullptr;
    for (const auto& r : result.runs) {
        if (r.trajectory.size() == rows) longest = &r.trajectory;
    }
    for (std::size_t k = 0; k < rows; ++k) {
        csv << format_number(longest->times[k]);
        for (const auto& r : result.runs) {
            const auto& t = r.trajectory;
            if (k < t.size()) {
                csv << "," << format_number(t.reports[k].global_E) << "," << format_number(t.reports[k].witness_W)
                    << "," << format_number(t.reports[k].trace);
                for (int i = 0; i < n; ++i) csv << "," << format_number(t.states[k](i, i).real());
            } else {
                for (int i = 0; i < n + 3; ++i) csv << ",";
            }
        }
        csv << "\n";
    }
    result.table_csv = csv.str();

    for (std::size_t i = 0; i < solvers.size(); ++i) {
        result.summary.push_back(summarize(result.labels[i], result.runs[i].trajectory));
    }
    result.summary_text = summary_text(result.summary);
    return result;
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::temperature: return "temperature";
        case SweepAxis::initial_site: return "initial_site";
        case SweepAxis::depth: return "depth";
    }
    return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "temperature") return SweepAxis::temperature;
    if (name == "initial_site" || name == "site") return SweepAxis::initial_site;
    if (name == "depth") return SweepAxis::depth;
    throw ConfigError("unknown sweep axis '" + name + "' (expected temperature, initial_site or depth)", 0, "axis");
}

Scenario with_axis_value(const Scenario& base, SweepAxis axis, double value) {
    Scenario s = base;
    const auto as_int = [&](const char* field) {
        if (value != std::floor(value) || std::abs(value) > 1e6) {
            throw ConfigError(format_number(value) + " is not an integer", 0, field);
        }
        return static_cast<int>(value);
    };
    switch (axis) {
        case SweepAxis::temperature: s.temperature = value; break;
        case SweepAxis::initial_site: s.initial_site = as_int("system.initial_site"); break;
        case SweepAxis::depth: s.depth = as_int("hierarchy.depth"); break;
    }
    s.validate();
    return s;
}

bool SweepResult::complete() const {
    return std::all_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return e.record.complete; });
}

SweepResult run_sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
                      const std::filesystem::path& out_dir, const RunOptions& options, int parallel_runs) {
    if (values.empty()) throw ConfigError("sweep needs at least one value", 0, "values");
    std::vector<Scenario> scenarios;
    for (double v : values) scenarios.push_back(with_axis_value(base, axis, v));

    SweepResult result;
    result.entries.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        result.entries[i].value = format_number(values[i]);
        result.entries[i].file = to_string(axis) + "_" + result.entries[i].value + ".csv";
    }

    const int threads = parallel_runs > 0 ? parallel_runs : configured_worker_count();
    RunOptions per_run = options;
    if (threads > 1 && values.size() > 1) per_run.workers = 1;  // parallel across runs instead
    run_jobs(values.size(), threads, [&](std::size_t i) {
        auto& entry = result.entries[i];
        entry.record = run_recorded(scenarios[i], per_run);
        write_file_atomic(out_dir / entry.file, run_csv(scenarios[i], entry.record));
    });

    if (axis == SweepAxis::depth) {
        std::ostringstream table;
        table << "from_depth,to_depth,n_matsubara,max_E_deviation,max_population_deviation\n";
        for (std::size_t i = 1; i < result.entries.size(); ++i) {
            const auto& a = result.entries[i - 1].record;
            const auto& b = result.entries[i].record;
            if (!a.complete || !b.complete) continue;
            ConvergenceRow row = compare_trajectories(a.trajectory, b.trajectory);
            row.from = {scenarios[i - 1].depth, scenarios[i - 1].resolved_matsubara()};
            row.to = {scenarios[i].depth, scenarios[i].resolved_matsubara()};
            table << row.from.depth << "," << row.to.depth << "," << row.to.n_matsubara << ","
                  << format_number(row.max_entanglement_deviation) << ","
                  << format_number(row.max_population_deviation) << "\n";
            result.convergence.push_back(row);
        }
        write_file_atomic(out_dir / "convergence.csv", table.str());
    }

    std::ostringstream manifest;
    manifest << "axis,value,file,status\n";
    for (const auto& e : result.entries) {
        manifest << to_string(axis) << "," << e.value << "," << e.file.string() << ","
                 << (e.record.complete ? "complete" : "partial") << "\n";
    }
    write_file_atomic(out_dir / "manifest.csv", manifest.str());
    return result;
}

}  // namespace excitonium
