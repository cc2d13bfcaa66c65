#include "excitonium/trajectory.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace excitonium {

std::vector<double> Trajectory::global_entanglement() const {
    std::vector<double> out;
    out.reserve(reports.size());
    for (const auto& r : reports) out.push_back(r.global_E);
    return out;
}

std::vector<double> Trajectory::concurrence(int site_i, int site_j) const {
    std::vector<double> out;
    out.reserve(reports.size());
    for (const auto& r : reports) out.push_back(r.pairwise(site_i - 1, site_j - 1));
    return out;
}

std::vector<double> Trajectory::population(int site) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s(site - 1, site - 1).real());
    return out;
}

std::vector<double> Trajectory::traces() const {
    std::vector<double> out;
    out.reserve(reports.size());
    for (const auto& r : reports) out.push_back(r.trace);
    return out;
}

void Trajectory::append(double t, SingleExcitationState rho, double entanglement_tol, double eigenvalue_slack) {
    reports.push_back(entanglement_report(rho, entanglement_tol, eigenvalue_slack));
    times.push_back(t);
    states.push_back(std::move(rho));
}

void record_checked(Trajectory& traj, double t, SingleExcitationState rho, const ValidityTolerances& tol) {
    const auto diag = validate_state(rho);
    StateTolerances st;
    st.hermiticity = tol.hermiticity;
    st.negativity = tol.negativity;
    st.trace_excess = tol.trace_excess;
    auto problem = describe_violations(diag, st);
    if (problem.empty()) {
        traj.append(t, std::move(rho), tol.entanglement_tol, tol.negativity);
        return;
    }
    // Keep the offending point in the partial record; the entropy clamp is
    // widened so the report itself cannot throw.
    traj.append(t, std::move(rho), tol.entanglement_tol, std::max(tol.negativity, -diag.min_eigenvalue));
    std::ostringstream msg;
    msg << traj.solver << ": state left tolerance at t = " << t << " fs (" << problem
        << "); increase hierarchy depth or reduce the step";
    throw PropagationFailure(msg.str(), traj);
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), end);
}

std::string trajectory_csv_header(int n) {
    std::ostringstream h;
    h << "t_fs,trace,E,W";
    for (int i = 1; i <= n; ++i) h << ",rho_" << i << '_' << i;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) h << ",re_rho_" << i << '_' << j << ",im_rho_" << i << '_' << j;
    }
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) h << ",C_" << i << '_' << j;
    }
    return h.str();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) out << "# " << line << '\n';
    const int n = traj.n_sites();
    out << trajectory_csv_header(n) << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& rho = traj.states[k];
        const auto& rep = traj.reports[k];
        out << format_number(traj.times[k]) << ',' << format_number(rep.trace) << ','
            << format_number(rep.global_E) << ',' << format_number(rep.witness_W);
        for (int i = 0; i < n; ++i) out << ',' << format_number(rho(i, i).real());
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                out << ',' << format_number(rho(i, j).real()) << ',' << format_number(rho(i, j).imag());
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) out << ',' << format_number(rep.pairwise(i, j));
        }
        out << '\n';
    }
}

std::string entanglement_csv_header(int n) {
    std::ostringstream h;
    h << "t,trace,E,W";
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) h << ",C_" << i << '_' << j;
    }
    return h.str();
}

std::string entanglement_csv_row(double t, const EntanglementReport& report) {
    std::ostringstream row;
    row << format_number(t) << ',' << format_number(report.trace) << ',' << format_number(report.global_E) << ','
        << format_number(report.witness_W);
    const auto n = report.pairwise.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) row << ',' << format_number(report.pairwise(i, j));
    }
    return row.str();
}

}  // namespace excitonium
