#pragma once

#include "excitonium/entanglement.hpp"
#include "excitonium/state.hpp"

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitonium {

/// Recorded time points of one propagation with the site-basis state and
/// its entanglement report at each point.
struct Trajectory {
    std::string solver;
    std::vector<double> times;  ///< fs
    std::vector<SingleExcitationState> states;
    std::vector<EntanglementReport> reports;

    std::size_t size() const { return times.size(); }
    int n_sites() const { return states.empty() ? 0 : states.front().n_sites(); }

    /// Population no longer in the single-excitation block, 1 - tr rho.
    double trapped_population(std::size_t i) const { return 1.0 - reports[i].trace; }

    std::vector<double> global_entanglement() const;
    std::vector<double> concurrence(int site_i, int site_j) const;  ///< 1-based
    std::vector<double> population(int site) const;                  ///< 1-based
    std::vector<double> traces() const;

    void append(double t, SingleExcitationState rho, double entanglement_tol, double eigenvalue_slack);
};

/// Tolerances checked at every recorded point of a propagation.
struct ValidityTolerances {
    double hermiticity = 1e-8;
    double negativity = 1e-6;   ///< also the eigenvalue clamp for the entropies
    double trace_excess = 1e-6;
    double entanglement_tol = default_entanglement_tol;
};

/// Thrown when a propagated state leaves the tolerances; carries the
/// trajectory recorded up to and including the offending point.
class PropagationFailure : public std::runtime_error {
public:
    PropagationFailure(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

/// Validates rho against `tol` and appends it; throws PropagationFailure
/// (with the point appended) on a violation.
void record_checked(Trajectory& traj, double t, SingleExcitationState rho, const ValidityTolerances& tol);

/// Shortest round-trip decimal text for a double; identical bits give
/// identical text.
std::string format_number(double v);

/// Trajectory CSV: t_fs, trace, E, W, rho_i_i..., re_rho_i_j, im_rho_i_j
/// (i<j)..., C_i_j (i<j)...
std::string trajectory_csv_header(int n_sites);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& metadata = {});

/// Flat entanglement record: t, trace, E, W, C_i_j for i<j in row-major order.
std::string entanglement_csv_header(int n_sites);
std::string entanglement_csv_row(double t, const EntanglementReport& report);

}  // namespace excitonium
