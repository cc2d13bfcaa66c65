#pragma once

#include "excitonium/bath.hpp"
#include "excitonium/hamiltonian.hpp"
#include "excitonium/hierarchy.hpp"
#include "excitonium/parallel.hpp"
#include "excitonium/propagation.hpp"
#include "excitonium/state.hpp"
#include "excitonium/trajectory.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

namespace excitonium {

/// Irreversible loss from one site into the reaction center. Implemented as
/// -(rate/2){|s><s|, rho}: population of `site` decays at `rate`, its
/// coherences at rate/2.
struct TrappingSpec {
    int site = 3;                 ///< 1-based; 0 disables trapping
    double rate = 1.0 / 4000.0;   ///< fs^-1

    bool enabled() const { return site > 0 && rate > 0.0; }
    void validate(int n_sites) const;
    static TrappingSpec none() { return {0, 0.0}; }
};

struct HeomOptions {
    int depth = 4;          ///< truncation depth N_c
    bool terminator = true; ///< Markovian closure for the omitted Matsubara terms
    std::size_t max_ados = Hierarchy::default_max_ados;
    int workers = 0;        ///< 0: configured_worker_count()
    /// Every ADO stays Hermitian for Hermitian initial data (all expansion
    /// rates are real), so only upper triangles are evaluated. Disable to
    /// use the general kernel on arbitrary hierarchy vectors.
    bool hermitian_kernel = true;
};

/// The same bath on every site.
std::vector<BathSpec> uniform_baths(const BathSpec& bath, int n_sites);

/// Flattened family of auxiliary density operators. ADO `o` occupies
/// entries [o*N*N, (o+1)*N*N) as a row-major N x N block; ordinal 0 is the
/// physical density matrix.
struct HierarchyState {
    std::shared_ptr<const Hierarchy> hierarchy;
    Eigen::VectorXcd data;

    int n_sites() const { return hierarchy->n_sites(); }
    Eigen::Map<const Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> ado(
        std::size_t ordinal) const;
    SingleExcitationState physical() const;
};

/// Drude-Lorentz hierarchy for independent site baths (coupling operators
/// V_j = |j><j|) with optional Matsubara terminator and trapping sink.
/// All site baths must share n_matsubara and temperature-independent layout.
class HeomModel {
public:
    HeomModel(const ElectronicHamiltonian& h, std::vector<BathSpec> site_baths, TrappingSpec trapping,
              HeomOptions options = {});
    ~HeomModel();
    HeomModel(const HeomModel&) = delete;
    HeomModel& operator=(const HeomModel&) = delete;

    const Hierarchy& hierarchy() const { return *hierarchy_; }
    int n_sites() const { return n_; }

    /// Physical ADO = rho0, all auxiliaries zero (factorized initial state).
    /// With the Hermitian kernel rho0 must be Hermitian within 1e-12; it is
    /// stored exactly Hermitian.
    HierarchyState initial_state(const SingleExcitationState& rho0) const;

    /// d/dt of the flattened hierarchy; `dydt` is resized as needed.
    void rhs(const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) const;

    /// out = base + scale * rhs(v) in one pass; `out` may alias `base` but
    /// not `v`. Both must be sized like the hierarchy state.
    void stage(const Eigen::VectorXcd& v, const Eigen::VectorXcd& base, double scale, Eigen::VectorXcd& out) const;

    SingleExcitationState physical(const Eigen::VectorXcd& y) const;

    /// Per-site terminator weights actually applied, fs^-1.
    const std::vector<double>& terminator_rates() const { return delta_; }

private:
    template <int FixedN>
    void rhs_range(const complex* y, complex* dy, std::size_t begin, std::size_t end) const;
    template <int FixedN, bool Axpy>
    void rhs_range_hermitian(const complex* y, complex* dy, const complex* base, double scale, std::size_t begin,
                             std::size_t end) const;
    void check_size(const Eigen::VectorXcd& y) const;

    int n_;
    std::shared_ptr<const Hierarchy> hierarchy_;
    std::vector<double> h_;               // row-major, rad/fs
    std::vector<double> decay_;           // row-major elementwise decay, fs^-1
    std::vector<complex> c_;              // per mode, fs^-2
    std::vector<double> ado_damping_;     // per ADO sum n_m nu_m, fs^-1
    std::vector<double> delta_;           // per site, fs^-1
    struct Lowering {
        std::int32_t target;  // ordinal of n - e_m
        std::int32_t site;
        complex weight;       // n_m c_m
    };
    std::vector<std::size_t> lower_begin_;  // per ADO offset into lowerings_, plus end
    std::vector<Lowering> lowerings_;
    mutable Eigen::VectorXcd scratch_;  // general-kernel stage()
    bool hermitian_;
    std::unique_ptr<WorkerPool> pool_;
};

/// One-shot derivative of a hierarchy state (builds a model each call).
HierarchyState heom_rhs(const HierarchyState& state, const ElectronicHamiltonian& h,
                        const std::vector<BathSpec>& site_baths, const TrappingSpec& trapping,
                        bool terminator = true);

/// Propagates rho0 over `t_grid` (fs, ascending from 0), recording the
/// physical ADO and its entanglement report at each recorded point. Throws
/// PropagationFailure when a recorded state leaves `validity`.
Trajectory propagate_heom(const ElectronicHamiltonian& h, const std::vector<BathSpec>& site_baths,
                          const TrappingSpec& trapping, const SingleExcitationState& rho0,
                          const std::vector<double>& t_grid, const HeomOptions& heom = {},
                          const IntegratorOptions& integrator = {}, const ValidityTolerances& validity = {});

/// One hierarchy setting of a convergence scan.
struct HierarchySetting {
    int depth = 4;
    int n_matsubara = 0;
};

struct ConvergenceRow {
    HierarchySetting from;
    HierarchySetting to;
    double max_entanglement_deviation = 0.0;  ///< sup_t |E_from(t) - E_to(t)|
    double max_population_deviation = 0.0;    ///< sup_t max_i |rho_ii,from - rho_ii,to|
};

/// Maximum pointwise deviations between two trajectories on the same grid.
ConvergenceRow compare_trajectories(const Trajectory& a, const Trajectory& b);

/// Runs every setting and compares each with its successor. `depths` are
/// scanned at k_values.front(); `k_values` are then scanned at depths.back().
/// Needs at least two settings in total.
std::vector<ConvergenceRow> convergence_scan(const ElectronicHamiltonian& h, const BathSpec& bath,
                                             const TrappingSpec& trapping, const SingleExcitationState& rho0,
                                             const std::vector<double>& t_grid, const std::vector<int>& depths,
                                             const std::vector<int>& k_values, const HeomOptions& heom = {},
                                             const IntegratorOptions& integrator = {});

}  // namespace excitonium
