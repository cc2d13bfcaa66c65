#pragma once

#include "excitonium/hamiltonian.hpp"
#include "excitonium/state.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitonium {

enum class IntegrationMethod { rk4, adaptive45 };

std::string to_string(IntegrationMethod m);
IntegrationMethod parse_integration_method(const std::string& name);

struct IntegratorOptions {
    IntegrationMethod method = IntegrationMethod::rk4;
    double dt = 1.0;  ///< fs, fixed step (upper bound per grid interval)
    double rtol = 1e-8;
    double atol = 1e-10;
    double dt_min = 1e-6;  ///< fs
    double dt_max = 5.0;   ///< fs
    int record_stride = 1;  ///< observer sees every record_stride-th grid point (and the last)

    void validate() const;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using StateVector = Eigen::VectorXcd;
/// dydt = f(t, y). Must be deterministic; dydt is pre-sized.
using RhsFunction = std::function<void(double t, const StateVector& y, StateVector& dydt)>;
/// Called at each recorded grid point; may throw to abort the integration.
using Observer = std::function<void(std::size_t grid_index, double t, const StateVector& y)>;

/// Integrates from t_grid[0] and lands exactly on every grid point. RK4 splits
/// each interval into equal steps no longer than opts.dt; adaptive45
/// (Dormand-Prince) clips its steps at grid points instead of interpolating.
void integrate(const RhsFunction& rhs, StateVector y0, std::span<const double> t_grid, const IntegratorOptions& opts,
               const Observer& observe);

/// Convenience overload returning the state at every recorded grid point.
std::vector<StateVector> integrate(const RhsFunction& rhs, StateVector y0, std::span<const double> t_grid,
                                   const IntegratorOptions& opts);

/// out = base + scale * A v for a linear, time-independent generator A. `out`
/// may alias `base` but not `v`.
using LinearStage = std::function<void(const StateVector& v, const StateVector& base, double scale, StateVector& out)>;

/// Classical RK4 for dy/dt = A y, evaluated as the nested degree-4 Taylor
/// polynomial y + hA(y + h/2 A(y + h/3 A(y + h/4 A y))): four fused passes
/// and three state vectors per step. Same stepping and observer semantics as
/// integrate() with method rk4.
void integrate_linear_rk4(const LinearStage& stage, StateVector y0, std::span<const double> t_grid,
                          const IntegratorOptions& opts, const Observer& observe);

/// 0, spacing, 2*spacing, ... up to and including horizon (when it divides).
/// Times are computed as index * spacing so reruns are bit-identical.
std::vector<double> make_time_grid(double horizon_fs, double spacing_fs);

/// exp(-iHt) rho0 exp(iHt) through the exciton decomposition; t in fs.
SingleExcitationState unitary_oracle(const ElectronicHamiltonian& h, const SingleExcitationState& rho0, double t_fs);

}  // namespace excitonium
