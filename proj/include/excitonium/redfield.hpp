#pragma once

#include "excitonium/bath.hpp"
#include "excitonium/hamiltonian.hpp"
#include "excitonium/heom.hpp"
#include "excitonium/propagation.hpp"
#include "excitonium/state.hpp"
#include "excitonium/trajectory.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace excitonium {

enum class RedfieldVariant { full, secular };

std::string to_string(RedfieldVariant v);

/// Default gap tolerance for the secular approximation, cm^-1.
inline constexpr double default_secular_cutoff = 1e-6;

/// Markovian Redfield generator in the exciton basis. Acts on row-major
/// vectorized exciton-basis density matrices, index(a, b) = a * N + b, in
/// fs^-1 (coherent part included). secular_mask(ab, cd) is true when the
/// Bohr frequencies of (a, b) and (c, d) agree within the cutoff.
struct RedfieldTensor {
    ExcitonDecomposition basis;
    Eigen::MatrixXcd tensor;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> secular_mask;
    bool secularized = false;

    int n_sites() const { return basis.size(); }
};

/// -i[H, .] alone, in the same layout as RedfieldTensor::tensor.
Eigen::MatrixXcd coherent_generator(const ExcitonDecomposition& basis);

/// Standard second-order tensor for independent site baths (V_j = |j><j|),
/// using the one-sided bath transform at each exciton gap: real part
/// S(omega) / 2 with S(omega) = 2 J(omega) / (1 - exp(-beta omega)), imaginary
/// part the Lamb shift (dropped when `lamb_shift` is false).
RedfieldTensor build_redfield_tensor(const ElectronicHamiltonian& h, const std::vector<BathSpec>& site_baths,
                                     double secular_cutoff = default_secular_cutoff, bool lamb_shift = true);

/// Zeroes every element outside the secular mask. Idempotent.
RedfieldTensor secularize(const RedfieldTensor& tensor);

/// Superoperator of -(rate/2){|s><s|, .} in the exciton basis of `basis`.
Eigen::MatrixXcd trapping_generator(const ExcitonDecomposition& basis, const TrappingSpec& trapping);

/// Propagates a site-basis rho0. The secular variant secularizes the tensor
/// if needed; trapping is added unsecularized in both variants.
Trajectory propagate_redfield(const RedfieldTensor& tensor, const TrappingSpec& trapping,
                              const SingleExcitationState& rho0, const std::vector<double>& t_grid,
                              RedfieldVariant variant, const IntegratorOptions& integrator = {},
                              const ValidityTolerances& validity = {});

/// V diag(exp(-beta E_a)) V^T scaled to trace `norm`, in the site basis.
SingleExcitationState gibbs_state(const ElectronicHamiltonian& h, double temperature_K, double norm = 1.0);

/// Row-major vectorization helpers (exciton or site basis alike).
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int n);

}  // namespace excitonium
