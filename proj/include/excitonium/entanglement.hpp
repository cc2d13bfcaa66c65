#pragma once

#include "excitonium/state.hpp"

#include <Eigen/Dense>

namespace excitonium {

/// Default threshold for boolean entanglement decisions.
inline constexpr double default_entanglement_tol = 1e-10;
/// Eigenvalues in [-slack, 0) are treated as exact zeros by the entropies.
inline constexpr double default_eigenvalue_slack = 1e-9;

/// Thrown when a state has an eigenvalue below the allowed slack.
class InvalidStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// C_ij = 2|rho_ij| for 1-based sites i != j.
double concurrence(const SingleExcitationState& rho, int site_i, int site_j);

/// Symmetric matrix of all pairwise concurrences, zero diagonal.
Eigen::MatrixXd concurrence_matrix(const SingleExcitationState& rho);

/// Sum of all coherence magnitudes; positive exactly when rho is entangled.
double witness(const SingleExcitationState& rho);

/// true iff some |rho_ij| (i != j) exceeds `tol`.
bool is_entangled(const SingleExcitationState& rho, double tol = default_entanglement_tol);

/// diag(rho_11, ..., rho_NN): the separable state minimizing S(rho || sigma)
/// among diagonal sigma with tr sigma = tr rho.
SingleExcitationState closest_separable(const SingleExcitationState& rho);

/// -tr rho ln rho in nats, with 0 ln 0 = 0. Throws InvalidStateError when an
/// eigenvalue lies below -slack.
double von_neumann_entropy(const SingleExcitationState& rho, double slack = default_eigenvalue_slack);

/// -sum rho_ii ln rho_ii, the entropy of the dephased state.
double diagonal_entropy(const SingleExcitationState& rho, double slack = default_eigenvalue_slack);

/// E[rho] = -sum rho_ii ln rho_ii - S(rho), in nats. No renormalization.
double global_entanglement(const SingleExcitationState& rho, double slack = default_eigenvalue_slack);

/// S(rho || sigma) = tr(rho ln rho - rho ln sigma). Returns +infinity when the
/// support of rho is not contained in the support of sigma.
double relative_entropy(const SingleExcitationState& rho, const SingleExcitationState& sigma,
                        double slack = default_eigenvalue_slack);

struct EntanglementReport {
    double global_E = 0.0;
    double witness_W = 0.0;
    Eigen::MatrixXd pairwise;  ///< concurrences C_ij, zero diagonal
    bool is_entangled = false;
    double trace = 0.0;
};

EntanglementReport entanglement_report(const SingleExcitationState& rho, double tol = default_entanglement_tol,
                                       double slack = default_eigenvalue_slack);

}  // namespace excitonium
