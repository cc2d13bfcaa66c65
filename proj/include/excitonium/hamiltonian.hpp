#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <istream>

namespace excitonium {

/// Real symmetric single-excitation Hamiltonian in the site basis, cm^-1.
/// Diagonal entries are site energies, off-diagonal entries are couplings.
class ElectronicHamiltonian {
public:
    /// Throws std::invalid_argument unless `matrix` is square, finite and
    /// symmetric within 1e-9 cm^-1. The stored matrix is exactly symmetric.
    explicit ElectronicHamiltonian(const Eigen::MatrixXd& matrix);

    int n_sites() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    /// Zero-based element access.
    double operator()(int i, int j) const { return matrix_(i, j); }

private:
    Eigen::MatrixXd matrix_;
};

/// Seven-site FMO monomer (Chlorobium tepidum), lowest site energy shifted to zero.
ElectronicHamiltonian build_fmo_hamiltonian();

/// Whitespace-separated rows of cm^-1 values; '#' starts a comment.
ElectronicHamiltonian read_hamiltonian(std::istream& in);
ElectronicHamiltonian load_hamiltonian(const std::filesystem::path& path);

/// Eigenbasis of the electronic Hamiltonian (Frenkel excitons).
struct ExcitonDecomposition {
    Eigen::VectorXd energies;  ///< ascending, cm^-1
    Eigen::MatrixXd vectors;   ///< columns are excitons in the site basis

    int size() const { return static_cast<int>(energies.size()); }

    /// V^T rho V
    Eigen::MatrixXcd to_exciton(const Eigen::MatrixXcd& site_matrix) const;
    /// V rho V^T
    Eigen::MatrixXcd to_site(const Eigen::MatrixXcd& exciton_matrix) const;
    /// V diag(E) V^T
    Eigen::MatrixXd reconstruct() const;
};

/// Ascending eigenvalues; ties keep the solver's column order. Each
/// eigenvector is signed so that its largest-magnitude component is positive.
/// Throws std::invalid_argument on non-finite input.
ExcitonDecomposition exciton_decomposition(const ElectronicHamiltonian& hamiltonian);
ExcitonDecomposition exciton_decomposition(const Eigen::MatrixXd& symmetric);

}  // namespace excitonium
