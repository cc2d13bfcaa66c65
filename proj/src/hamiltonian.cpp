#include "excitonium/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitonium {

ElectronicHamiltonian::ElectronicHamiltonian(const Eigen::MatrixXd& matrix) : matrix_(matrix) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw std::invalid_argument("Hamiltonian must be a non-empty square matrix");
    }
    if (!matrix_.allFinite()) {
        throw std::invalid_argument("Hamiltonian contains non-finite entries");
    }
    const Eigen::Index n = matrix_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(matrix_(i, j) - matrix_(j, i)) > 1e-9) {
                std::ostringstream msg;
                msg << "Hamiltonian is not symmetric at (" << i + 1 << "," << j + 1 << "): " << matrix_(i, j)
                    << " vs " << matrix_(j, i);
                throw std::invalid_argument(msg.str());
            }
            matrix_(j, i) = matrix_(i, j);
        }
    }
}

ElectronicHamiltonian build_fmo_hamiltonian() {
    Eigen::MatrixXd h(7, 7);
    // clang-format off
    h <<  200.0, -87.7,   5.5,  -5.9,   6.7, -13.7,  -9.9,
          -87.7, 320.0,  30.8,   8.2,   0.7,  11.8,   4.3,
            5.5,  30.8,   0.0, -53.5,  -2.2,  -9.6,   6.0,
           -5.9,   8.2, -53.5, 110.0, -70.7, -17.0, -63.3,
            6.7,   0.7,  -2.2, -70.7, 270.0,  81.1,  -1.3,
          -13.7,  11.8,  -9.6, -17.0,  81.1, 420.0,  39.7,
           -9.9,   4.3,   6.0, -63.3,  -1.3,  39.7, 230.0;
    // clang-format on
    return ElectronicHamiltonian(h);
}

ElectronicHamiltonian read_hamiltonian(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(token, &used));
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": not a number: '" + token + "'");
            }
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
            row_lines.push_back(line_no);
        }
    }
    const auto n = rows.size();
    if (n == 0) throw std::invalid_argument("Hamiltonian file contains no rows");
    Eigen::MatrixXd h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw std::invalid_argument("line " + std::to_string(row_lines[i]) + ": row " + std::to_string(i + 1) + " has " +
                                        std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) h(i, j) = rows[i][j];
    }
    return ElectronicHamiltonian(h);
}

ElectronicHamiltonian load_hamiltonian(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open Hamiltonian file " + path.string());
    return read_hamiltonian(in);
}

Eigen::MatrixXcd ExcitonDecomposition::to_exciton(const Eigen::MatrixXcd& site_matrix) const {
    const Eigen::MatrixXcd v = vectors.cast<std::complex<double>>();
    return v.transpose() * site_matrix * v;
}

Eigen::MatrixXcd ExcitonDecomposition::to_site(const Eigen::MatrixXcd& exciton_matrix) const {
    const Eigen::MatrixXcd v = vectors.cast<std::complex<double>>();
    return v * exciton_matrix * v.transpose();
}

Eigen::MatrixXd ExcitonDecomposition::reconstruct() const {
    return vectors * energies.asDiagonal() * vectors.transpose();
}

ExcitonDecomposition exciton_decomposition(const Eigen::MatrixXd& symmetric) {
    if (symmetric.rows() != symmetric.cols()) throw std::invalid_argument("exciton_decomposition: non-square input");
    if (!symmetric.allFinite()) throw std::invalid_argument("exciton_decomposition: non-finite input");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    if (solver.info() != Eigen::Success) throw std::runtime_error("exciton_decomposition: eigensolver failed");

    const Eigen::Index n = symmetric.rows();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values(a) < values(b); });

    ExcitonDecomposition out;
    out.energies.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        out.energies(c) = values(order[c]);
        Eigen::VectorXd v = solver.eigenvectors().col(order[c]);
        Eigen::Index pivot = 0;
        for (Eigen::Index r = 1; r < n; ++r) {
            if (std::abs(v(r)) > std::abs(v(pivot)) + 1e-12) pivot = r;
        }
        if (v(pivot) < 0.0) v = -v;
        out.vectors.col(c) = v;
    }
    return out;
}

ExcitonDecomposition exciton_decomposition(const ElectronicHamiltonian& hamiltonian) {
    return exciton_decomposition(hamiltonian.matrix());
}

}  // namespace excitonium
