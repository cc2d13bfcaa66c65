#pragma once

#include "excitonium/state.hpp"

#include <Eigen/Dense>

#include <random>

namespace test_support {

using excitonium::complex;
using excitonium::SingleExcitationState;

/// Random density matrix of rank <= `rank` with trace uniform in (0.2, 1].
inline SingleExcitationState random_state(int n, std::mt19937_64& rng, int rank = -1) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.2, 1.0);
    const int r = rank > 0 ? rank : n;
    Eigen::MatrixXcd a(n, r);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < r; ++j) a(i, j) = complex(g(rng), g(rng));
    }
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho *= u(rng) / rho.trace().real();
    return SingleExcitationState(rho);
}

inline SingleExcitationState random_diagonal(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = u(rng);
    p *= u(rng) / p.sum();
    return SingleExcitationState(p.cast<complex>().asDiagonal().toDenseMatrix());
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng, double scale = 100.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    }
    return 0.5 * (a + a.transpose());
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace test_support
