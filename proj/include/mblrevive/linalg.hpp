#pragma once

#include <Eigen/Dense>

#include <complex>

namespace mblrevive::linalg {

struct SymmetricEigen {
    Eigen::VectorXd values;  ///< ascending
    Eigen::MatrixXd vectors; ///< columns
};

/// Full spectrum of a real symmetric matrix (LAPACK divide and conquer).
[[nodiscard]] SymmetricEigen eigh(const Eigen::MatrixXd &h);

/// Eigenvalues only.
[[nodiscard]] Eigen::VectorXd eigvalsh(const Eigen::MatrixXd &h);

struct OverlapSelection {
    double          value   = 0.0; ///< eigenvalue of the selected vector
    double          overlap = 0.0; ///< |<v|target>|^2 / |target|^2
    Eigen::Index    index   = 0;   ///< position in the ascending spectrum
    Eigen::VectorXd vector;        ///< unit norm, sign fixed so <v|target> >= 0
};

/// Eigenvector of `h` with the largest squared overlap with `target`.
/// Candidates whose squared overlap is within `tie_tolerance` of the best are
/// resolved toward the lowest eigenvalue. Only the selected vector is
/// back-transformed, so the cost is one tridiagonal reduction plus O(n^2).
[[nodiscard]] OverlapSelection select_max_overlap(const Eigen::MatrixXd &h, const Eigen::VectorXd &target, double tie_tolerance = 1e-12);

/// exp(-i angle) with the angle reduced modulo 2 pi in extended precision,
/// so that large E t products keep their absolute accuracy.
[[nodiscard]] std::complex<double> expi_neg(long double angle);

} // namespace mblrevive::linalg
