#pragma once

#include <Eigen/Dense>
#include <vector>

#include "crnstab/network.hpp"

namespace crnstab::detail {

inline Eigen::VectorXd to_eigen(const Vec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vec from_eigen(const Eigen::VectorXd& v) {
    return Vec(v.data(), v.data() + v.size());
}

/// Modified Gram-Schmidt over the given vectors; near-dependent vectors
/// (residual norm <= tol) are dropped. Deterministic in input order.
inline std::vector<Vec> orthonormalize(const std::vector<Vec>& vectors, double tol = 1e-10) {
    std::vector<Eigen::VectorXd> basis;
    for (const Vec& raw : vectors) {
        Eigen::VectorXd v = to_eigen(raw);
        for (const auto& b : basis) v -= b.dot(v) * b;
        for (const auto& b : basis) v -= b.dot(v) * b;  // second pass for orthogonality
        if (v.norm() > tol) basis.push_back(v.normalized());
    }
    std::vector<Vec> out;
    out.reserve(basis.size());
    for (const auto& b : basis) out.push_back(from_eigen(b));
    return out;
}

/// Null-space basis columns of A (not orthonormalized).
inline std::vector<Vec> kernel_basis(const Eigen::MatrixXd& A, double tol = 1e-10) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(tol);
    Eigen::MatrixXd K = lu.kernel();
    std::vector<Vec> out;
    if (lu.dimensionOfKernel() == 0) return out;
    for (Eigen::Index c = 0; c < K.cols(); ++c)
        out.push_back(from_eigen(K.col(c)));
    return out;
}

inline int matrix_rank(const Eigen::MatrixXd& A, double tol = 1e-10) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(tol);
    return static_cast<int>(lu.rank());
}

/// Minimum-norm least-squares solution of A x = b.
inline Eigen::VectorXd min_norm_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    return cod.solve(b);
}

}  // namespace crnstab::detail
