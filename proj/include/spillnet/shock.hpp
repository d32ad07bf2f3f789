#pragma once

#include <Eigen/Core>

namespace spillnet {

enum class MapKind { cholesky, user_supplied };

/// A shock-identification map P with Sigma = P P'. Cholesky maps are lower
/// triangular with positive diagonal; user maps are any non-singular square
/// root accepted by validate_user_map.
struct ShockMap {
    Eigen::MatrixXd p_matrix;
    MapKind kind = MapKind::cholesky;
};

/// Lower-triangular Cholesky factor computed by the textbook recursion
///   P_jj = sqrt(sigma_jj - sum_{k<j} P_jk^2)
///   P_ij = (sigma_ij - sum_{k<j} P_ik P_jk) / P_jj.
/// Cross-block zeros of a block-diagonal Sigma are preserved exactly.
/// Throws if Sigma is asymmetric beyond 1e-10 or a pivot falls below
/// 1e-12 times the largest diagonal entry.
ShockMap cholesky_factor(const Eigen::Ref<const Eigen::MatrixXd>& sigma);

/// Accept a user-supplied P iff max|P P' - Sigma| <= tol and P is invertible.
ShockMap validate_user_map(const Eigen::MatrixXd& p_matrix, const Eigen::MatrixXd& sigma,
                           double tol = 1e-6);

/// Structural shocks xi = P^{-1} eps. Forward substitution for triangular P,
/// a general solve otherwise.
Eigen::VectorXd recover_shocks(const ShockMap& map, const Eigen::VectorXd& residual);

/// Row-wise variant: rows are time, one recovered shock vector per row.
Eigen::MatrixXd recover_shocks(const ShockMap& map, const Eigen::MatrixXd& residuals);

}  // namespace spillnet
