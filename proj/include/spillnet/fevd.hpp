#pragma once

#include <Eigen/Core>

#include "spillnet/shock.hpp"
#include "spillnet/vma.hpp"

namespace spillnet {

enum class DecompKind { fevd, gfevd };

/// Nonnegative m x m matrix of H-step variance contributions: phi^2_ij for
/// orthogonalized shocks, psi^2_ij for the generalized decomposition.
struct ContributionMatrix {
    Eigen::MatrixXd values;
    DecompKind kind = DecompKind::fevd;
    int horizon = 0;

    Eigen::Index m_dim() const { return values.rows(); }
};

/// Normalized decomposition shares. FEVD rows sum to one; GFEVD rows need not.
struct FevdTable {
    Eigen::MatrixXd shares;
    DecompKind kind = DecompKind::fevd;
    int horizon = 0;

    Eigen::Index m_dim() const { return shares.rows(); }
};

/// phi^2_ij = sum_{h<H} [(Psi_h P)_ij]^2.
ContributionMatrix fevd_contributions(const VmaSequence& vma, const ShockMap& map);

/// theta_ij = phi^2_ij / sum_l phi^2_il.
FevdTable fevd_table(const ContributionMatrix& contrib);

/// psi^2_ij = sigma_jj^{-1} sum_{h<H} [(Psi_h Sigma)_ij]^2.
ContributionMatrix gfevd_contributions(const VmaSequence& vma,
                                       const Eigen::Ref<const Eigen::MatrixXd>& sigma);

/// vartheta_ij = psi^2_ij / sum_{h<H} (Psi_h Sigma Psi_h')_ii.
FevdTable gfevd_table(const ContributionMatrix& contrib, const VmaSequence& vma,
                      const Eigen::Ref<const Eigen::MatrixXd>& sigma);

/// Audit variant of the H-step FEVD shares with the denominator
/// sum_{h<H} [(Psi_h Sigma Psi_h')_ii]^2, i.e. each horizon's forecast-error
/// variance squared before summation. Kept for comparison only; the row sums
/// of this variant are not one for H > 1.
FevdTable fevd_table_squared_denominator(const ContributionMatrix& contrib, const VmaSequence& vma,
                                         const Eigen::Ref<const Eigen::MatrixXd>& sigma);

}  // namespace spillnet
