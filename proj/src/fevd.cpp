#include "spillnet/fevd.hpp"

#include <sstream>
#include <stdexcept>

namespace spillnet {

namespace {

void check_dims(const VmaSequence& vma, Eigen::Index m, const char* where) {
    if (vma.psi.empty() || vma.m_dim() != m) {
        std::ostringstream msg;
        msg << where << ": dimension mismatch between VMA sequence and identification";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

ContributionMatrix fevd_contributions(const VmaSequence& vma, const ShockMap& map) {
    const Eigen::Index m = map.p_matrix.rows();
    check_dims(vma, m, "fevd_contributions");
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m, m);
    for (const auto& psi : vma.psi) {
        Eigen::MatrixXd irf = psi * map.p_matrix;
        values += irf.cwiseProduct(irf);
    }
    return ContributionMatrix{std::move(values), DecompKind::fevd, vma.horizon};
}

FevdTable fevd_table(const ContributionMatrix& contrib) {
    if (contrib.kind != DecompKind::fevd)
        throw std::invalid_argument("fevd_table: contributions are not orthogonalized");
    const Eigen::Index m = contrib.m_dim();
    Eigen::MatrixXd shares(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double row_sum = contrib.values.row(i).sum();
        if (row_sum <= 0.0) {
            std::ostringstream msg;
            msg << "fevd_table: degenerate forecast-error variance in row " << (i + 1);
            throw std::runtime_error(msg.str());
        }
        shares.row(i) = contrib.values.row(i) / row_sum;
    }
    return FevdTable{std::move(shares), DecompKind::fevd, contrib.horizon};
}

ContributionMatrix gfevd_contributions(const VmaSequence& vma,
                                       const Eigen::Ref<const Eigen::MatrixXd>& sigma) {
    const Eigen::Index m = sigma.rows();
    check_dims(vma, m, "gfevd_contributions");
    for (Eigen::Index j = 0; j < m; ++j)
        if (sigma(j, j) <= 0.0) {
            std::ostringstream msg;
            msg << "gfevd_contributions: non-positive variance for series " << (j + 1);
            throw std::invalid_argument(msg.str());
        }
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m, m);
    for (const auto& psi : vma.psi) {
        Eigen::MatrixXd girf = psi * sigma;
        values += girf.cwiseProduct(girf);
    }
    values.array().rowwise() /= sigma.diagonal().transpose().array();
    return ContributionMatrix{std::move(values), DecompKind::gfevd, vma.horizon};
}

namespace {

// d_i = sum_{h<H} (Psi_h Sigma Psi_h')_ii, the i-th H-step forecast-error variance.
Eigen::VectorXd fe_variances(const VmaSequence& vma, const Eigen::Ref<const Eigen::MatrixXd>& sigma,
                             bool square_each_horizon) {
    const Eigen::Index m = sigma.rows();
    Eigen::VectorXd denom = Eigen::VectorXd::Zero(m);
    for (const auto& psi : vma.psi) {
        Eigen::VectorXd step = (psi * sigma).cwiseProduct(psi).rowwise().sum();
        denom += square_each_horizon ? step.cwiseProduct(step).eval() : step;
    }
    return denom;
}

FevdTable shares_from_denominator(const ContributionMatrix& contrib, const Eigen::VectorXd& denom,
                                  const char* where) {
    const Eigen::Index m = contrib.m_dim();
    Eigen::MatrixXd shares(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (denom(i) <= 0.0) {
            std::ostringstream msg;
            msg << where << ": zero forecast-error variance in row " << (i + 1);
            throw std::runtime_error(msg.str());
        }
        shares.row(i) = contrib.values.row(i) / denom(i);
    }
    return FevdTable{std::move(shares), contrib.kind, contrib.horizon};
}

}  // namespace

FevdTable gfevd_table(const ContributionMatrix& contrib, const VmaSequence& vma,
                      const Eigen::Ref<const Eigen::MatrixXd>& sigma) {
    if (contrib.kind != DecompKind::gfevd)
        throw std::invalid_argument("gfevd_table: contributions are not generalized");
    check_dims(vma, contrib.m_dim(), "gfevd_table");
    return shares_from_denominator(contrib, fe_variances(vma, sigma, false), "gfevd_table");
}

FevdTable fevd_table_squared_denominator(const ContributionMatrix& contrib, const VmaSequence& vma,
                                         const Eigen::Ref<const Eigen::MatrixXd>& sigma) {
    if (contrib.kind != DecompKind::fevd)
        throw std::invalid_argument("fevd_table_squared_denominator: contributions are not orthogonalized");
    check_dims(vma, contrib.m_dim(), "fevd_table_squared_denominator");
    return shares_from_denominator(contrib, fe_variances(vma, sigma, true),
                                   "fevd_table_squared_denominator");
}

}  // namespace spillnet
