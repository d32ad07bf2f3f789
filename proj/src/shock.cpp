#include "spillnet/shock.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace spillnet {

ShockMap cholesky_factor(const Eigen::Ref<const Eigen::MatrixXd>& sigma) {
    const Eigen::Index m = sigma.rows();
    if (sigma.cols() != m) throw std::invalid_argument("cholesky_factor: matrix not square");
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw std::invalid_argument("cholesky_factor: matrix asymmetric beyond tolerance");

    const double pivot_floor = 1e-12 * std::max(1e-300, sigma.diagonal().maxCoeff());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double pivot = sigma(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= p(j, k) * p(j, k);
        if (pivot <= pivot_floor) {
            std::ostringstream msg;
            msg << "cholesky_factor: not positive definite at pivot " << (j + 1);
            throw std::runtime_error(msg.str());
        }
        p(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < m; ++i) {
            double acc = sigma(i, j);
            for (Eigen::Index k = 0; k < j; ++k) acc -= p(i, k) * p(j, k);
            p(i, j) = acc / p(j, j);
        }
    }
    return ShockMap{std::move(p), MapKind::cholesky};
}

ShockMap validate_user_map(const Eigen::MatrixXd& p_matrix, const Eigen::MatrixXd& sigma,
                           double tol) {
    const Eigen::Index m = sigma.rows();
    if (p_matrix.rows() != m || p_matrix.cols() != m || sigma.cols() != m)
        throw std::invalid_argument("validate_user_map: dimension mismatch");
    Eigen::MatrixXd diff = p_matrix * p_matrix.transpose() - sigma;
    Eigen::Index worst_i = 0, worst_j = 0;
    const double worst = diff.cwiseAbs().maxCoeff(&worst_i, &worst_j);
    if (worst > tol) {
        std::ostringstream msg;
        msg << "validate_user_map: P P' differs from Sigma by " << worst << " at entry ("
            << (worst_i + 1) << ", " << (worst_j + 1) << "), tolerance " << tol;
        throw std::invalid_argument(msg.str());
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(p_matrix);
    if (!lu.isInvertible())
        throw std::invalid_argument("validate_user_map: P is singular");
    return ShockMap{p_matrix, MapKind::user_supplied};
}

namespace {

bool is_lower_triangular(const Eigen::MatrixXd& p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = i + 1; j < p.cols(); ++j)
            if (p(i, j) != 0.0) return false;
    return true;
}

}  // namespace

Eigen::VectorXd recover_shocks(const ShockMap& map, const Eigen::VectorXd& residual) {
    const auto& p = map.p_matrix;
    if (residual.size() != p.rows())
        throw std::invalid_argument("recover_shocks: residual length does not match P");
    if (map.kind == MapKind::cholesky || is_lower_triangular(p)) {
        for (Eigen::Index j = 0; j < p.rows(); ++j)
            if (p(j, j) == 0.0) throw std::runtime_error("recover_shocks: singular map");
        return p.triangularView<Eigen::Lower>().solve(residual);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(p);
    if (!lu.isInvertible()) throw std::runtime_error("recover_shocks: singular map");
    return lu.solve(residual);
}

Eigen::MatrixXd recover_shocks(const ShockMap& map, const Eigen::MatrixXd& residuals) {
    Eigen::MatrixXd shocks(residuals.rows(), residuals.cols());
    for (Eigen::Index t = 0; t < residuals.rows(); ++t) {
        const Eigen::VectorXd row = residuals.row(t).transpose();
        shocks.row(t) = recover_shocks(map, row).transpose();
    }
    return shocks;
}

}  // namespace spillnet
