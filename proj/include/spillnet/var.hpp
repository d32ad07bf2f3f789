#pragma once

#include <vector>

#include <Eigen/Core>

#include <json.hpp>

#include "spillnet/panel.hpp"

namespace spillnet {

/// An estimated VAR(p): intercept, lag coefficients, residuals and their
/// covariance (divisor T-p), and the implied unconditional mean.
struct VarFit {
    Eigen::VectorXd intercept;              // m
    std::vector<Eigen::MatrixXd> phi;       // p matrices, each m x m
    Eigen::MatrixXd residuals;              // (T-p) x m, rows t = p+1..T
    Eigen::MatrixXd sigma_hat;              // m x m
    Eigen::VectorXd mu;                     // (I - sum phi)^{-1} c
    int p_lag = 0;
    Eigen::Index t_len = 0;

    Eigen::Index m_dim() const { return intercept.size(); }
};

/// Equation-wise OLS with intercept on a raw T x m observation matrix.
/// Rank deficiency (column-pivoted QR threshold 1e-10) and T <= m*p + 1
/// are rejected.
VarFit fit_var(const Eigen::Ref<const Eigen::MatrixXd>& observations, int p);
VarFit fit_var(const StandardizedPanel& panel, int p);

/// Largest eigenvalue modulus of the mp x mp companion matrix.
double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& phi);
double companion_spectral_radius(const VarFit& fit);

/// Conditional-mean forecast c + sum_l Phi_l y_{t+1-l}. `recent` holds the
/// p most recent observations, most recent first (row 0 = y_t).
Eigen::VectorXd one_step_mean(const VarFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& recent);

nlohmann::json to_json(const VarFit& fit);

}  // namespace spillnet
