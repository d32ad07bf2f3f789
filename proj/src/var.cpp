#include "spillnet/var.hpp"

#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace spillnet {

VarFit fit_var(const Eigen::Ref<const Eigen::MatrixXd>& observations, int p) {
    const Eigen::Index t = observations.rows();
    const Eigen::Index m = observations.cols();
    if (p < 1) throw std::invalid_argument("fit_var: lag order must be at least 1");
    if (t <= static_cast<Eigen::Index>(m) * p + 1)
        throw std::invalid_argument("fit_var: T too small for the requested lag order");

    const Eigen::Index rows = t - p;
    const Eigen::Index cols = m * p + 1;
    Eigen::MatrixXd design(rows, cols);
    design.col(0).setOnes();
    for (int l = 1; l <= p; ++l)
        design.middleCols(1 + static_cast<Eigen::Index>(l - 1) * m, m) =
            observations.middleRows(p - l, rows);
    Eigen::MatrixXd target = observations.bottomRows(rows);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols)
        throw std::runtime_error("fit_var: rank-deficient design matrix");
    Eigen::MatrixXd beta = qr.solve(target);  // cols x m

    VarFit fit;
    fit.p_lag = p;
    fit.t_len = t;
    fit.intercept = beta.row(0).transpose();
    fit.phi.reserve(static_cast<std::size_t>(p));
    for (int l = 0; l < p; ++l)
        fit.phi.push_back(beta.middleRows(1 + static_cast<Eigen::Index>(l) * m, m).transpose());
    fit.residuals = target - design * beta;
    fit.sigma_hat = (fit.residuals.transpose() * fit.residuals) / static_cast<double>(rows);
    fit.sigma_hat = ((fit.sigma_hat + fit.sigma_hat.transpose()) * 0.5).eval();

    Eigen::MatrixXd lag_sum = Eigen::MatrixXd::Identity(m, m);
    for (const auto& phi : fit.phi) lag_sum -= phi;
    fit.mu = lag_sum.colPivHouseholderQr().solve(fit.intercept);
    return fit;
}

VarFit fit_var(const StandardizedPanel& panel, int p) {
    return fit_var(panel.panel.values, p);
}

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& phi) {
    if (phi.empty()) throw std::invalid_argument("companion_spectral_radius: no coefficients");
    const Eigen::Index m = phi.front().rows();
    const Eigen::Index p = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m * p, m * p);
    for (Eigen::Index l = 0; l < p; ++l) companion.block(0, l * m, m, m) = phi[static_cast<std::size_t>(l)];
    if (p > 1)
        companion.block(m, 0, m * (p - 1), m * (p - 1)) = Eigen::MatrixXd::Identity(m * (p - 1), m * (p - 1));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double companion_spectral_radius(const VarFit& fit) {
    return companion_spectral_radius(fit.phi);
}

Eigen::VectorXd one_step_mean(const VarFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& recent) {
    const Eigen::Index m = fit.m_dim();
    if (recent.rows() < fit.p_lag || recent.cols() != m)
        throw std::invalid_argument("one_step_mean: history must be p x m, most recent first");
    Eigen::VectorXd forecast = fit.intercept;
    for (int l = 0; l < fit.p_lag; ++l)
        forecast += fit.phi[static_cast<std::size_t>(l)] * recent.row(l).transpose();
    return forecast;
}

nlohmann::json to_json(const VarFit& fit) {
    nlohmann::json j;
    j["p"] = fit.p_lag;
    j["t_len"] = fit.t_len;
    j["c"] = std::vector<double>(fit.intercept.data(), fit.intercept.data() + fit.intercept.size());
    auto matrix_rows = [](const Eigen::MatrixXd& mat) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < mat.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < mat.cols(); ++k) row.push_back(mat(i, k));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    nlohmann::json phis = nlohmann::json::array();
    for (const auto& phi : fit.phi) phis.push_back(matrix_rows(phi));
    j["phi"] = std::move(phis);
    j["sigma"] = matrix_rows(fit.sigma_hat);
    j["mu"] = std::vector<double>(fit.mu.data(), fit.mu.data() + fit.mu.size());
    return j;
}

}  // namespace spillnet
