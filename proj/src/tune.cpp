#include "spillnet/tune.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spillnet/parallel.hpp"

namespace spillnet {

namespace {

void check_history(const VarFit& fit, const VmaSequence& vma, const Eigen::MatrixXi& mask,
                   const Eigen::MatrixXd& history) {
    const Eigen::Index m = fit.m_dim();
    if (vma.m_dim() != m || mask.rows() != m || mask.cols() != m)
        throw std::invalid_argument("sparse_forecast: dimension mismatch");
    if (history.rows() < vma.horizon || history.cols() != m)
        throw std::invalid_argument("sparse_forecast: shock history must be H x m");
    for (Eigen::Index i = 0; i < m; ++i)
        if (mask(i, i) != 1)
            throw std::invalid_argument("sparse_forecast: mask diagonal must be all ones");
}

// y_i = mu_i + sum_{j != i} mask_ij W_0(i,j) s_0(j)
//            + sum_j mask_ij sum_{h>=1} W_h(i,j) s_h(j).
// The contemporaneous own term is excluded: that shock is recovered from the
// realized observation and is not available at the forecast origin.
Eigen::VectorXd forecast_core(const Eigen::VectorXd& mu, const std::vector<Eigen::MatrixXd>& weights,
                              const Eigen::MatrixXi& mask, const Eigen::MatrixXd& history) {
    const Eigen::Index m = mu.size();
    Eigen::VectorXd out = mu;
    for (Eigen::Index i = 0; i < m; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (mask(i, j) == 0) continue;
            if (j != i) acc += weights[0](i, j) * history(0, j);
            for (std::size_t h = 1; h < weights.size(); ++h)
                acc += weights[h](i, j) * history(static_cast<Eigen::Index>(h), j);
        }
        out(i) += acc;
    }
    return out;
}

std::vector<Eigen::MatrixXd> orthogonal_weights(const VmaSequence& vma, const ShockMap& map) {
    std::vector<Eigen::MatrixXd> weights;
    weights.reserve(vma.psi.size());
    for (const auto& psi : vma.psi) weights.push_back(psi * map.p_matrix);
    return weights;
}

std::vector<Eigen::MatrixXd> generalized_weights(const VmaSequence& vma,
                                                 const Eigen::Ref<const Eigen::MatrixXd>& sigma) {
    std::vector<Eigen::MatrixXd> weights;
    weights.reserve(vma.psi.size());
    Eigen::ArrayXd inv_var = sigma.diagonal().array().inverse();
    for (const auto& psi : vma.psi) {
        Eigen::MatrixXd w = psi * sigma;
        w.array().rowwise() *= inv_var.transpose();
        weights.push_back(std::move(w));
    }
    return weights;
}

struct ResolvedConfig {
    Eigen::Index t_len = 0;
    Eigen::Index m = 0;
    Eigen::Index s_len = 0;
    Eigen::Index n_windows = 0;
};

ResolvedConfig resolve(const StandardizedPanel& panel, const TuningConfig& cfg) {
    ResolvedConfig r;
    r.t_len = panel.panel.t_len();
    r.m = panel.panel.m_dim();
    if (cfg.train_frac <= 0.0 || cfg.train_frac >= 1.0)
        throw std::invalid_argument("tuning: train fraction must lie in (0, 1)");
    if (cfg.horizon < 1) throw std::invalid_argument("tuning: horizon must be at least 1");
    r.s_len = static_cast<Eigen::Index>(std::floor(cfg.train_frac * static_cast<double>(r.t_len)));
    if (r.s_len <= r.m * cfg.p_lag + 1)
        throw std::invalid_argument("tuning: training window too small for the VAR");
    if (r.s_len - cfg.p_lag < cfg.horizon - 1)
        throw std::invalid_argument("tuning: window too short to supply H-1 lagged shocks");
    r.n_windows = r.t_len - r.s_len;
    if (r.n_windows < 1) throw std::invalid_argument("tuning: no validation observations");
    return r;
}

// Forecast errors for every (window, candidate) pair. Windows are pure work
// items writing to their own slots, so parallel evaluation is reproducible.
std::vector<Eigen::MatrixXd> rolling_errors(const StandardizedPanel& panel, const TuningConfig& cfg,
                                            const std::vector<double>& lambdas,
                                            const ResolvedConfig& r) {
    const auto& y = panel.panel.values;
    std::vector<Eigen::MatrixXd> errors(lambdas.size());
    for (auto& e : errors) e.resize(r.n_windows, r.m);

    parallel_for(static_cast<int>(r.n_windows), cfg.threads, [&](int w) {
      try {
        const Eigen::MatrixXd window = y.middleRows(w, r.s_len);
        const Eigen::VectorXd target = y.row(w + r.s_len).transpose();
        const VarFit fit = fit_var(window, cfg.p_lag);
        const VmaSequence vma = vma_coefficients(fit.phi, cfg.horizon);

        Eigen::MatrixXd recent = window.bottomRows(cfg.p_lag).colwise().reverse();
        const Eigen::VectorXd eps_next = target - one_step_mean(fit, recent);

        ContributionMatrix contrib;
        std::vector<Eigen::MatrixXd> weights;
        Eigen::MatrixXd history(cfg.horizon, r.m);
        if (cfg.kind == DecompKind::fevd) {
            const ShockMap map = cholesky_factor(fit.sigma_hat);
            contrib = fevd_contributions(vma, map);
            weights = orthogonal_weights(vma, map);
            history.row(0) = recover_shocks(map, eps_next).transpose();
            for (int h = 1; h < cfg.horizon; ++h) {
                const Eigen::VectorXd resid = fit.residuals.row(r.s_len - cfg.p_lag - h).transpose();
                history.row(h) = recover_shocks(map, resid).transpose();
            }
        } else {
            contrib = gfevd_contributions(vma, fit.sigma_hat);
            weights = generalized_weights(vma, fit.sigma_hat);
            history.row(0) = eps_next.transpose();
            for (int h = 1; h < cfg.horizon; ++h)
                history.row(h) = fit.residuals.row(r.s_len - cfg.p_lag - h);
        }

        for (std::size_t q = 0; q < lambdas.size(); ++q) {
            const SparseSelection sel = sparsify(contrib, r.s_len, lambdas[q], cfg.ic_scale);
            const Eigen::VectorXd forecast = forecast_core(fit.mu, weights, sel.mask, history);
            errors[q].row(w) = (target - forecast).transpose();
        }
      } catch (const std::exception& ex) {
          std::ostringstream msg;
          msg << "tuning: window " << (w + 1) << " of " << r.n_windows << " failed: " << ex.what();
          throw std::runtime_error(msg.str());
      }
    });
    return errors;
}

double grand_msfe(const Eigen::MatrixXd& errors) {
    double total = 0.0;
    for (Eigen::Index w = 0; w < errors.rows(); ++w) total += errors.row(w).squaredNorm();
    return total / (static_cast<double>(errors.rows()) * static_cast<double>(errors.cols()));
}

}  // namespace

Eigen::VectorXd sparse_forecast(const VarFit& fit, const VmaSequence& vma, const ShockMap& map,
                                const Eigen::MatrixXi& mask, const Eigen::MatrixXd& shock_history) {
    check_history(fit, vma, mask, shock_history);
    return forecast_core(fit.mu, orthogonal_weights(vma, map), mask, shock_history);
}

Eigen::VectorXd sparse_forecast(const VarFit& fit, const VmaSequence& vma,
                                const Eigen::Ref<const Eigen::MatrixXd>& sigma,
                                const Eigen::MatrixXi& mask, const Eigen::MatrixXd& shock_history) {
    check_history(fit, vma, mask, shock_history);
    return forecast_core(fit.mu, generalized_weights(vma, sigma), mask, shock_history);
}

double poos_msfe(const StandardizedPanel& panel, const TuningConfig& cfg, double lambda) {
    const ResolvedConfig r = resolve(panel, cfg);
    const auto errors = rolling_errors(panel, cfg, {lambda}, r);
    return grand_msfe(errors.front());
}

TuningReport select_lambda(const StandardizedPanel& panel, const TuningConfig& cfg) {
    if (cfg.candidates.empty()) throw std::invalid_argument("select_lambda: no candidates");
    const ResolvedConfig r = resolve(panel, cfg);

    TuningReport report;
    report.s_len = r.s_len;
    if (cfg.candidates_are_constants) {
        report.constants = cfg.candidates;
        const double unit = std::log(static_cast<double>(r.t_len)) / static_cast<double>(r.m);
        for (double c : cfg.candidates) report.lambdas.push_back(c * unit);
    } else {
        report.lambdas = cfg.candidates;
    }

    const auto errors = rolling_errors(panel, cfg, report.lambdas, r);
    report.msfe.reserve(report.lambdas.size());
    for (const auto& e : errors) report.msfe.push_back(grand_msfe(e));

    report.winner = 0;
    for (std::size_t q = 1; q < report.msfe.size(); ++q)
        if (report.msfe[q] < report.msfe[static_cast<std::size_t>(report.winner)])
            report.winner = static_cast<int>(q);
    report.lambda_star = report.lambdas[static_cast<std::size_t>(report.winner)];
    report.forecast_errors = errors[static_cast<std::size_t>(report.winner)];
    return report;
}

nlohmann::json to_json(const TuningReport& report) {
    nlohmann::json j;
    nlohmann::json candidates = nlohmann::json::array();
    for (std::size_t q = 0; q < report.lambdas.size(); ++q) {
        nlohmann::json entry;
        if (!report.constants.empty()) entry["c"] = report.constants[q];
        entry["lambda"] = report.lambdas[q];
        entry["msfe"] = report.msfe[q];
        candidates.push_back(std::move(entry));
    }
    j["candidates"] = std::move(candidates);
    j["winner_index"] = report.winner;
    j["lambda_star"] = report.lambda_star;
    if (!report.constants.empty()) j["c_star"] = report.constants[static_cast<std::size_t>(report.winner)];
    j["s_len"] = report.s_len;
    j["tie_rule"] = "first minimum";
    return j;
}

}  // namespace spillnet
