#pragma once

#include <vector>

#include <Eigen/Core>

#include <json.hpp>

#include "spillnet/fevd.hpp"
#include "spillnet/panel.hpp"
#include "spillnet/sparsify.hpp"
#include "spillnet/var.hpp"

namespace spillnet {

/// Rolling-window penalty search. Candidates are either constants c with the
/// rule lambda = c * log(T) / m (T the full panel length), or raw lambda
/// values. The training window has fixed size S = floor(train_frac * T).
struct TuningConfig {
    std::vector<double> candidates;
    bool candidates_are_constants = true;
    double train_frac = 0.9;
    int horizon = 10;
    int p_lag = 1;
    DecompKind kind = DecompKind::gfevd;
    IcScale ic_scale = IcScale::sample_scaled;
    int threads = 1;
};

struct TuningReport {
    std::vector<double> lambdas;          // resolved candidate penalties
    std::vector<double> constants;        // empty when candidates were raw
    std::vector<double> msfe;             // one entry per candidate
    int winner = 0;                       // index of the first minimum
    double lambda_star = 0.0;
    Eigen::MatrixXd forecast_errors;      // (T-S) x m for the winner
    Eigen::Index s_len = 0;
};

/// One-step sparse forecast from a fitted window. `shock_history` row 0 holds
/// the contemporaneous shocks, row h the shocks h periods back. The own
/// contemporaneous term (j = i, h = 0) is always excluded; masked positions
/// contribute nothing. Orthogonalized variant: weights Psi_h P, history rows
/// are structural shocks.
Eigen::VectorXd sparse_forecast(const VarFit& fit, const VmaSequence& vma, const ShockMap& map,
                                const Eigen::MatrixXi& mask, const Eigen::MatrixXd& shock_history);

/// Generalized variant: weights (Psi_h Sigma)_ij / sigma_jj, history rows are
/// reduced-form residuals; no shock recovery.
Eigen::VectorXd sparse_forecast(const VarFit& fit, const VmaSequence& vma,
                                const Eigen::Ref<const Eigen::MatrixXd>& sigma,
                                const Eigen::MatrixXi& mask, const Eigen::MatrixXd& shock_history);

/// Rolling pseudo-out-of-sample MSFE for one penalty value: fit each window
/// of size S, select the edge set at `lambda`, forecast the next observation
/// with the selected mask, and average the squared errors.
double poos_msfe(const StandardizedPanel& panel, const TuningConfig& cfg, double lambda);

/// Evaluate every candidate and keep the first minimizer.
TuningReport select_lambda(const StandardizedPanel& panel, const TuningConfig& cfg);

nlohmann::json to_json(const TuningReport& report);

}  // namespace spillnet
