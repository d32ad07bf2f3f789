#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include <json.hpp>

#include "spillnet/fevd.hpp"
#include "spillnet/panel.hpp"
#include "spillnet/sparsify.hpp"

namespace spillnet {

enum class ErrorDist { gaussian, student_t };

/// A simulation design: block sizes partition the m nodes (singletons are
/// isolated), weak_fill > 0 overwrites structural zeros with U(-w, w) draws,
/// diagonal_only switches to the fully disconnected layout with diagonal
/// coefficient and covariance matrices.
struct DgpSpec {
    std::string name = "custom";
    int m = 0;
    int p = 1;
    std::vector<int> block_sizes;
    ErrorDist error_dist = ErrorDist::gaussian;
    double nu = 4.0;          // Student-t degrees of freedom
    double weak_fill = 0.0;   // U(-w, w) fill bound for approximately sparse designs
    bool diagonal_only = false;
    std::uint64_t seed = 0;
};

/// Named presets S1, S2, L1..L4, D1, D2, H1, H2 from the simulation designs.
DgpSpec dgp_preset(const std::string& name, int p);

struct TrueModel {
    std::vector<Eigen::MatrixXd> phi;
    Eigen::MatrixXd sigma;
    std::vector<std::pair<int, int>> active_set;  // cross pairs inside non-singleton blocks
    double spectral_radius = 0.0;
    ErrorDist error_dist = ErrorDist::gaussian;
    double nu = 4.0;

    Eigen::Index m_dim() const { return sigma.rows(); }
};

TrueModel generate_model(const DgpSpec& spec);

/// Simulate T observations after a 1000-draw burn-in from a zero start.
/// Student-t errors use scale (nu-2)/nu * Sigma so their covariance is Sigma.
Panel simulate_panel(const TrueModel& model, int t_len, std::uint64_t seed);

struct CdrMetrics {
    std::optional<double> cdr1;  // empty when the true active set is empty
    double cdr0 = 0.0;
    double cdra = 0.0;
};

CdrMetrics cdr_metrics(const SparseSelection& est, const TrueModel& truth);

struct SparsityLoss {
    double sp = 0.0;    // pruned fraction of off-diagonal slots
    double vl_a = 0.0;  // pruned true contribution mass / total mass
    double vl_o = 0.0;  // pruned true contribution mass / off-diagonal mass
};

/// `truth_contrib` must be the FEVD contributions of the true model at the
/// study horizon; variance-loss ratios are not defined for the generalized
/// decomposition.
SparsityLoss sparsity_loss_metrics(const SparseSelection& est, const TrueModel& truth,
                                   const ContributionMatrix& truth_contrib);

struct StudyConfig {
    DgpSpec spec;
    std::vector<int> t_values;
    std::vector<int> horizons;
    std::vector<DecompKind> kinds;
    std::vector<double> grid_constants;  // empty = per-horizon defaults
    int replications = 100;
    std::uint64_t master_seed = 1;
    double alpha = 0.9;
    int threads = 1;
    bool tune = true;
    double fixed_lambda = 0.0;      // when !tune: this penalty, or log(T) if zero
    bool hold_model_fixed = false;  // reuse one model draw across replications
    bool loss_metrics = false;      // report SP/VL instead of CDRs
};

struct ReplicationRow {
    int replication = 0;
    std::uint64_t seed = 0;
    int k_hat = 0;
    double c_star = 0.0;       // NaN when untuned
    double lambda_star = 0.0;
    CdrMetrics cdr;
    SparsityLoss loss;
};

struct CellReport {
    std::string spec_name;
    int p = 0;
    int t_len = 0;
    int horizon = 0;
    DecompKind kind = DecompKind::gfevd;
    std::vector<ReplicationRow> rows;
    std::optional<double> mean_cdr1;
    double mean_cdr0 = 0.0;
    double mean_cdra = 0.0;
    double mean_sp = 0.0;
    double mean_vl_a = 0.0;
    double mean_vl_o = 0.0;
    std::vector<std::pair<double, int>> c_star_histogram;  // (c, count)
};

struct McReport {
    std::vector<CellReport> cells;
    std::uint64_t master_seed = 0;
    int replications = 0;
};

/// Run every (T, H, kind) cell of the study. Replications draw a fresh model
/// and panel from per-replication streams of the master seed, tune the
/// penalty on the rolling scheme (unless disabled), select the edge set on
/// the full sample, and score against the truth. Results are independent of
/// the worker thread count.
McReport run_study(const StudyConfig& cfg);

nlohmann::json to_json(const McReport& report);
std::string report_csv(const McReport& report);
std::string c_star_histogram_csv(const McReport& report);

}  // namespace spillnet
