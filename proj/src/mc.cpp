#include "spillnet/mc.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spillnet/parallel.hpp"
#include "spillnet/rng.hpp"
#include "spillnet/shock.hpp"
#include "spillnet/tune.hpp"
#include "spillnet/var.hpp"

namespace spillnet {

namespace {

std::vector<int> block_ids(const std::vector<int>& block_sizes) {
    std::vector<int> ids;
    int block = 0;
    for (int size : block_sizes) {
        if (size < 1) throw std::invalid_argument("dgp: block sizes must be positive");
        for (int k = 0; k < size; ++k) ids.push_back(block);
        ++block;
    }
    return ids;
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void shrink_until_stationary(std::vector<Eigen::MatrixXd>& phi, double& radius) {
    radius = companion_spectral_radius(phi);
    while (radius >= 1.0) {
        for (auto& mat : phi) mat *= 0.9;
        radius = companion_spectral_radius(phi);
    }
}

void mix_until_positive_definite(Eigen::MatrixXd& sigma) {
    const Eigen::Index m = sigma.rows();
    double omega = 1.0;
    while (min_eigenvalue(sigma) <= 1e-10) {
        omega *= 0.9;
        sigma = omega * sigma + (1.0 - omega) * Eigen::MatrixXd::Identity(m, m);
    }
}

}  // namespace

DgpSpec dgp_preset(const std::string& name, int p) {
    DgpSpec spec;
    spec.name = name;
    spec.p = p;
    auto blocks = [&spec](int m, std::vector<int> sizes) {
        spec.m = m;
        spec.block_sizes = std::move(sizes);
    };
    if (name == "S1") {
        blocks(10, {4, 2, 2, 1, 1});
    } else if (name == "S2") {
        blocks(10, {6, 1, 1, 1, 1});
    } else if (name == "L1" || name == "D1" || name == "H1") {
        blocks(20, {8, 4, 2, 2, 1, 1, 1, 1});
    } else if (name == "L2" || name == "D2" || name == "H2") {
        blocks(20, {10, 4, 1, 1, 1, 1, 1, 1});
    } else if (name == "L3") {
        blocks(20, {2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    } else if (name == "L4") {
        blocks(20, std::vector<int>(20, 1));
        spec.diagonal_only = true;
    } else {
        throw std::invalid_argument("dgp_preset: unknown design '" + name + "'");
    }
    if (name == "D1" || name == "D2") spec.weak_fill = 0.1;
    if (name == "H1" || name == "H2") {
        spec.error_dist = ErrorDist::student_t;
        spec.nu = 4.0;
    }
    return spec;
}

TrueModel generate_model(const DgpSpec& spec) {
    if (spec.m < 1) throw std::invalid_argument("generate_model: m must be positive");
    const auto ids = block_ids(spec.block_sizes);
    if (static_cast<int>(ids.size()) != spec.m)
        throw std::invalid_argument("generate_model: block sizes must sum to m");

    RngEngine engine(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Eigen::Index m = spec.m;

    TrueModel model;
    model.error_dist = spec.error_dist;
    model.nu = spec.nu;
    model.phi.assign(static_cast<std::size_t>(spec.p), Eigen::MatrixXd::Zero(m, m));
    for (auto& phi : model.phi)
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) {
                if (spec.diagonal_only ? i != j : ids[static_cast<std::size_t>(i)] != ids[static_cast<std::size_t>(j)])
                    continue;
                phi(i, j) = unit(engine);
            }
    shrink_until_stationary(model.phi, model.spectral_radius);

    if (spec.diagonal_only) {
        std::uniform_real_distribution<double> diag_var(0.25, 1.0);
        model.sigma = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) model.sigma(i, i) = diag_var(engine);
    } else {
        Eigen::VectorXd rho(m);
        for (Eigen::Index i = 0; i < m; ++i) rho(i) = unit(engine);
        model.sigma = Eigen::MatrixXd::Identity(m, m) + rho * rho.transpose();
        model.sigma.diagonal().setOnes();
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                if (ids[static_cast<std::size_t>(i)] != ids[static_cast<std::size_t>(j)])
                    model.sigma(i, j) = 0.0;
        mix_until_positive_definite(model.sigma);
    }

    if (spec.weak_fill > 0.0) {
        std::uniform_real_distribution<double> weak(-spec.weak_fill, spec.weak_fill);
        for (auto& phi : model.phi)
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j)
                    if (phi(i, j) == 0.0) phi(i, j) = weak(engine);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                if (model.sigma(i, j) == 0.0) {
                    const double fill = weak(engine);
                    model.sigma(i, j) = fill;
                    model.sigma(j, i) = fill;
                }
        shrink_until_stationary(model.phi, model.spectral_radius);
        mix_until_positive_definite(model.sigma);
    }

    std::vector<int> block_count(spec.block_sizes.size(), 0);
    for (int id : ids) ++block_count[static_cast<std::size_t>(id)];
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            const int bi = ids[static_cast<std::size_t>(i)];
            if (bi == ids[static_cast<std::size_t>(j)] && block_count[static_cast<std::size_t>(bi)] > 1)
                model.active_set.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return model;
}

Panel simulate_panel(const TrueModel& model, int t_len, std::uint64_t seed) {
    if (t_len < 1) throw std::invalid_argument("simulate_panel: T must be positive");
    if (model.spectral_radius >= 1.0)
        throw std::invalid_argument("simulate_panel: model is not stationary");
    const Eigen::Index m = model.m_dim();
    const int p = static_cast<int>(model.phi.size());
    constexpr int kBurnIn = 1000;

    Eigen::MatrixXd factor = cholesky_factor(model.sigma).p_matrix;
    const bool heavy = model.error_dist == ErrorDist::student_t;
    if (heavy) {
        if (model.nu <= 2.0) throw std::invalid_argument("simulate_panel: need nu > 2");
        factor *= std::sqrt((model.nu - 2.0) / model.nu);
    }

    RngEngine engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(model.nu);

    const int total = kBurnIn + t_len;
    Eigen::MatrixXd path = Eigen::MatrixXd::Zero(total + p, m);
    Eigen::VectorXd z(m);
    for (int t = p; t < total + p; ++t) {
        for (Eigen::Index i = 0; i < m; ++i) z(i) = gauss(engine);
        Eigen::VectorXd eps = factor * z;
        if (heavy) eps *= std::sqrt(model.nu / chi2(engine));
        Eigen::VectorXd value = eps;
        for (int l = 1; l <= p; ++l) value += model.phi[static_cast<std::size_t>(l - 1)] * path.row(t - l).transpose();
        path.row(t) = value.transpose();
    }

    Panel panel;
    panel.values = path.bottomRows(t_len);
    panel.labels.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) panel.labels.push_back("V" + std::to_string(j + 1));
    return panel;
}

namespace {

Eigen::MatrixXi pair_matrix(const std::vector<std::pair<int, int>>& pairs, Eigen::Index m) {
    Eigen::MatrixXi mat = Eigen::MatrixXi::Zero(m, m);
    for (const auto& [i, j] : pairs) mat(i, j) = 1;
    return mat;
}

}  // namespace

CdrMetrics cdr_metrics(const SparseSelection& est, const TrueModel& truth) {
    const Eigen::Index m = truth.m_dim();
    if (est.mask.rows() != m)
        throw std::invalid_argument("cdr_metrics: dimension mismatch");
    const Eigen::MatrixXi est_active = pair_matrix(est.active_set, m);
    const Eigen::MatrixXi true_active = pair_matrix(truth.active_set, m);

    const int slots = static_cast<int>(m * (m - 1));
    const int true_edges = static_cast<int>(truth.active_set.size());
    const int true_holes = slots - true_edges;
    int hit_edges = 0;
    int hit_holes = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            if (est_active(i, j) == 1 && true_active(i, j) == 1) ++hit_edges;
            if (est_active(i, j) == 0 && true_active(i, j) == 0) ++hit_holes;
        }

    CdrMetrics out;
    if (true_edges > 0) out.cdr1 = static_cast<double>(hit_edges) / true_edges;
    out.cdr0 = true_holes > 0 ? static_cast<double>(hit_holes) / true_holes : 1.0;
    out.cdra = static_cast<double>(hit_edges + hit_holes) / slots;
    return out;
}

SparsityLoss sparsity_loss_metrics(const SparseSelection& est, const TrueModel& truth,
                                   const ContributionMatrix& truth_contrib) {
    if (truth_contrib.kind != DecompKind::fevd)
        throw std::invalid_argument(
            "sparsity_loss_metrics: variance-loss ratios need orthogonalized true contributions");
    const Eigen::Index m = truth.m_dim();
    if (truth_contrib.m_dim() != m || est.mask.rows() != m)
        throw std::invalid_argument("sparsity_loss_metrics: dimension mismatch");

    const Eigen::MatrixXi est_active = pair_matrix(est.active_set, m);
    double pruned_mass = 0.0;
    double total_mass = 0.0;
    double off_diag_mass = 0.0;
    int pruned = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            total_mass += truth_contrib.values(i, j);
            if (i == j) continue;
            off_diag_mass += truth_contrib.values(i, j);
            if (est_active(i, j) == 0) {
                ++pruned;
                pruned_mass += truth_contrib.values(i, j);
            }
        }

    SparsityLoss loss;
    loss.sp = static_cast<double>(pruned) / static_cast<double>(m * (m - 1));
    loss.vl_a = total_mass > 0.0 ? pruned_mass / total_mass : 0.0;
    loss.vl_o = off_diag_mass > 0.0 ? pruned_mass / off_diag_mass : 0.0;
    return loss;
}

namespace {

std::vector<double> default_grid(DecompKind kind, int horizon) {
    std::vector<double> grid;
    if (horizon == 1) {
        const double start = kind == DecompKind::fevd ? 0.1 : 0.2;
        for (int i = 0; i < 6; ++i) grid.push_back(start + 0.1 * i);
    } else {
        const double start = kind == DecompKind::fevd ? 1.0 : 2.0;
        for (int i = 0; i < 6; ++i) grid.push_back(start + i);
    }
    return grid;
}

const char* kind_name(DecompKind kind) { return kind == DecompKind::fevd ? "fevd" : "gfevd"; }

ContributionMatrix decompose(const VarFit& fit, int horizon, DecompKind kind) {
    const VmaSequence vma = vma_coefficients(fit.phi, horizon);
    if (kind == DecompKind::fevd)
        return fevd_contributions(vma, cholesky_factor(fit.sigma_hat));
    return gfevd_contributions(vma, fit.sigma_hat);
}

CellReport run_cell(const StudyConfig& cfg, int t_len, int horizon, DecompKind kind) {
    CellReport cell;
    cell.spec_name = cfg.spec.name;
    cell.p = cfg.spec.p;
    cell.t_len = t_len;
    cell.horizon = horizon;
    cell.kind = kind;
    cell.rows.resize(static_cast<std::size_t>(cfg.replications));

    const std::vector<double> grid =
        cfg.grid_constants.empty() ? default_grid(kind, horizon) : cfg.grid_constants;

    TrueModel shared_model;
    if (cfg.hold_model_fixed) {
        DgpSpec spec = cfg.spec;
        spec.seed = derive_seed(cfg.master_seed, 0, 1);
        shared_model = generate_model(spec);
    }

    parallel_for(cfg.replications, cfg.threads, [&](int rep) {
        TrueModel model;
        if (cfg.hold_model_fixed) {
            model = shared_model;
        } else {
            DgpSpec spec = cfg.spec;
            spec.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(rep), 1);
            model = generate_model(spec);
        }
        const std::uint64_t panel_seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(rep), 2);
        const StandardizedPanel panel = standardize(simulate_panel(model, t_len, panel_seed));

        ReplicationRow row;
        row.replication = rep;
        row.seed = panel_seed;

        double lambda;
        if (cfg.tune) {
            TuningConfig tcfg;
            tcfg.candidates = grid;
            tcfg.candidates_are_constants = true;
            tcfg.train_frac = cfg.alpha;
            tcfg.horizon = horizon;
            tcfg.p_lag = cfg.spec.p;
            tcfg.kind = kind;
            tcfg.threads = 1;
            const TuningReport tuned = select_lambda(panel, tcfg);
            lambda = tuned.lambda_star;
            row.c_star = tuned.constants[static_cast<std::size_t>(tuned.winner)];
        } else {
            lambda = cfg.fixed_lambda > 0.0 ? cfg.fixed_lambda : std::log(static_cast<double>(t_len));
            row.c_star = std::numeric_limits<double>::quiet_NaN();
        }
        row.lambda_star = lambda;

        const VarFit fit = fit_var(panel, cfg.spec.p);
        const ContributionMatrix contrib = decompose(fit, horizon, kind);
        const SparseSelection sel = sparsify(contrib, t_len, lambda);
        row.k_hat = sel.k_hat;
        row.cdr = cdr_metrics(sel, model);
        if (cfg.loss_metrics) {
            const ContributionMatrix truth_contrib =
                fevd_contributions(vma_coefficients(model.phi, horizon), cholesky_factor(model.sigma));
            row.loss = sparsity_loss_metrics(sel, model, truth_contrib);
        }
        cell.rows[static_cast<std::size_t>(rep)] = std::move(row);
    });

    double sum1 = 0.0, sum0 = 0.0, suma = 0.0, sp = 0.0, vla = 0.0, vlo = 0.0;
    int with_cdr1 = 0;
    for (const auto& row : cell.rows) {
        if (row.cdr.cdr1) {
            sum1 += *row.cdr.cdr1;
            ++with_cdr1;
        }
        sum0 += row.cdr.cdr0;
        suma += row.cdr.cdra;
        sp += row.loss.sp;
        vla += row.loss.vl_a;
        vlo += row.loss.vl_o;
    }
    const double n = static_cast<double>(cfg.replications);
    if (with_cdr1 > 0) cell.mean_cdr1 = sum1 / with_cdr1;
    cell.mean_cdr0 = sum0 / n;
    cell.mean_cdra = suma / n;
    cell.mean_sp = sp / n;
    cell.mean_vl_a = vla / n;
    cell.mean_vl_o = vlo / n;

    if (cfg.tune) {
        for (double c : grid) {
            int count = 0;
            for (const auto& row : cell.rows)
                if (row.c_star == c) ++count;
            cell.c_star_histogram.emplace_back(c, count);
        }
    }
    return cell;
}

}  // namespace

McReport run_study(const StudyConfig& cfg) {
    if (cfg.replications < 1) throw std::invalid_argument("run_study: need at least one replication");
    if (cfg.t_values.empty() || cfg.horizons.empty() || cfg.kinds.empty())
        throw std::invalid_argument("run_study: empty T, H, or kind list");
    McReport report;
    report.master_seed = cfg.master_seed;
    report.replications = cfg.replications;
    for (int t : cfg.t_values)
        for (int h : cfg.horizons)
            for (DecompKind kind : cfg.kinds) report.cells.push_back(run_cell(cfg, t, h, kind));
    return report;
}

nlohmann::json to_json(const McReport& report) {
    nlohmann::json j;
    j["master_seed"] = report.master_seed;
    j["replications"] = report.replications;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : report.cells) {
        nlohmann::json c;
        c["spec"] = cell.spec_name;
        c["p"] = cell.p;
        c["t_len"] = cell.t_len;
        c["horizon"] = cell.horizon;
        c["kind"] = kind_name(cell.kind);
        c["mean_cdr1"] = cell.mean_cdr1 ? nlohmann::json(*cell.mean_cdr1) : nlohmann::json();
        c["mean_cdr0"] = cell.mean_cdr0;
        c["mean_cdra"] = cell.mean_cdra;
        c["mean_sp"] = cell.mean_sp;
        c["mean_vl_a"] = cell.mean_vl_a;
        c["mean_vl_o"] = cell.mean_vl_o;
        nlohmann::json hist = nlohmann::json::array();
        for (const auto& [value, count] : cell.c_star_histogram) hist.push_back({{"c", value}, {"count", count}});
        c["c_star_histogram"] = std::move(hist);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : cell.rows) {
            nlohmann::json rj;
            rj["replication"] = row.replication;
            rj["seed"] = row.seed;
            rj["k_hat"] = row.k_hat;
            rj["c_star"] = std::isnan(row.c_star) ? nlohmann::json() : nlohmann::json(row.c_star);
            rj["lambda_star"] = row.lambda_star;
            rj["cdr1"] = row.cdr.cdr1 ? nlohmann::json(*row.cdr.cdr1) : nlohmann::json();
            rj["cdr0"] = row.cdr.cdr0;
            rj["cdra"] = row.cdr.cdra;
            rj["sp"] = row.loss.sp;
            rj["vl_a"] = row.loss.vl_a;
            rj["vl_o"] = row.loss.vl_o;
            rows.push_back(std::move(rj));
        }
        c["rows"] = std::move(rows);
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    return j;
}

namespace {

void append_number(std::ostringstream& out, double value) {
    if (std::isnan(value)) return;  // leave the field empty
    out << value;
}

}  // namespace

std::string report_csv(const McReport& report) {
    std::ostringstream out;
    out << "spec,p,t_len,horizon,kind,replication,seed,k_hat,c_star,lambda_star,cdr1,cdr0,cdra,sp,vl_a,vl_o\n";
    out.precision(12);
    for (const auto& cell : report.cells)
        for (const auto& row : cell.rows) {
            out << cell.spec_name << ',' << cell.p << ',' << cell.t_len << ',' << cell.horizon << ','
                << kind_name(cell.kind) << ',' << row.replication << ',' << row.seed << ',' << row.k_hat
                << ',';
            append_number(out, row.c_star);
            out << ',' << row.lambda_star << ',';
            if (row.cdr.cdr1) out << *row.cdr.cdr1;
            out << ',' << row.cdr.cdr0 << ',' << row.cdr.cdra << ',' << row.loss.sp << ',' << row.loss.vl_a
                << ',' << row.loss.vl_o << '\n';
        }
    return out.str();
}

std::string c_star_histogram_csv(const McReport& report) {
    std::ostringstream out;
    out << "spec,p,t_len,horizon,kind,c,count\n";
    for (const auto& cell : report.cells)
        for (const auto& [value, count] : cell.c_star_histogram)
            out << cell.spec_name << ',' << cell.p << ',' << cell.t_len << ',' << cell.horizon << ','
                << kind_name(cell.kind) << ',' << value << ',' << count << '\n';
    return out.str();
}

}  // namespace spillnet
