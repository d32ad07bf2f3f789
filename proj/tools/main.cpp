#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spillnet/fevd.hpp"
#include "spillnet/mc.hpp"
#include "spillnet/metrics.hpp"
#include "spillnet/panel.hpp"
#include "spillnet/parallel.hpp"
#include "spillnet/shock.hpp"
#include "spillnet/sparsify.hpp"
#include "spillnet/tune.hpp"
#include "spillnet/var.hpp"
#include "spillnet/vma.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string input;
    bool no_header = false;
    bool date_col = false;
    int p = 1;
    int horizon = 10;
    std::string kind = "gfevd";
    double alpha = 0.9;
    int threads = 0;
    std::string out_dir = ".";
    std::string factor_col;
};

int env_threads() {
    if (const char* env = std::getenv("SPILLNET_THREADS")) {
        const int value = std::atoi(env);
        if (value > 0) return value;
    }
    return 0;  // hardware default
}

spillnet::DecompKind parse_kind(const std::string& kind) {
    if (kind == "fevd") return spillnet::DecompKind::fevd;
    if (kind == "gfevd") return spillnet::DecompKind::gfevd;
    throw std::invalid_argument("unknown kind '" + kind + "' (expected fevd or gfevd)");
}

spillnet::Panel load_input_panel(const CommonOpts& opts, Eigen::VectorXd* factor_out = nullptr) {
    spillnet::Panel panel = spillnet::load_panel(opts.input, !opts.no_header, opts.date_col);
    if (!opts.factor_col.empty()) {
        Eigen::Index idx = -1;
        for (Eigen::Index j = 0; j < panel.m_dim(); ++j)
            if (panel.labels[static_cast<std::size_t>(j)] == opts.factor_col) idx = j;
        if (idx < 0) {
            try {
                idx = std::stol(opts.factor_col);
            } catch (...) {
                idx = -1;
            }
        }
        if (idx < 0 || idx >= panel.m_dim())
            throw std::invalid_argument(opts.input + ": factor column '" + opts.factor_col + "' not found");
        Eigen::VectorXd factor = panel.values.col(idx);
        spillnet::Panel reduced;
        reduced.row_ids = panel.row_ids;
        reduced.values.resize(panel.t_len(), panel.m_dim() - 1);
        Eigen::Index dst = 0;
        for (Eigen::Index j = 0; j < panel.m_dim(); ++j) {
            if (j == idx) continue;
            reduced.values.col(dst) = panel.values.col(j);
            reduced.labels.push_back(panel.labels[static_cast<std::size_t>(j)]);
            ++dst;
        }
        panel = spillnet::residualize_on_factor(reduced, factor);
        if (factor_out) *factor_out = factor;
    }
    if (panel.m_dim() < 2)
        throw std::invalid_argument(opts.input + ": a VAR needs at least 2 data columns");
    return panel;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<double> default_constants(spillnet::DecompKind kind, int horizon) {
    std::vector<double> grid;
    const bool short_h = horizon == 1;
    const double start = kind == spillnet::DecompKind::fevd ? (short_h ? 0.1 : 1.0) : (short_h ? 0.2 : 2.0);
    for (int i = 0; i < 6; ++i) grid.push_back(short_h ? start + 0.1 * i : start + i);
    return grid;
}

int cmd_estimate(const CommonOpts& opts, std::optional<double> lambda_opt,
                 const std::vector<double>& grid, bool grid_raw, const std::string& user_p_path,
                 double user_p_tol, bool no_mask_indices) {
    const spillnet::DecompKind kind = parse_kind(opts.kind);
    const spillnet::Panel raw = load_input_panel(opts);
    const spillnet::StandardizedPanel panel = spillnet::standardize(raw);
    const Eigen::Index t_len = panel.panel.t_len();

    const spillnet::VarFit fit = spillnet::fit_var(panel, opts.p);
    const double radius = spillnet::companion_spectral_radius(fit);
    if (radius >= 1.0)
        std::cerr << "warning: companion spectral radius " << radius
                  << " >= 1; the fitted VAR is not stationary\n";

    const spillnet::VmaSequence vma = spillnet::vma_coefficients(fit.phi, opts.horizon);
    spillnet::ContributionMatrix contrib;
    spillnet::FevdTable table;
    if (kind == spillnet::DecompKind::fevd) {
        spillnet::ShockMap map;
        if (!user_p_path.empty())
            map = spillnet::validate_user_map(spillnet::load_matrix_csv(user_p_path), fit.sigma_hat,
                                              user_p_tol);
        else
            map = spillnet::cholesky_factor(fit.sigma_hat);
        contrib = spillnet::fevd_contributions(vma, map);
        table = spillnet::fevd_table(contrib);
    } else {
        contrib = spillnet::gfevd_contributions(vma, fit.sigma_hat);
        table = spillnet::gfevd_table(contrib, vma, fit.sigma_hat);
    }

    double lambda;
    json tuning_json;
    if (!grid.empty()) {
        spillnet::TuningConfig tcfg;
        tcfg.candidates = grid;
        tcfg.candidates_are_constants = !grid_raw;
        tcfg.train_frac = opts.alpha;
        tcfg.horizon = opts.horizon;
        tcfg.p_lag = opts.p;
        tcfg.kind = kind;
        tcfg.threads = opts.threads > 0 ? opts.threads : env_threads();
        const spillnet::TuningReport tuned = spillnet::select_lambda(panel, tcfg);
        lambda = tuned.lambda_star;
        tuning_json = spillnet::to_json(tuned);
    } else if (lambda_opt) {
        lambda = *lambda_opt;
    } else {
        lambda = std::log(static_cast<double>(t_len));
    }

    const spillnet::SparseSelection sel = spillnet::sparsify(contrib, t_len, lambda);
    const spillnet::SpilloverSummary masked = spillnet::spillover_summary(table, sel.mask);
    const spillnet::SpilloverSummary dense =
        spillnet::spillover_summary(table, spillnet::full_mask(table.m_dim()));

    fs::create_directories(opts.out_dir);
    const fs::path dir(opts.out_dir);
    spillnet::export_table(table, spillnet::full_mask(table.m_dim()), panel.panel.labels,
                           spillnet::TableFormat::csv, (dir / "fevd_table.csv").string());
    spillnet::export_table(table, sel.mask, panel.panel.labels, spillnet::TableFormat::json,
                           (dir / "fevd_table.json").string());
    spillnet::export_table(table, sel.mask, panel.panel.labels, spillnet::TableFormat::dot,
                           (dir / "network.dot").string());
    write_json(dir / "selection.json", spillnet::to_json(sel));
    if (!tuning_json.is_null()) write_json(dir / "tuning.json", tuning_json);

    json summary;
    summary["kind"] = opts.kind;
    summary["horizon"] = opts.horizon;
    summary["p"] = opts.p;
    summary["t_len"] = t_len;
    summary["lambda"] = lambda;
    summary["k_hat"] = sel.k_hat;
    summary["spectral_radius"] = radius;
    summary["indices_use_mask"] = !no_mask_indices;
    summary["total_index"] = no_mask_indices ? dense.total_index : masked.total_index;
    summary["masked"] = spillnet::to_json(masked, panel.panel.labels);
    summary["dense"] = spillnet::to_json(dense, panel.panel.labels);
    write_json(dir / "summary.json", summary);
    write_json(dir / "var_fit.json", spillnet::to_json(fit));

    std::cout << "selected " << sel.k_hat << " of " << table.m_dim() * (table.m_dim() - 1)
              << " off-diagonal links (lambda=" << lambda << "); total spillover index "
              << (no_mask_indices ? dense.total_index : masked.total_index) << "% ("
              << (no_mask_indices ? "dense" : "masked") << ")\n";
    return 0;
}

int cmd_tune(const CommonOpts& opts, std::vector<double> grid, bool grid_raw) {
    const spillnet::DecompKind kind = parse_kind(opts.kind);
    const spillnet::Panel raw = load_input_panel(opts);
    const spillnet::StandardizedPanel panel = spillnet::standardize(raw);

    spillnet::TuningConfig tcfg;
    if (grid.empty()) grid = default_constants(kind, opts.horizon);
    tcfg.candidates = grid;
    tcfg.candidates_are_constants = !grid_raw;
    tcfg.train_frac = opts.alpha;
    tcfg.horizon = opts.horizon;
    tcfg.p_lag = opts.p;
    tcfg.kind = kind;
    tcfg.threads = opts.threads > 0 ? opts.threads : env_threads();
    const spillnet::TuningReport tuned = spillnet::select_lambda(panel, tcfg);

    fs::create_directories(opts.out_dir);
    const fs::path dir(opts.out_dir);
    write_json(dir / "tuning.json", spillnet::to_json(tuned));
    std::ostringstream csv;
    csv << "candidate,c,lambda,msfe\n";
    csv.precision(12);
    for (std::size_t q = 0; q < tuned.lambdas.size(); ++q) {
        csv << q << ',';
        if (!tuned.constants.empty()) csv << tuned.constants[q];
        csv << ',' << tuned.lambdas[q] << ',' << tuned.msfe[q] << '\n';
    }
    write_text(dir / "tuning_msfe.csv", csv.str());

    std::cout << "lambda_star=" << tuned.lambda_star;
    if (!tuned.constants.empty())
        std::cout << " (c=" << tuned.constants[static_cast<std::size_t>(tuned.winner)] << ")";
    std::cout << " with POOS-MSFE " << tuned.msfe[static_cast<std::size_t>(tuned.winner)] << "\n";
    return 0;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

spillnet::StudyConfig parse_study_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": file not found");
    spillnet::StudyConfig cfg;
    std::string spec_name = "S1";
    int p = 1;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto strip = [](std::string s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
            return s;
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key == "spec") spec_name = value;
        else if (key == "p") p = std::stoi(value);
        else if (key == "T") for (const auto& v : split_list(value)) cfg.t_values.push_back(std::stoi(v));
        else if (key == "H") for (const auto& v : split_list(value)) cfg.horizons.push_back(std::stoi(v));
        else if (key == "kind") for (const auto& v : split_list(value)) cfg.kinds.push_back(parse_kind(v));
        else if (key == "reps") cfg.replications = std::stoi(value);
        else if (key == "seed") cfg.master_seed = std::stoull(value);
        else if (key == "alpha") cfg.alpha = std::stod(value);
        else if (key == "grid") for (const auto& v : split_list(value)) cfg.grid_constants.push_back(std::stod(v));
        else if (key == "tune") cfg.tune = value == "true" || value == "1";
        else if (key == "lambda") cfg.fixed_lambda = std::stod(value);
        else if (key == "hold_model") cfg.hold_model_fixed = value == "true" || value == "1";
        else if (key == "loss") cfg.loss_metrics = value == "true" || value == "1";
        else if (key == "threads") cfg.threads = std::stoi(value);
        else throw std::invalid_argument(path + ": unknown study key '" + key + "'");
    }
    cfg.spec = spillnet::dgp_preset(spec_name, p);
    return cfg;
}

int cmd_simulate(spillnet::StudyConfig cfg, const std::string& out_dir) {
    if (cfg.t_values.empty()) cfg.t_values.push_back(500);
    if (cfg.horizons.empty()) cfg.horizons.push_back(5);
    if (cfg.kinds.empty()) cfg.kinds.push_back(spillnet::DecompKind::gfevd);
    if (cfg.spec.weak_fill > 0.0) cfg.loss_metrics = true;
    if (cfg.threads == 0) cfg.threads = env_threads();

    const spillnet::McReport report = spillnet::run_study(cfg);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_json(dir / "mc_report.json", spillnet::to_json(report));
    write_text(dir / "mc_report.csv", spillnet::report_csv(report));
    write_text(dir / "cstar_hist.csv", spillnet::c_star_histogram_csv(report));

    for (const auto& cell : report.cells) {
        std::cout << cell.spec_name << " p=" << cell.p << " T=" << cell.t_len << " H=" << cell.horizon
                  << " kind=" << (cell.kind == spillnet::DecompKind::fevd ? "fevd" : "gfevd") << ":";
        if (cell.mean_cdr1) std::cout << " CDR1=" << *cell.mean_cdr1;
        std::cout << " CDR0=" << cell.mean_cdr0 << " CDRa=" << cell.mean_cdra;
        if (cfg.loss_metrics)
            std::cout << " SP=" << cell.mean_sp << " VLa=" << cell.mean_vl_a << " VLo=" << cell.mean_vl_o;
        std::cout << "\n";
    }
    return 0;
}

int cmd_export(const std::string& table_path, const std::string& selection_path,
               const std::string& format_name, const std::string& out_path) {
    std::ifstream in(table_path);
    if (!in) throw std::invalid_argument(table_path + ": file not found");
    json j = json::parse(in);

    spillnet::FevdTable table;
    table.kind = j.at("kind").get<std::string>() == "fevd" ? spillnet::DecompKind::fevd
                                                           : spillnet::DecompKind::gfevd;
    table.horizon = j.at("horizon").get<int>();
    const auto& rows = j.at("shares");
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    table.shares.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = 0; k < m; ++k) table.shares(i, k) = rows[i][k].get<double>();
    std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();

    Eigen::MatrixXi mask = spillnet::full_mask(m);
    if (!selection_path.empty()) {
        std::ifstream sel_in(selection_path);
        if (!sel_in) throw std::invalid_argument(selection_path + ": file not found");
        json sel = json::parse(sel_in);
        mask.setIdentity();
        for (const auto& pair : sel.at("active_set"))
            mask(pair[0].get<int>(), pair[1].get<int>()) = 1;
    } else if (j.contains("mask")) {
        const auto& mask_rows = j["mask"];
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index k = 0; k < m; ++k) mask(i, k) = mask_rows[i][k].get<int>();
        mask.diagonal().setOnes();
    }

    spillnet::TableFormat format;
    if (format_name == "csv") format = spillnet::TableFormat::csv;
    else if (format_name == "json") format = spillnet::TableFormat::json;
    else if (format_name == "dot") format = spillnet::TableFormat::dot;
    else throw std::invalid_argument("unknown export format '" + format_name + "'");

    spillnet::export_table(table, mask, labels, format, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse variance-decomposition spillover networks for multivariate time series"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::optional<double> lambda_opt;
    std::vector<double> grid;
    bool grid_raw = false;
    std::string user_p_path;
    double user_p_tol = 1e-6;
    bool no_mask_indices = false;

    auto add_common = [&](CLI::App* cmd, bool wants_panel) {
        if (wants_panel) {
            cmd->add_option("--input", opts.input, "Input CSV panel")->required();
            cmd->add_flag("--no-header", opts.no_header, "Input has no header row");
            cmd->add_flag("--date-col", opts.date_col, "First column is an opaque date label");
            cmd->add_option("--factor-col", opts.factor_col,
                            "Residualize on this column (label or 0-based index) before estimation");
        }
        cmd->add_option("--p", opts.p, "VAR lag order")->check(CLI::PositiveNumber);
        cmd->add_option("--H", opts.horizon, "Decomposition horizon")->check(CLI::PositiveNumber);
        cmd->add_option("--kind", opts.kind, "Decomposition kind: fevd or gfevd");
        cmd->add_option("--alpha", opts.alpha, "Training fraction for rolling tuning");
        cmd->add_option("--threads", opts.threads,
                        "Worker threads (default: SPILLNET_THREADS or all cores)");
        cmd->add_option("--out", opts.out_dir, "Output directory");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "Estimate a sparse spillover network");
    add_common(estimate, true);
    estimate->add_option("--lambda", lambda_opt, "Penalty value (default: log T)");
    estimate->add_option("--grid", grid, "Tune the penalty over these constants c (lambda = c log(T)/m)")
        ->delimiter(',');
    estimate->add_flag("--grid-raw", grid_raw, "Treat --grid values as raw penalties");
    estimate->add_option("--user-p", user_p_path, "User-supplied shock map P as CSV (fevd kind)");
    estimate->add_option("--user-p-tol", user_p_tol, "Acceptance tolerance for max|PP'-Sigma|");
    estimate->add_flag("--no-mask-indices", no_mask_indices,
                       "Compute spillover indices from the dense table instead of the masked one");

    CLI::App* tune = app.add_subcommand("tune", "Select the penalty by rolling forecast MSFE");
    add_common(tune, true);
    tune->add_option("--grid", grid, "Candidate constants c (lambda = c log(T)/m)")->delimiter(',');
    tune->add_flag("--grid-raw", grid_raw, "Treat --grid values as raw penalties");

    CLI::App* simulate = app.add_subcommand("simulate", "Run Monte Carlo studies on the bundled designs");
    std::string spec_name = "S1";
    std::string config_path;
    spillnet::StudyConfig study;
    std::vector<std::string> kind_names;
    simulate->add_option("--config", config_path, "Plain-text key=value study file");
    simulate->add_option("--spec", spec_name, "Design name: S1 S2 L1 L2 L3 L4 D1 D2 H1 H2");
    simulate->add_option("--p", study.spec.p, "VAR lag order");
    simulate->add_option("--T", study.t_values, "Sample sizes")->delimiter(',');
    simulate->add_option("--H", study.horizons, "Horizons")->delimiter(',');
    simulate->add_option("--kind", kind_names, "Decomposition kinds")->delimiter(',');
    simulate->add_option("--reps", study.replications, "Replications");
    simulate->add_option("--seed", study.master_seed, "Master seed");
    simulate->add_option("--alpha", study.alpha, "Training fraction");
    simulate->add_option("--grid", study.grid_constants, "Tuning constants")->delimiter(',');
    bool no_tune = false;
    simulate->add_flag("--no-tune", no_tune, "Skip tuning; use --lambda or log T");
    simulate->add_option("--lambda", study.fixed_lambda, "Fixed penalty when --no-tune");
    simulate->add_flag("--hold-model", study.hold_model_fixed, "Reuse one model draw across replications");
    simulate->add_flag("--loss", study.loss_metrics, "Report SP/VL metrics (default for D designs)");
    simulate->add_option("--threads", study.threads, "Worker threads");
    std::string sim_out = ".";
    simulate->add_option("--out", sim_out, "Output directory");

    CLI::App* exporter = app.add_subcommand("export", "Re-render a saved table as csv, json, or dot");
    std::string table_path, selection_path, format_name = "dot", out_path = "network.dot";
    exporter->add_option("--input", table_path, "fevd_table.json from estimate")->required();
    exporter->add_option("--selection", selection_path, "selection.json providing the mask");
    exporter->add_option("--format", format_name, "csv, json, or dot");
    exporter->add_option("--out", out_path, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (estimate->parsed())
            return cmd_estimate(opts, lambda_opt, grid, grid_raw, user_p_path, user_p_tol,
                                no_mask_indices);
        if (tune->parsed()) return cmd_tune(opts, grid, grid_raw);
        if (simulate->parsed()) {
            spillnet::StudyConfig cfg;
            if (!config_path.empty()) {
                cfg = parse_study_config_file(config_path);
            } else {
                cfg = study;
                cfg.spec = spillnet::dgp_preset(spec_name, study.spec.p);
                cfg.loss_metrics = study.loss_metrics;
                for (const auto& name : kind_names) cfg.kinds.push_back(parse_kind(name));
            }
            return cmd_simulate(cfg, sim_out);
        }
        if (exporter->parsed()) return cmd_export(table_path, selection_path, format_name, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
