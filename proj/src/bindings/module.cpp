#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spillnet/fevd.hpp"
#include "spillnet/mc.hpp"
#include "spillnet/metrics.hpp"
#include "spillnet/panel.hpp"
#include "spillnet/shock.hpp"
#include "spillnet/sparsify.hpp"
#include "spillnet/tune.hpp"
#include "spillnet/var.hpp"
#include "spillnet/vma.hpp"

namespace py = pybind11;
using namespace spillnet;

PYBIND11_MODULE(_spillnet, m) {
    m.doc() = "Sparse variance-decomposition spillover networks: VAR estimation, "
              "FEVD/GFEVD, information-criterion edge selection, rolling penalty "
              "tuning, and the Monte Carlo test bench.";

    py::enum_<DecompKind>(m, "DecompKind")
        .value("fevd", DecompKind::fevd)
        .value("gfevd", DecompKind::gfevd);
    py::enum_<MapKind>(m, "MapKind")
        .value("cholesky", MapKind::cholesky)
        .value("user_supplied", MapKind::user_supplied);
    py::enum_<ErrorDist>(m, "ErrorDist")
        .value("gaussian", ErrorDist::gaussian)
        .value("student_t", ErrorDist::student_t);
    py::enum_<IcScale>(m, "IcScale")
        .value("sample_scaled", IcScale::sample_scaled)
        .value("literal", IcScale::literal);
    py::enum_<TableFormat>(m, "TableFormat")
        .value("csv", TableFormat::csv)
        .value("json", TableFormat::json)
        .value("dot", TableFormat::dot);

    py::class_<Panel>(m, "Panel")
        .def(py::init([](Eigen::MatrixXd values, std::vector<std::string> labels) {
                 Panel p;
                 p.values = std::move(values);
                 p.labels = std::move(labels);
                 if (static_cast<Eigen::Index>(p.labels.size()) != p.values.cols())
                     throw std::invalid_argument("Panel: one label per column required");
                 return p;
             }),
             py::arg("values"), py::arg("labels"))
        .def_readonly("values", &Panel::values)
        .def_readonly("labels", &Panel::labels)
        .def_property_readonly("t_len", &Panel::t_len)
        .def_property_readonly("m_dim", &Panel::m_dim);

    py::class_<StandardizedPanel>(m, "StandardizedPanel")
        .def_readonly("panel", &StandardizedPanel::panel)
        .def_readonly("scales", &StandardizedPanel::scales);

    m.def("load_panel", &load_panel, py::arg("path"), py::arg("has_header") = true,
          py::arg("date_column") = false);
    m.def("write_panel", &write_panel, py::arg("panel"), py::arg("path"));
    m.def("standardize", &standardize, py::arg("panel"));
    m.def("residualize_on_factor", &residualize_on_factor, py::arg("panel"), py::arg("factor"));

    py::class_<VarFit>(m, "VarFit")
        .def_readonly("intercept", &VarFit::intercept)
        .def_readonly("phi", &VarFit::phi)
        .def_readonly("residuals", &VarFit::residuals)
        .def_readonly("sigma_hat", &VarFit::sigma_hat)
        .def_readonly("mu", &VarFit::mu)
        .def_readonly("p_lag", &VarFit::p_lag)
        .def_readonly("t_len", &VarFit::t_len);

    m.def("fit_var", py::overload_cast<const StandardizedPanel&, int>(&fit_var), py::arg("panel"),
          py::arg("p"));
    m.def(
        "fit_var_matrix",
        [](const Eigen::MatrixXd& observations, int p) { return fit_var(observations, p); },
        py::arg("observations"), py::arg("p"));
    m.def("companion_spectral_radius",
          py::overload_cast<const std::vector<Eigen::MatrixXd>&>(&companion_spectral_radius),
          py::arg("phi"));
    m.def(
        "one_step_mean",
        [](const VarFit& fit, const Eigen::MatrixXd& recent) { return one_step_mean(fit, recent); },
        py::arg("fit"), py::arg("recent"));

    py::class_<VmaSequence>(m, "VmaSequence")
        .def_readonly("psi", &VmaSequence::psi)
        .def_readonly("horizon", &VmaSequence::horizon);
    m.def("vma_coefficients", &vma_coefficients, py::arg("phi"), py::arg("horizon"));

    py::class_<ShockMap>(m, "ShockMap")
        .def_readonly("p_matrix", &ShockMap::p_matrix)
        .def_readonly("kind", &ShockMap::kind);
    m.def(
        "cholesky_factor", [](const Eigen::MatrixXd& sigma) { return cholesky_factor(sigma); },
        py::arg("sigma"));
    m.def("validate_user_map", &validate_user_map, py::arg("p_matrix"), py::arg("sigma"),
          py::arg("tol") = 1e-6);
    m.def(
        "recover_shocks",
        [](const ShockMap& map, const Eigen::VectorXd& residual) {
            return recover_shocks(map, residual);
        },
        py::arg("map"), py::arg("residual"));

    py::class_<ContributionMatrix>(m, "ContributionMatrix")
        .def_readonly("values", &ContributionMatrix::values)
        .def_readonly("kind", &ContributionMatrix::kind)
        .def_readonly("horizon", &ContributionMatrix::horizon);
    py::class_<FevdTable>(m, "FevdTable")
        .def(py::init([](Eigen::MatrixXd shares, DecompKind kind, int horizon) {
                 return FevdTable{std::move(shares), kind, horizon};
             }),
             py::arg("shares"), py::arg("kind") = DecompKind::fevd, py::arg("horizon") = 1)
        .def_readonly("shares", &FevdTable::shares)
        .def_readonly("kind", &FevdTable::kind)
        .def_readonly("horizon", &FevdTable::horizon);

    m.def("fevd_contributions", &fevd_contributions, py::arg("vma"), py::arg("map"));
    m.def("fevd_table", &fevd_table, py::arg("contrib"));
    m.def(
        "gfevd_contributions",
        [](const VmaSequence& vma, const Eigen::MatrixXd& sigma) {
            return gfevd_contributions(vma, sigma);
        },
        py::arg("vma"), py::arg("sigma"));
    m.def(
        "gfevd_table",
        [](const ContributionMatrix& contrib, const VmaSequence& vma, const Eigen::MatrixXd& sigma) {
            return gfevd_table(contrib, vma, sigma);
        },
        py::arg("contrib"), py::arg("vma"), py::arg("sigma"));

    py::class_<IcTrace>(m, "IcTrace")
        .def_readonly("ic_values", &IcTrace::ic_values)
        .def_readonly("lambda_", &IcTrace::lambda)
        .def_readonly("kind", &IcTrace::kind);
    py::class_<SparseSelection>(m, "SparseSelection")
        .def_readonly("k_hat", &SparseSelection::k_hat)
        .def_readonly("mask", &SparseSelection::mask)
        .def_readonly("masked_contrib", &SparseSelection::masked_contrib)
        .def_readonly("active_set", &SparseSelection::active_set)
        .def_readonly("trace", &SparseSelection::trace);

    m.def("ic_curve", &ic_curve, py::arg("contrib"), py::arg("t_len"), py::arg("lambda"),
          py::arg("scale") = IcScale::sample_scaled);
    m.def("select_k", &select_k, py::arg("trace"));
    m.def("apply_mask", &apply_mask, py::arg("contrib"), py::arg("k_hat"));
    m.def("sparsify", &sparsify, py::arg("contrib"), py::arg("t_len"), py::arg("lambda"),
          py::arg("scale") = IcScale::sample_scaled);

    py::class_<SpilloverSummary>(m, "SpilloverSummary")
        .def_readonly("total_index", &SpilloverSummary::total_index)
        .def_readonly("fix", &SpilloverSummary::fix)
        .def_readonly("tix", &SpilloverSummary::tix)
        .def_readonly("nix", &SpilloverSummary::nix)
        .def_readonly("in_degree", &SpilloverSummary::in_degree)
        .def_readonly("out_degree", &SpilloverSummary::out_degree);
    m.def("spillover_summary", &spillover_summary, py::arg("table"), py::arg("mask"));
    m.def("full_mask", &full_mask, py::arg("m"));
    m.def("export_table", &export_table, py::arg("table"), py::arg("mask"), py::arg("labels"),
          py::arg("format"), py::arg("path"));

    py::class_<TuningConfig>(m, "TuningConfig")
        .def(py::init<>())
        .def_readwrite("candidates", &TuningConfig::candidates)
        .def_readwrite("candidates_are_constants", &TuningConfig::candidates_are_constants)
        .def_readwrite("train_frac", &TuningConfig::train_frac)
        .def_readwrite("horizon", &TuningConfig::horizon)
        .def_readwrite("p_lag", &TuningConfig::p_lag)
        .def_readwrite("kind", &TuningConfig::kind)
        .def_readwrite("ic_scale", &TuningConfig::ic_scale)
        .def_readwrite("threads", &TuningConfig::threads);
    py::class_<TuningReport>(m, "TuningReport")
        .def_readonly("lambdas", &TuningReport::lambdas)
        .def_readonly("constants", &TuningReport::constants)
        .def_readonly("msfe", &TuningReport::msfe)
        .def_readonly("winner", &TuningReport::winner)
        .def_readonly("lambda_star", &TuningReport::lambda_star)
        .def_readonly("forecast_errors", &TuningReport::forecast_errors)
        .def_readonly("s_len", &TuningReport::s_len);
    m.def("poos_msfe", &poos_msfe, py::arg("panel"), py::arg("config"), py::arg("lambda"));
    m.def("select_lambda", &select_lambda, py::arg("panel"), py::arg("config"));

    py::class_<DgpSpec>(m, "DgpSpec")
        .def(py::init<>())
        .def_readwrite("name", &DgpSpec::name)
        .def_readwrite("m", &DgpSpec::m)
        .def_readwrite("p", &DgpSpec::p)
        .def_readwrite("block_sizes", &DgpSpec::block_sizes)
        .def_readwrite("error_dist", &DgpSpec::error_dist)
        .def_readwrite("nu", &DgpSpec::nu)
        .def_readwrite("weak_fill", &DgpSpec::weak_fill)
        .def_readwrite("diagonal_only", &DgpSpec::diagonal_only)
        .def_readwrite("seed", &DgpSpec::seed);
    m.def("dgp_preset", &dgp_preset, py::arg("name"), py::arg("p"));

    py::class_<TrueModel>(m, "TrueModel")
        .def_readonly("phi", &TrueModel::phi)
        .def_readonly("sigma", &TrueModel::sigma)
        .def_readonly("active_set", &TrueModel::active_set)
        .def_readonly("spectral_radius", &TrueModel::spectral_radius);
    m.def("generate_model", &generate_model, py::arg("spec"));
    m.def("simulate_panel", &simulate_panel, py::arg("model"), py::arg("t_len"), py::arg("seed"));

    py::class_<CdrMetrics>(m, "CdrMetrics")
        .def_readonly("cdr1", &CdrMetrics::cdr1)
        .def_readonly("cdr0", &CdrMetrics::cdr0)
        .def_readonly("cdra", &CdrMetrics::cdra);
    m.def("cdr_metrics", &cdr_metrics, py::arg("est"), py::arg("truth"));

    py::class_<SparsityLoss>(m, "SparsityLoss")
        .def_readonly("sp", &SparsityLoss::sp)
        .def_readonly("vl_a", &SparsityLoss::vl_a)
        .def_readonly("vl_o", &SparsityLoss::vl_o);
    m.def("sparsity_loss_metrics", &sparsity_loss_metrics, py::arg("est"), py::arg("truth"),
          py::arg("truth_contrib"));
}
