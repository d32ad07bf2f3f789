#include "spillnet/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spillnet {

namespace {

struct RankedEntry {
    double value;
    int row;
    int col;
};

// Off-diagonal contributions sorted by descending value; among equal values
// the smaller (row, col) in row-major order comes first.
std::vector<RankedEntry> rank_off_diagonals(const ContributionMatrix& contrib) {
    const Eigen::Index m = contrib.m_dim();
    std::vector<RankedEntry> entries;
    entries.reserve(static_cast<std::size_t>(m * (m - 1)));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j)
                entries.push_back({contrib.values(i, j), static_cast<int>(i), static_cast<int>(j)});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RankedEntry& a, const RankedEntry& b) { return a.value > b.value; });
    return entries;
}

}  // namespace

IcTrace ic_curve(const ContributionMatrix& contrib, Eigen::Index t_len, double lambda,
                 IcScale scale) {
    const Eigen::Index m = contrib.m_dim();
    if (m < 2) throw std::invalid_argument("ic_curve: need at least 2 series");
    if (t_len < 2) throw std::invalid_argument("ic_curve: sample too small");
    if (lambda <= 0.0) throw std::invalid_argument("ic_curve: penalty must be positive");

    const auto ranked = rank_off_diagonals(contrib);
    const double fit_scale = scale == IcScale::sample_scaled ? 2.0 * static_cast<double>(t_len) : 2.0;

    IcTrace trace;
    trace.lambda = lambda;
    trace.kind = contrib.kind;
    trace.ic_values.reserve(ranked.size());
    double explained = 0.0;
    bool overflowed = false;
    for (std::size_t k = 1; k <= ranked.size(); ++k) {
        explained += ranked[k - 1].value;
        const double base = static_cast<double>(m) - explained;
        if (overflowed || base <= 0.0) {
            overflowed = true;
            trace.ic_values.push_back(std::numeric_limits<double>::infinity());
        } else {
            trace.ic_values.push_back(fit_scale * std::log(base) + static_cast<double>(k) * lambda);
        }
    }
    return trace;
}

int select_k(const IcTrace& trace) {
    if (trace.ic_values.empty()) throw std::invalid_argument("select_k: empty trace");
    int best = 1;
    double best_value = trace.ic_values.front();
    for (std::size_t k = 2; k <= trace.ic_values.size(); ++k) {
        if (trace.ic_values[k - 1] < best_value) {
            best_value = trace.ic_values[k - 1];
            best = static_cast<int>(k);
        }
    }
    return best;
}

SparseSelection apply_mask(const ContributionMatrix& contrib, int k_hat) {
    const Eigen::Index m = contrib.m_dim();
    const int slots = static_cast<int>(m * (m - 1));
    if (k_hat < 1 || k_hat > slots)
        throw std::invalid_argument("apply_mask: k out of range 1..m^2-m");

    const auto ranked = rank_off_diagonals(contrib);
    SparseSelection sel;
    sel.k_hat = k_hat;
    sel.mask = Eigen::MatrixXi::Identity(m, m);
    sel.masked_contrib = contrib;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j) sel.masked_contrib.values(i, j) = 0.0;
    sel.active_set.reserve(static_cast<std::size_t>(k_hat));
    for (int l = 0; l < k_hat; ++l) {
        const auto& entry = ranked[static_cast<std::size_t>(l)];
        sel.mask(entry.row, entry.col) = 1;
        sel.masked_contrib.values(entry.row, entry.col) = entry.value;
        sel.active_set.emplace_back(entry.row, entry.col);
    }
    return sel;
}

SparseSelection sparsify(const ContributionMatrix& contrib, Eigen::Index t_len, double lambda,
                         IcScale scale) {
    IcTrace trace = ic_curve(contrib, t_len, lambda, scale);
    SparseSelection sel = apply_mask(contrib, select_k(trace));
    sel.trace = std::move(trace);
    return sel;
}

nlohmann::json to_json(const SparseSelection& selection) {
    nlohmann::json j;
    j["k_hat"] = selection.k_hat;
    j["lambda"] = selection.trace.lambda;
    j["index_base"] = 0;
    nlohmann::json active = nlohmann::json::array();
    for (const auto& [i, k] : selection.active_set) active.push_back({i, k});
    j["active_set"] = std::move(active);
    nlohmann::json masked = nlohmann::json::array();
    const auto& values = selection.masked_contrib.values;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < values.cols(); ++k) row.push_back(values(i, k));
        masked.push_back(std::move(row));
    }
    j["masked"] = std::move(masked);
    nlohmann::json ic = nlohmann::json::array();
    for (double v : selection.trace.ic_values)
        ic.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
    j["ic"] = std::move(ic);
    j["kind"] = selection.masked_contrib.kind == DecompKind::fevd ? "fevd" : "gfevd";
    j["horizon"] = selection.masked_contrib.horizon;
    return j;
}

}  // namespace spillnet
