#include "spillnet/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spillnet {

namespace {

void check_mask(const FevdTable& table, const Eigen::MatrixXi& mask, const char* where) {
    const Eigen::Index m = table.m_dim();
    if (mask.rows() != m || mask.cols() != m || table.shares.cols() != m)
        throw std::invalid_argument(std::string(where) + ": table and mask dimensions differ");
    for (Eigen::Index i = 0; i < m; ++i)
        if (mask(i, i) != 1)
            throw std::invalid_argument(std::string(where) + ": mask diagonal must be all ones");
}

Eigen::MatrixXd masked_shares(const FevdTable& table, const Eigen::MatrixXi& mask) {
    return table.shares.cwiseProduct(mask.cast<double>());
}

std::string format_percent(double share) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", share * 100.0);
    return buf;
}

}  // namespace

Eigen::MatrixXi full_mask(Eigen::Index m) {
    return Eigen::MatrixXi::Ones(m, m);
}

SpilloverSummary spillover_summary(const FevdTable& table, const Eigen::MatrixXi& mask) {
    check_mask(table, mask, "spillover_summary");
    const Eigen::Index m = table.m_dim();
    const Eigen::MatrixXd shares = masked_shares(table, mask);

    SpilloverSummary s;
    s.fix = Eigen::VectorXd::Zero(m);
    s.tix = Eigen::VectorXd::Zero(m);
    s.in_degree = Eigen::VectorXi::Zero(m);
    s.out_degree = Eigen::VectorXi::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            s.fix(i) += shares(i, j) * 100.0;
            s.tix(j) += shares(i, j) * 100.0;
            if (mask(i, j) == 1) {
                s.in_degree(i) += 1;
                s.out_degree(j) += 1;
            }
        }
    }
    s.nix = s.tix - s.fix;
    s.total_index = s.fix.sum() / static_cast<double>(m);
    return s;
}

void export_table(const FevdTable& table, const Eigen::MatrixXi& mask,
                  const std::vector<std::string>& labels, TableFormat format,
                  const std::string& path) {
    check_mask(table, mask, "export_table");
    const Eigen::Index m = table.m_dim();
    if (static_cast<Eigen::Index>(labels.size()) != m)
        throw std::invalid_argument("export_table: label count does not match table");

    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    const Eigen::MatrixXd shares = masked_shares(table, mask);
    const SpilloverSummary summary = spillover_summary(table, mask);

    switch (format) {
        case TableFormat::csv: {
            out << "To\\From";
            for (const auto& label : labels) out << ',' << label;
            out << ",FIX\n";
            for (Eigen::Index i = 0; i < m; ++i) {
                out << labels[static_cast<std::size_t>(i)];
                for (Eigen::Index j = 0; j < m; ++j) out << ',' << format_percent(shares(i, j));
                out << ',' << format_percent(summary.fix(i) / 100.0) << '\n';
            }
            out << "TIX";
            for (Eigen::Index j = 0; j < m; ++j) out << ',' << format_percent(summary.tix(j) / 100.0);
            out << ',' << format_percent(summary.total_index / 100.0) << '\n';
            out << "IN";
            for (Eigen::Index j = 0; j < m; ++j) out << ',' << summary.in_degree(j);
            out << ",\nOUT";
            for (Eigen::Index j = 0; j < m; ++j) out << ',' << summary.out_degree(j);
            out << ",\n";
            break;
        }
        case TableFormat::json: {
            nlohmann::json j;
            j["labels"] = labels;
            j["kind"] = table.kind == DecompKind::fevd ? "fevd" : "gfevd";
            j["horizon"] = table.horizon;
            nlohmann::json rows = nlohmann::json::array();
            nlohmann::json mask_rows = nlohmann::json::array();
            for (Eigen::Index i = 0; i < m; ++i) {
                nlohmann::json row = nlohmann::json::array();
                nlohmann::json mask_row = nlohmann::json::array();
                for (Eigen::Index k = 0; k < m; ++k) {
                    row.push_back(table.shares(i, k));
                    mask_row.push_back(mask(i, k));
                }
                rows.push_back(std::move(row));
                mask_rows.push_back(std::move(mask_row));
            }
            j["shares"] = std::move(rows);
            j["mask"] = std::move(mask_rows);
            out << j.dump(2) << '\n';
            break;
        }
        case TableFormat::dot: {
            out << "digraph spillovers {\n";
            char buf[64];
            for (Eigen::Index i = 0; i < m; ++i) {
                const double mass = summary.tix(i) + summary.fix(i);
                const int net_sign = summary.nix(i) > 0.0 ? 1 : (summary.nix(i) < 0.0 ? -1 : 0);
                std::snprintf(buf, sizeof(buf), "%.6g", mass);
                out << "  \"" << labels[static_cast<std::size_t>(i)] << "\" [mass=" << buf
                    << ", net_sign=" << net_sign << "];\n";
            }
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j) {
                    if (i == j || mask(i, j) == 0) continue;
                    std::snprintf(buf, sizeof(buf), "%.10g", shares(i, j));
                    out << "  \"" << labels[static_cast<std::size_t>(j)] << "\" -> \""
                        << labels[static_cast<std::size_t>(i)] << "\" [weight=" << buf << "];\n";
                }
            out << "}\n";
            break;
        }
    }
}

nlohmann::json to_json(const SpilloverSummary& summary, const std::vector<std::string>& labels) {
    nlohmann::json j;
    j["labels"] = labels;
    j["total_index"] = summary.total_index;
    j["fix"] = std::vector<double>(summary.fix.data(), summary.fix.data() + summary.fix.size());
    j["tix"] = std::vector<double>(summary.tix.data(), summary.tix.data() + summary.tix.size());
    j["nix"] = std::vector<double>(summary.nix.data(), summary.nix.data() + summary.nix.size());
    j["in_degree"] =
        std::vector<int>(summary.in_degree.data(), summary.in_degree.data() + summary.in_degree.size());
    j["out_degree"] =
        std::vector<int>(summary.out_degree.data(), summary.out_degree.data() + summary.out_degree.size());
    return j;
}

}  // namespace spillnet
