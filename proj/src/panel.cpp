#include "spillnet/panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace spillnet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.emplace_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.emplace_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

// Strict numeric parse; rejects blanks and trailing junk. row/col are
// 1-based positions in the file for the diagnostic.
double parse_cell(const std::string& cell, const std::string& path, std::size_t row, std::size_t col) {
    if (cell.empty()) {
        std::ostringstream msg;
        msg << path << ": missing value at row " << row << ", column " << col;
        throw std::invalid_argument(msg.str());
    }
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        std::ostringstream msg;
        msg << path << ": non-numeric cell '" << cell << "' at row " << row << ", column " << col;
        throw std::invalid_argument(msg.str());
    }
    return value;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": file not found");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_line(line));
    }
    if (rows.empty()) throw std::invalid_argument(path + ": empty file");
    return rows;
}

}  // namespace

Panel load_panel(const std::string& path, bool has_header, bool date_column) {
    auto rows = read_rows(path);

    const std::size_t width = rows.front().size();
    const std::size_t first_data_col = date_column ? 1 : 0;
    if (width <= first_data_col)
        throw std::invalid_argument(path + ": no data columns");

    Panel panel;
    std::size_t data_start = 0;
    if (has_header) {
        for (std::size_t c = first_data_col; c < width; ++c) panel.labels.push_back(rows[0][c]);
        data_start = 1;
        if (rows.size() == data_start) throw std::invalid_argument(path + ": header but no data rows");
    } else {
        for (std::size_t c = first_data_col; c < width; ++c)
            panel.labels.push_back("V" + std::to_string(c - first_data_col + 1));
    }
    std::set<std::string> seen;
    for (const auto& label : panel.labels)
        if (!seen.insert(label).second)
            throw std::invalid_argument(path + ": duplicate series label '" + label + "'");

    const std::size_t t_len = rows.size() - data_start;
    const std::size_t m = width - first_data_col;
    panel.values.resize(static_cast<Eigen::Index>(t_len), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < t_len; ++r) {
        const auto& row = rows[r + data_start];
        if (row.size() != width) {
            std::ostringstream msg;
            msg << path << ": ragged row " << (r + data_start + 1) << " has " << row.size()
                << " cells, expected " << width;
            throw std::invalid_argument(msg.str());
        }
        if (date_column) panel.row_ids.push_back(row[0]);
        for (std::size_t c = first_data_col; c < width; ++c) {
            double v = parse_cell(row[c], path, r + data_start + 1, c + 1);
            if (std::isnan(v)) {
                std::ostringstream msg;
                msg << path << ": missing value at row " << (r + data_start + 1) << ", column " << (c + 1);
                throw std::invalid_argument(msg.str());
            }
            panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - first_data_col)) = v;
        }
    }
    return panel;
}

void write_panel(const Panel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    const bool with_dates = !panel.row_ids.empty();
    if (with_dates) out << "date,";
    for (Eigen::Index j = 0; j < panel.m_dim(); ++j)
        out << panel.labels[static_cast<std::size_t>(j)] << (j + 1 < panel.m_dim() ? "," : "\n");
    char buf[64];
    for (Eigen::Index t = 0; t < panel.t_len(); ++t) {
        if (with_dates) out << panel.row_ids[static_cast<std::size_t>(t)] << ',';
        for (Eigen::Index j = 0; j < panel.m_dim(); ++j) {
            auto res = std::to_chars(buf, buf + sizeof(buf), panel.values(t, j));
            out.write(buf, res.ptr - buf);
            out.put(j + 1 < panel.m_dim() ? ',' : '\n');
        }
    }
}

StandardizedPanel standardize(const Panel& panel) {
    const Eigen::Index t = panel.t_len();
    const Eigen::Index m = panel.m_dim();
    if (t < 2) throw std::invalid_argument("standardize: need at least 2 observations");
    StandardizedPanel out;
    out.panel = panel;
    out.scales.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = panel.values.col(j);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / static_cast<double>(t - 1);
        if (var <= 0.0)
            throw std::invalid_argument("standardize: series '" + panel.labels[static_cast<std::size_t>(j)] +
                                        "' has zero variance");
        const double sd = std::sqrt(var);
        out.scales(j) = sd;
        out.panel.values.col(j) /= sd;
    }
    return out;
}

Panel residualize_on_factor(const Panel& panel, const Eigen::VectorXd& factor) {
    const Eigen::Index t = panel.t_len();
    if (factor.size() != t)
        throw std::invalid_argument("residualize_on_factor: factor length does not match panel");
    const double f_mean = factor.mean();
    const double f_ss = (factor.array() - f_mean).square().sum();
    if (f_ss <= 0.0)
        throw std::invalid_argument("residualize_on_factor: constant factor is collinear with the intercept");
    Panel out = panel;
    for (Eigen::Index j = 0; j < panel.m_dim(); ++j) {
        const auto col = panel.values.col(j);
        const double slope = ((factor.array() - f_mean) * (col.array() - col.mean())).sum() / f_ss;
        const double intercept = col.mean() - slope * f_mean;
        out.values.col(j) = col.array() - intercept - slope * factor.array();
    }
    return out;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    auto rows = read_rows(path);
    const std::size_t width = rows.front().size();
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            std::ostringstream msg;
            msg << path << ": ragged row " << (r + 1);
            throw std::invalid_argument(msg.str());
        }
        for (std::size_t c = 0; c < width; ++c)
            mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_cell(rows[r][c], path, r + 1, c + 1);
    }
    return mat;
}

}  // namespace spillnet
