#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace spillnet {

/// A rectangular multivariate time-series panel. Rows are time, columns are
/// series. Values are fully numeric; loading rejects missing cells.
struct Panel {
    Eigen::MatrixXd values;            // T x m
    std::vector<std::string> labels;   // m unique series names
    std::vector<std::string> row_ids;  // optional opaque row labels (dates); may be empty

    Eigen::Index t_len() const { return values.rows(); }
    Eigen::Index m_dim() const { return values.cols(); }
};

/// Panel rescaled so every column has unit sample variance. The mean is kept;
/// the VAR intercept absorbs it. `scales` holds the sample standard
/// deviations (denominator T-1) of the raw columns.
struct StandardizedPanel {
    Panel panel;
    Eigen::VectorXd scales;
};

/// Parse a CSV panel. `date_column` treats the first column as an opaque row
/// label. Throws std::invalid_argument with a located message on missing,
/// non-numeric, or ragged cells, and on duplicate labels.
Panel load_panel(const std::string& path, bool has_header = true, bool date_column = false);

/// Write a panel as CSV with shortest round-trip number formatting, so that
/// load_panel(write_panel(p)) reproduces every value bit for bit.
void write_panel(const Panel& panel, const std::string& path);

StandardizedPanel standardize(const Panel& panel);

/// Replace each column by its OLS residual on [1, factor].
Panel residualize_on_factor(const Panel& panel, const Eigen::VectorXd& factor);

/// Parse a headerless numeric CSV matrix (used for user-supplied shock maps).
Eigen::MatrixXd load_matrix_csv(const std::string& path);

}  // namespace spillnet
