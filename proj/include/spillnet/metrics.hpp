#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include <json.hpp>

#include "spillnet/fevd.hpp"

namespace spillnet {

/// Directional spillover summary of a (masked) share table. FIX/TIX/NIX are
/// in percent; degrees count retained off-diagonal mask entries.
struct SpilloverSummary {
    double total_index = 0.0;  // percent
    Eigen::VectorXd fix;       // row sums excluding diagonal (received)
    Eigen::VectorXd tix;       // column sums excluding diagonal (transmitted)
    Eigen::VectorXd nix;       // tix - fix
    Eigen::VectorXi in_degree;
    Eigen::VectorXi out_degree;
};

enum class TableFormat { csv, json, dot };

/// Indices are computed from the masked table (pruned cells contribute
/// zero); pass an all-ones mask for the dense reading.
SpilloverSummary spillover_summary(const FevdTable& table, const Eigen::MatrixXi& mask);

Eigen::MatrixXi full_mask(Eigen::Index m);

/// Render the masked table. CSV uses the percent layout with FIX/TIX margins
/// and IN/OUT degree rows, one decimal. JSON carries raw doubles. DOT emits a
/// directed graph: entry (i, j) becomes an edge j -> i weighted by the share,
/// nodes carry "mass" (TIX+FIX) and "net_sign" attributes.
void export_table(const FevdTable& table, const Eigen::MatrixXi& mask,
                  const std::vector<std::string>& labels, TableFormat format,
                  const std::string& path);

nlohmann::json to_json(const SpilloverSummary& summary, const std::vector<std::string>& labels);

}  // namespace spillnet
