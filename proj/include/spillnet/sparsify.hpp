#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include <json.hpp>

#include "spillnet/fevd.hpp"

namespace spillnet {

/// Scale of the information-criterion fit term. `sample_scaled` multiplies
/// the log term by 2T for both decomposition kinds; `literal` drops the T
/// factor (audit switch, matching one printed variant of the generalized
/// criterion).
enum class IcScale { sample_scaled, literal };

/// IC(k) = 2T log(m - sum of the k largest off-diagonal contributions) + k*lambda,
/// for k = 1..m^2-m. A non-positive log argument yields +infinity for that k
/// and all larger k.
struct IcTrace {
    std::vector<double> ic_values;  // ic_values[k-1] = IC(k)
    double lambda = 0.0;
    DecompKind kind = DecompKind::fevd;

    int k_count() const { return static_cast<int>(ic_values.size()); }
};

/// Result of the edge-count selection: the retained off-diagonal positions
/// (row-major among ties, descending contribution otherwise), the binary
/// mask with unit diagonal, and the masked contribution matrix.
struct SparseSelection {
    int k_hat = 0;
    Eigen::MatrixXi mask;                            // m x m, diagonal all ones
    ContributionMatrix masked_contrib;               // inactive off-diagonals zeroed
    std::vector<std::pair<int, int>> active_set;     // 0-based (i, j) pairs, i != j
    IcTrace trace;
};

IcTrace ic_curve(const ContributionMatrix& contrib, Eigen::Index t_len, double lambda,
                 IcScale scale = IcScale::sample_scaled);

/// Smallest k attaining the minimum of the trace.
int select_k(const IcTrace& trace);

/// Keep the k_hat largest off-diagonal contributions, zero the rest. Ties are
/// broken by smaller row index, then smaller column index.
SparseSelection apply_mask(const ContributionMatrix& contrib, int k_hat);

/// ic_curve -> select_k -> apply_mask.
SparseSelection sparsify(const ContributionMatrix& contrib, Eigen::Index t_len, double lambda,
                         IcScale scale = IcScale::sample_scaled);

/// {k_hat, lambda, active_set, masked, ic}; indices 0-based.
nlohmann::json to_json(const SparseSelection& selection);

}  // namespace spillnet
