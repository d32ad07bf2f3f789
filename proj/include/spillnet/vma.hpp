#pragma once

#include <vector>

#include <Eigen/Core>

#include <json.hpp>

namespace spillnet {

/// Truncated moving-average representation Psi_0..Psi_{H-1}, Psi_0 = I.
struct VmaSequence {
    std::vector<Eigen::MatrixXd> psi;
    int horizon = 0;

    Eigen::Index m_dim() const { return psi.empty() ? 0 : psi.front().rows(); }
};

/// Psi_l = sum_{k=1..p} Phi_k Psi_{l-k}, with Psi_l = 0 for l < 0.
VmaSequence vma_coefficients(const std::vector<Eigen::MatrixXd>& phi, int horizon);

/// Row-major dump for debugging.
nlohmann::json to_json(const VmaSequence& seq);

}  // namespace spillnet
