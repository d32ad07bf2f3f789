#include "spillnet/vma.hpp"

#include <stdexcept>

namespace spillnet {

VmaSequence vma_coefficients(const std::vector<Eigen::MatrixXd>& phi, int horizon) {
    if (horizon < 1) throw std::invalid_argument("vma_coefficients: horizon must be at least 1");
    if (phi.empty()) throw std::invalid_argument("vma_coefficients: no coefficient matrices");
    const Eigen::Index m = phi.front().rows();
    const int p = static_cast<int>(phi.size());

    VmaSequence seq;
    seq.horizon = horizon;
    seq.psi.reserve(static_cast<std::size_t>(horizon));
    seq.psi.push_back(Eigen::MatrixXd::Identity(m, m));
    for (int l = 1; l < horizon; ++l) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(m, m);
        for (int k = 1; k <= p && k <= l; ++k)
            next += phi[static_cast<std::size_t>(k - 1)] * seq.psi[static_cast<std::size_t>(l - k)];
        seq.psi.push_back(std::move(next));
    }
    return seq;
}

}  // namespace spillnet

nlohmann::json to_json(const VmaSequence& seq) {
    nlohmann::json j;
    j["horizon"] = seq.horizon;
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& psi : seq.psi) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < psi.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < psi.cols(); ++k) row.push_back(psi(i, k));
            rows.push_back(std::move(row));
        }
        mats.push_back(std::move(rows));
    }
    j["psi"] = std::move(mats);
    return j;
}
