#pragma once

// Test-only helpers: random stationary systems and the shock-draw simulation
// oracle for variance contributions. Everything here is independent of the
// library's VMA/FEVD code paths: impulse responses come from iterating the
// VAR recursion directly, and variances from averaging simulated draws.

#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testsupport {

struct System {
    std::vector<Eigen::MatrixXd> phi;
    Eigen::MatrixXd sigma;
};

inline Eigen::MatrixXd random_spd(Eigen::Index m, std::mt19937_64& engine) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = noise(engine);
    return a * a.transpose() + 0.5 * static_cast<double>(m) * Eigen::MatrixXd::Identity(m, m);
}

// Random VAR(p) scaled to the requested spectral radius.
inline System random_stationary_system(Eigen::Index m, int p, double target_radius,
                                       std::mt19937_64& engine) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    System sys;
    for (int l = 0; l < p; ++l) {
        Eigen::MatrixXd phi(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) phi(i, j) = unit(engine);
        sys.phi.push_back(phi);
    }
    const Eigen::Index dim = m * p;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(dim, dim);
    for (int l = 0; l < p; ++l) companion.block(0, l * m, m, m) = sys.phi[static_cast<std::size_t>(l)];
    if (p > 1)
        companion.block(m, 0, dim - m, dim - m) = Eigen::MatrixXd::Identity(dim - m, dim - m);
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(companion).eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 0.0) {
        // scaling lag l by s^l scales every companion eigenvalue by s
        const double s = target_radius / radius;
        double factor = 1.0;
        for (auto& phi : sys.phi) {
            factor *= s;
            phi *= factor;
        }
    }
    sys.sigma = random_spd(m, engine);
    return sys;
}

// Response of y_{l} to a one-time unit shock in variable j at l = 0, obtained
// by iterating the noiseless recursion. impulse[l].col(j) is that response.
inline std::vector<Eigen::MatrixXd> impulse_paths(const System& sys, const Eigen::MatrixXd& p_map,
                                                  int horizon) {
    const Eigen::Index m = p_map.rows();
    const int p = static_cast<int>(sys.phi.size());
    std::vector<Eigen::MatrixXd> impulse(static_cast<std::size_t>(horizon), Eigen::MatrixXd::Zero(m, m));
    for (Eigen::Index j = 0; j < m; ++j) {
        std::vector<Eigen::VectorXd> path;
        path.push_back(p_map.col(j));
        for (int l = 1; l < horizon; ++l) {
            Eigen::VectorXd next = Eigen::VectorXd::Zero(m);
            for (int k = 1; k <= p && k <= l; ++k)
                next += sys.phi[static_cast<std::size_t>(k - 1)] * path[static_cast<std::size_t>(l - k)];
            path.push_back(next);
        }
        for (int l = 0; l < horizon; ++l) impulse[static_cast<std::size_t>(l)].col(j) = path[static_cast<std::size_t>(l)];
    }
    return impulse;
}

// Monte Carlo estimate of the per-shock variance split of the H-step forecast
// error: draw shock sequences, accumulate each shock's contribution through
// the impulse paths, and return the sample variances.
inline Eigen::MatrixXd simulated_variance_split(const System& sys, const Eigen::MatrixXd& p_map,
                                                int horizon, long draws, std::uint64_t seed) {
    const Eigen::Index m = p_map.rows();
    const auto impulse = impulse_paths(sys, p_map, horizon);
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd component(m, m);
    std::vector<double> shocks(static_cast<std::size_t>(horizon));
    for (long r = 0; r < draws; ++r) {
        component.setZero();
        for (Eigen::Index j = 0; j < m; ++j) {
            for (int h = 0; h < horizon; ++h) shocks[static_cast<std::size_t>(h)] = gauss(engine);
            for (int h = 0; h < horizon; ++h)
                component.col(j) += impulse[static_cast<std::size_t>(h)].col(j) * shocks[static_cast<std::size_t>(h)];
        }
        sum_sq += component.cwiseProduct(component);
    }
    return sum_sq / static_cast<double>(draws);
}

}  // namespace testsupport
