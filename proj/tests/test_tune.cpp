#include <doctest.h>

#include <random>

#include "spillnet/mc.hpp"
#include "spillnet/shock.hpp"
#include "spillnet/tune.hpp"
#include "support.hpp"

using namespace spillnet;

namespace {

StandardizedPanel simulated_panel(int m, int p, int t_len, std::uint64_t seed, double radius = 0.6) {
    std::mt19937_64 engine(seed);
    const auto sys = testsupport::random_stationary_system(m, p, radius, engine);
    TrueModel model;
    model.phi = sys.phi;
    model.sigma = sys.sigma;
    model.spectral_radius = radius;
    return standardize(simulate_panel(model, t_len, seed + 1));
}

TuningConfig basic_config(int p, int horizon, DecompKind kind) {
    TuningConfig cfg;
    cfg.candidates = {1.0};
    cfg.train_frac = 0.9;
    cfg.horizon = horizon;
    cfg.p_lag = p;
    cfg.kind = kind;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("sparse_forecast with an all-ones mask at H=1 drops only the own shock") {
    std::mt19937_64 engine(81);
    const auto sys = testsupport::random_stationary_system(3, 1, 0.5, engine);
    VarFit fit;
    fit.intercept = Eigen::Vector3d(0.1, -0.2, 0.3);
    fit.phi = sys.phi;
    fit.p_lag = 1;
    fit.mu = Eigen::Vector3d(0.4, 0.6, -0.1);
    const VmaSequence vma = vma_coefficients(fit.phi, 1);
    const ShockMap map = cholesky_factor(sys.sigma);

    Eigen::MatrixXd history(1, 3);
    history << 0.5, -1.2, 0.7;
    const Eigen::VectorXd forecast =
        sparse_forecast(fit, vma, map, Eigen::MatrixXi::Ones(3, 3), history);
    for (int i = 0; i < 3; ++i) {
        double expect = fit.mu(i);
        for (int j = 0; j < 3; ++j)
            if (j != i) expect += map.p_matrix(i, j) * history(0, j);
        CHECK(forecast(i) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("sparse_forecast with an identity mask at H=1 is the unconditional mean") {
    VarFit fit;
    fit.intercept = Eigen::Vector2d(0.0, 0.0);
    fit.phi = {Eigen::MatrixXd::Zero(2, 2)};
    fit.p_lag = 1;
    fit.mu = Eigen::Vector2d(1.5, -2.5);
    const VmaSequence vma = vma_coefficients(fit.phi, 1);
    const ShockMap map{Eigen::MatrixXd::Identity(2, 2), MapKind::cholesky};
    Eigen::MatrixXd history(1, 2);
    history << 3.0, 4.0;
    const Eigen::VectorXd forecast =
        sparse_forecast(fit, vma, map, Eigen::MatrixXi::Identity(2, 2), history);
    CHECK((forecast - fit.mu).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sparse_forecast matches a triple-loop recomputation") {
    std::mt19937_64 engine(82);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int m = 4, horizon = 6;
    const auto sys = testsupport::random_stationary_system(m, 2, 0.6, engine);
    VarFit fit;
    fit.intercept = Eigen::VectorXd::Zero(m);
    fit.phi = sys.phi;
    fit.p_lag = 2;
    fit.mu.resize(m);
    for (int i = 0; i < m; ++i) fit.mu(i) = noise(engine);
    const VmaSequence vma = vma_coefficients(fit.phi, horizon);
    const ShockMap map = cholesky_factor(sys.sigma);

    Eigen::MatrixXi mask = Eigen::MatrixXi::Identity(m, m);
    mask(0, 2) = mask(2, 1) = mask(3, 0) = mask(1, 3) = 1;
    Eigen::MatrixXd history(horizon, m);
    for (int h = 0; h < horizon; ++h)
        for (int j = 0; j < m; ++j) history(h, j) = noise(engine);

    SUBCASE("orthogonalized weights") {
        const Eigen::VectorXd forecast = sparse_forecast(fit, vma, map, mask, history);
        for (int i = 0; i < m; ++i) {
            double expect = fit.mu(i);
            for (int j = 0; j < m; ++j) {
                if (mask(i, j) == 0) continue;
                for (int h = 0; h < horizon; ++h) {
                    if (h == 0 && j == i) continue;
                    expect += (vma.psi[h] * map.p_matrix)(i, j) * history(h, j);
                }
            }
            CHECK(forecast(i) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("generalized weights") {
        const Eigen::VectorXd forecast = sparse_forecast(fit, vma, sys.sigma, mask, history);
        for (int i = 0; i < m; ++i) {
            double expect = fit.mu(i);
            for (int j = 0; j < m; ++j) {
                if (mask(i, j) == 0) continue;
                for (int h = 0; h < horizon; ++h) {
                    if (h == 0 && j == i) continue;
                    expect += (vma.psi[h] * sys.sigma)(i, j) / sys.sigma(j, j) * history(h, j);
                }
            }
            CHECK(forecast(i) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("sparse_forecast validates the mask diagonal") {
    VarFit fit;
    fit.intercept = Eigen::Vector2d::Zero();
    fit.phi = {Eigen::MatrixXd::Zero(2, 2)};
    fit.p_lag = 1;
    fit.mu = Eigen::Vector2d::Zero();
    const VmaSequence vma = vma_coefficients(fit.phi, 1);
    const ShockMap map{Eigen::MatrixXd::Identity(2, 2), MapKind::cholesky};
    CHECK_THROWS_AS(sparse_forecast(fit, vma, map, Eigen::MatrixXi::Zero(2, 2), Eigen::MatrixXd::Zero(1, 2)),
                    std::invalid_argument);
}

TEST_CASE("poos_msfe matches the analytic error decomposition under a full mask") {
    // With H = 1 and every link retained, the forecast error is exactly
    // (conditional mean - mu) + P_ii xi_i for each window, whatever the data.
    const StandardizedPanel panel = simulated_panel(3, 1, 120, 5);
    TuningConfig cfg = basic_config(1, 1, DecompKind::fevd);
    cfg.train_frac = 0.8;
    const double msfe = poos_msfe(panel, cfg, 1e-12);

    const auto& y = panel.panel.values;
    const Eigen::Index t_len = y.rows();
    const Eigen::Index s_len = static_cast<Eigen::Index>(std::floor(0.8 * double(t_len)));
    double total = 0.0;
    for (Eigen::Index w = 0; w + s_len < t_len; ++w) {
        const VarFit fit = fit_var(y.middleRows(w, s_len), 1);
        const ShockMap map = cholesky_factor(fit.sigma_hat);
        const Eigen::VectorXd cond_mean =
            one_step_mean(fit, y.middleRows(w + s_len - 1, 1));
        const Eigen::VectorXd eps = y.row(w + s_len).transpose() - cond_mean;
        const Eigen::VectorXd xi = recover_shocks(map, eps);
        for (Eigen::Index i = 0; i < 3; ++i) {
            const double err = cond_mean(i) - fit.mu(i) + map.p_matrix(i, i) * xi(i);
            total += err * err;
        }
    }
    const double oracle = total / (double(t_len - s_len) * 3.0);
    CHECK(msfe == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("poos_msfe with one validation point is that window's mean squared error") {
    const StandardizedPanel panel = simulated_panel(2, 1, 51, 6);
    TuningConfig cfg = basic_config(1, 2, DecompKind::gfevd);
    cfg.train_frac = 50.0 / 51.0;  // S = 50, exactly one window
    const double msfe = poos_msfe(panel, cfg, 2.0);

    cfg.candidates = {2.0};
    cfg.candidates_are_constants = false;
    const TuningReport report = select_lambda(panel, cfg);
    REQUIRE(report.forecast_errors.rows() == 1);
    CHECK(msfe == doctest::Approx(report.forecast_errors.row(0).squaredNorm() / 2.0).epsilon(1e-14));
}

TEST_CASE("a long horizon recovers the conditional mean up to the own shock") {
    // truncation property: with a full mask the lagged shock sum rebuilds the
    // conditional mean from the unconditional one
    const StandardizedPanel panel = simulated_panel(2, 1, 320, 7, 0.5);
    const auto& y = panel.panel.values;
    const Eigen::Index s_len = 300;
    const int horizon = 50;

    const VarFit fit = fit_var(y.topRows(s_len), 1);
    const VmaSequence vma = vma_coefficients(fit.phi, horizon);
    const ShockMap map = cholesky_factor(fit.sigma_hat);

    const Eigen::VectorXd cond_mean = one_step_mean(fit, y.middleRows(s_len - 1, 1));
    const Eigen::VectorXd eps = y.row(s_len).transpose() - cond_mean;
    Eigen::MatrixXd history(horizon, 2);
    history.row(0) = recover_shocks(map, eps).transpose();
    for (int h = 1; h < horizon; ++h) {
        const Eigen::VectorXd resid = fit.residuals.row(s_len - 1 - h).transpose();
        history.row(h) = recover_shocks(map, resid).transpose();
    }

    const Eigen::VectorXd forecast =
        sparse_forecast(fit, vma, map, Eigen::MatrixXi::Ones(2, 2), history);
    // the lagged shock sum rebuilds (conditional mean - mu), and the retained
    // cross shocks rebuild the rest of the innovation, so only the own
    // contemporaneous shock is missing from the realized value
    for (int i = 0; i < 2; ++i) {
        const double expect = y(s_len, i) - map.p_matrix(i, i) * history(0, i);
        CHECK(forecast(i) == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("select_lambda") {
    const StandardizedPanel panel = simulated_panel(3, 1, 140, 8);

    SUBCASE("a single candidate wins by default") {
        TuningConfig cfg = basic_config(1, 2, DecompKind::gfevd);
        cfg.candidates = {3.0};
        const TuningReport report = select_lambda(panel, cfg);
        CHECK(report.winner == 0);
        CHECK(report.constants == std::vector<double>{3.0});
        CHECK(report.lambda_star ==
              doctest::Approx(3.0 * std::log(140.0) / 3.0).epsilon(1e-12));
    }
    SUBCASE("duplicate candidates keep the first occurrence") {
        TuningConfig cfg = basic_config(1, 2, DecompKind::gfevd);
        cfg.candidates = {2.0, 2.0, 2.0};
        const TuningReport report = select_lambda(panel, cfg);
        CHECK(report.winner == 0);
        CHECK(report.msfe[0] == report.msfe[1]);
    }
    SUBCASE("per-candidate values agree with poos_msfe and candidate order is immaterial") {
        TuningConfig cfg = basic_config(1, 3, DecompKind::fevd);
        cfg.candidates = {0.8, 2.4, 5.0};
        cfg.candidates_are_constants = false;
        const TuningReport report = select_lambda(panel, cfg);
        for (std::size_t q = 0; q < 3; ++q)
            CHECK(report.msfe[q] == doctest::Approx(poos_msfe(panel, cfg, cfg.candidates[q])).epsilon(1e-14));

        TuningConfig reversed = cfg;
        std::reverse(reversed.candidates.begin(), reversed.candidates.end());
        const TuningReport back = select_lambda(panel, reversed);
        for (std::size_t q = 0; q < 3; ++q) CHECK(report.msfe[q] == back.msfe[2 - q]);
    }
    SUBCASE("results are identical for any thread count") {
        TuningConfig cfg = basic_config(1, 2, DecompKind::gfevd);
        cfg.candidates = {0.5, 1.0, 2.0};
        const TuningReport serial = select_lambda(panel, cfg);
        cfg.threads = 3;
        const TuningReport parallel = select_lambda(panel, cfg);
        CHECK(serial.lambda_star == parallel.lambda_star);
        CHECK(serial.msfe == parallel.msfe);
        CHECK((serial.forecast_errors - parallel.forecast_errors).cwiseAbs().maxCoeff() == 0.0);
        CHECK(to_json(serial).dump() == to_json(parallel).dump());
    }
}

TEST_CASE("tuning rejects invalid configurations and failing windows") {
    const StandardizedPanel panel = simulated_panel(2, 1, 60, 9);
    SUBCASE("bad training fraction") {
        TuningConfig cfg = basic_config(1, 2, DecompKind::fevd);
        cfg.train_frac = 1.2;
        CHECK_THROWS_AS(poos_msfe(panel, cfg, 1.0), std::invalid_argument);
    }
    SUBCASE("window too short for the horizon") {
        TuningConfig cfg = basic_config(1, 40, DecompKind::fevd);
        cfg.train_frac = 0.5;
        CHECK_THROWS_WITH_AS(poos_msfe(panel, cfg, 1.0), doctest::Contains("lagged shocks"),
                             std::invalid_argument);
    }
    SUBCASE("a degenerate window reports its index") {
        StandardizedPanel flat = panel;
        flat.panel.values.col(1).setConstant(3.0);  // every window is rank-deficient
        TuningConfig cfg = basic_config(1, 2, DecompKind::fevd);
        CHECK_THROWS_WITH_AS(poos_msfe(flat, cfg, 1.0), doctest::Contains("window 1"),
                             std::runtime_error);
    }
}
