#include <cmath>
#include <random>

#include "doctest.h"
#include "frame/evalsim.hpp"

using namespace frame;

TEST_CASE("generate produces the documented shapes") {
    SimConfig cfg;
    cfg.n = 20;
    cfg.n_test = 7;
    cfg.seed = 1;
    const SimOutput sim = generate(cfg);
    CHECK(sim.train.n == 20);
    CHECK(sim.train.p == 6);
    CHECK(sim.train.q == 8);
    REQUIRE(sim.train.t_grids.size() == 6);
    CHECK(sim.train.t_grids[0].size() == 150);
    CHECK(sim.train.functional[0].rows() == 20);
    CHECK(sim.train.functional[0].cols() == 150);
    CHECK(sim.train.responses.cols() == 20);
    CHECK(sim.test.n == 7);
    CHECK(sim.truth.signal_functional == std::vector<int>{0, 1});
    CHECK(sim.truth.signal_scalar == std::vector<int>{0});
    CHECK_NOTHROW(sim.train.validate());
    CHECK_NOTHROW(sim.test.validate());
}

TEST_CASE("generate is bit-identical for a fixed seed") {
    SimConfig cfg;
    cfg.n = 10;
    cfg.n_test = 5;
    cfg.seed = 77;
    const SimOutput a = generate(cfg);
    const SimOutput b = generate(cfg);
    CHECK((a.train.responses - b.train.responses).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.train.functional[3] - b.train.functional[3]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.test.scalars - b.test.scalars).cwiseAbs().maxCoeff() == 0.0);

    cfg.seed = 78;
    const SimOutput c = generate(cfg);
    CHECK((a.train.responses - c.train.responses).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("degenerate generator collapses to the scalar signal") {
    SimConfig cfg;
    cfg.n = 15;
    cfg.n_test = 0;
    cfg.predictor_noise_sd = 0.0;
    cfg.response_noise_sd = 0.0;
    cfg.theta_sd = 0.0;
    cfg.seed = 5;
    const SimOutput sim = generate(cfg);
    CHECK(sim.train.functional[0].cwiseAbs().maxCoeff() == 0.0);
    // With X identically zero both integrals vanish: g1(0) + g2(0) = 0 + 1.
    for (int i = 0; i < sim.train.n; ++i) {
        const double expected = 1.0 + sim.train.scalars(i, 0);
        for (Eigen::Index l = 0; l < sim.train.s_grid.size(); ++l) {
            CHECK(sim.train.responses(i, l) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("fp_fn computes the documented rates") {
    const SimTruth truth = generate(SimConfig{.n = 2, .n_test = 0, .seed = 1}).truth;
    const int p = 6, q = 8;

    auto r = fp_fn({0, 1}, {0}, p, q, truth);
    CHECK(r.fp_functional == 0.0);
    CHECK(r.fn_functional == 0.0);
    CHECK(r.fp_scalar == 0.0);
    CHECK(r.fn_scalar == 0.0);

    r = fp_fn({0}, {}, p, q, truth);
    CHECK(r.fn_functional == doctest::Approx(0.5));
    CHECK(r.fp_functional == 0.0);
    CHECK(r.fn_scalar == 1.0);

    r = fp_fn({0, 1, 2}, {0, 3}, p, q, truth);
    CHECK(r.fp_functional == doctest::Approx(0.25));
    CHECK(r.fn_functional == 0.0);
    CHECK(r.fp_scalar == doctest::Approx(1.0 / 7.0));

    CHECK_THROWS_AS(fp_fn({6}, {}, p, q, truth), UsageError);
}

TEST_CASE("prediction_error and mae match loop oracles") {
    SimConfig cfg;
    cfg.n = 8;
    cfg.n_test = 0;
    cfg.s_points = 5;
    cfg.seed = 21;
    const SimOutput sim = generate(cfg);
    const Dataset& d = sim.train;

    std::mt19937_64 rng(4);
    std::normal_distribution<double> norm;
    Eigen::MatrixXd yhat(d.n, d.s_grid.size());
    for (Eigen::Index i = 0; i < yhat.size(); ++i) yhat(i) = norm(rng);

    double pe_oracle = 0.0;
    for (int i = 0; i < d.n; ++i) {
        for (Eigen::Index l = 0; l < d.s_grid.size(); ++l) {
            const double diff = d.responses(i, l) - yhat(i, l);
            pe_oracle += diff * diff;
        }
    }
    pe_oracle /= static_cast<double>(d.n) * d.s_grid.size();
    CHECK(std::abs(prediction_error(yhat, d) - pe_oracle) < 1e-12);

    const double s = d.s_grid[2];
    double mae_oracle = 0.0;
    for (int i = 0; i < d.n; ++i) mae_oracle += std::abs(d.responses(i, 2) - yhat(i, 2));
    mae_oracle /= d.n;
    CHECK(std::abs(mae(yhat, d, s) - mae_oracle) < 1e-12);

    CHECK(prediction_error(d.responses, d) == 0.0);
    CHECK(prediction_error((d.responses.array() + 1.0).matrix(), d) == doctest::Approx(1.0));
    CHECK(mae((d.responses.array() - 0.5).matrix(), d, s) == doctest::Approx(0.5));
    CHECK_THROWS_AS(mae(yhat, d, 0.123456), DataError);
    CHECK_THROWS_AS(prediction_error(yhat.leftCols(3).eval(), d), DataError);
}

TEST_CASE("mean baseline predicts the training mean curve") {
    SimConfig cfg;
    cfg.n = 6;
    cfg.n_test = 0;
    cfg.s_points = 4;
    cfg.seed = 31;
    SimOutput sim = generate(cfg);
    Dataset& d = sim.train;

    // Two units with responses y and -y average to zero.
    d.responses.row(1) = -d.responses.row(0);
    Dataset pair = subset_units(d, {0, 1});
    const MeanBaseline zero = mean_baseline(pair);
    CHECK(zero.mean_curve.cwiseAbs().maxCoeff() < 1e-14);

    // Identical responses are reproduced exactly.
    for (int i = 1; i < d.n; ++i) d.responses.row(i) = d.responses.row(0);
    const MeanBaseline b = mean_baseline(d);
    CHECK((predict_matrix(b, d).row(3) - d.responses.row(0)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(prediction_error(b, d) < 1e-24);
}
