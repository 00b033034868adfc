#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "frame/curves.hpp"

using namespace frame;

namespace {

Dataset small_dataset(unsigned seed = 7) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> norm;
    Dataset d;
    d.n = 5;
    d.p = 2;
    d.q = 3;
    d.t_grids = {Eigen::VectorXd::LinSpaced(11, 0.0, 1.0), Eigen::VectorXd::LinSpaced(8, 0.0, 2.0)};
    for (const auto& g : d.t_grids) {
        Eigen::MatrixXd x(d.n, g.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = norm(rng);
        d.functional.push_back(x);
    }
    d.scalars.resize(d.n, d.q);
    for (Eigen::Index i = 0; i < d.scalars.size(); ++i) d.scalars(i) = norm(rng);
    d.s_grid = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
    d.responses.resize(d.n, 6);
    for (Eigen::Index i = 0; i < d.responses.size(); ++i) d.responses(i) = norm(rng);
    return d;
}

}  // namespace

TEST_CASE("validate_curve rejects malformed input") {
    const Eigen::VectorXd good = Eigen::VectorXd::LinSpaced(4, 0.0, 1.0);
    CHECK_NOTHROW(validate_curve(good, Eigen::VectorXd::Zero(4), "x"));
    CHECK_THROWS_AS(validate_curve(good, Eigen::VectorXd::Zero(3), "x"), DataError);

    Eigen::VectorXd bad = good;
    bad[2] = bad[1];  // not strictly increasing
    CHECK_THROWS_AS(validate_curve(bad, Eigen::VectorXd::Zero(4), "x"), DataError);

    Eigen::VectorXd nan_vals = Eigen::VectorXd::Zero(4);
    nan_vals[1] = std::nan("");
    CHECK_THROWS_AS(validate_curve(good, nan_vals, "x"), DataError);
}

TEST_CASE("dataset validation catches shape mismatches") {
    Dataset d = small_dataset();
    CHECK_NOTHROW(d.validate());

    Dataset bad = d;
    bad.functional[0] = bad.functional[0].leftCols(5).eval();
    CHECK_THROWS_AS(bad.validate(), DataError);

    bad = d;
    bad.responses(2, 3) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(bad.validate(), DataError);

    bad = d;
    bad.n = 1;
    CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("centering removes means and is invertible") {
    const Dataset raw = small_dataset();
    const Dataset c = center(raw);
    REQUIRE(c.centering.has_value());
    for (int j = 0; j < c.p; ++j) {
        CHECK(c.functional[j].colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK(c.scalars.colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(c.responses.colwise().mean().cwiseAbs().maxCoeff() < 1e-14);

    const Dataset back = uncenter_dataset(c);
    CHECK_FALSE(back.centering.has_value());
    for (int j = 0; j < raw.p; ++j) {
        CHECK((back.functional[j] - raw.functional[j]).cwiseAbs().maxCoeff() < 1e-13);
    }
    CHECK((back.responses - raw.responses).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("centering composes when applied twice") {
    const Dataset once = center(small_dataset());
    const Dataset twice = center(once);
    const Dataset raw = uncenter_dataset(twice);
    const Dataset orig = small_dataset();
    CHECK((raw.responses - orig.responses).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((raw.scalars - orig.scalars).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("uncenter_prediction adds the stored mean curve") {
    const Dataset c = center(small_dataset());
    SampledCurve yc;
    yc.grid = c.s_grid;
    yc.values = Eigen::VectorXd::Zero(c.s_grid.size());
    const SampledCurve y = uncenter_prediction(yc, *c.centering, c.s_grid);
    CHECK((y.values - c.centering->response_mean).cwiseAbs().maxCoeff() == 0.0);

    SampledCurve wrong;
    wrong.grid = Eigen::VectorXd::LinSpaced(6, 0.0, 2.0);
    wrong.values = yc.values;
    CHECK_THROWS_AS(uncenter_prediction(wrong, *c.centering, c.s_grid), DataError);
}

TEST_CASE("subset_units keeps rows aligned") {
    const Dataset d = small_dataset();
    const Dataset sub = subset_units(d, {4, 1});
    CHECK(sub.n == 2);
    CHECK((sub.functional[1].row(0) - d.functional[1].row(4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sub.scalars.row(1) - d.scalars.row(1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sub.responses.row(0) - d.responses.row(4)).cwiseAbs().maxCoeff() == 0.0);
}
