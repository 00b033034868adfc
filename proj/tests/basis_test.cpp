#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "frame/basis.hpp"

using namespace frame;

namespace {

// Textbook Cox-de Boor recursion, written independently of the library's
// span-based evaluator so the two can cross-check each other.
double bspline_recursive(const std::vector<double>& knots, int i, int deg, double x) {
    if (deg == 0) {
        // Half-open spans, closed at the right end of the last span.
        const bool last = knots[i + 1] == knots.back() && knots[i] < knots[i + 1];
        if (last) return (x >= knots[i] && x <= knots[i + 1]) ? 1.0 : 0.0;
        return (x >= knots[i] && x < knots[i + 1]) ? 1.0 : 0.0;
    }
    double left = 0.0, right = 0.0;
    if (knots[i + deg] > knots[i]) {
        left = (x - knots[i]) / (knots[i + deg] - knots[i]) *
               bspline_recursive(knots, i, deg - 1, x);
    }
    if (knots[i + deg + 1] > knots[i + 1]) {
        right = (knots[i + deg + 1] - x) / (knots[i + deg + 1] - knots[i + 1]) *
                bspline_recursive(knots, i + 1, deg - 1, x);
    }
    return left + right;
}

double simpson(const std::function<double(double)>& f, double a, double b, int nodes) {
    const double h = (b - a) / (nodes - 1);
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double w = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * f(a + k * h);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("spline basis is a partition of unity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int degree = 1 + static_cast<int>(rng() % 3);
        const int dim = degree + 1 + static_cast<int>(rng() % 5);
        const double a = -1.0 + 2.0 * unif(rng);
        const double b = a + 0.5 + 2.0 * unif(rng);
        const SplineBasis basis = SplineBasis::uniform(a, b, dim, degree);
        for (int m = 0; m <= 50; ++m) {
            const double x = a + (b - a) * m / 50.0;
            const Eigen::VectorXd v = basis.eval(x);
            CHECK(v.minCoeff() >= 0.0);
            CHECK(std::abs(v.sum() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("eval matches the recursive Cox-de Boor oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 8; ++rep) {
        const int degree = 1 + static_cast<int>(rng() % 3);
        const int dim = degree + 1 + static_cast<int>(rng() % 4);
        const SplineBasis basis = SplineBasis::uniform(0.0, 1.0, dim, degree);
        const std::vector<double>& knots = basis.knots();
        for (int m = 0; m < 40; ++m) {
            const double x = unif(rng);
            const Eigen::VectorXd v = basis.eval(x);
            for (int i = 0; i < dim; ++i) {
                CHECK(std::abs(v[i] - bspline_recursive(knots, i, degree, x)) < 1e-12);
            }
        }
        // Boundaries too.
        for (double x : {0.0, 1.0}) {
            const Eigen::VectorXd v = basis.eval(x);
            for (int i = 0; i < dim; ++i) {
                CHECK(std::abs(v[i] - bspline_recursive(knots, i, degree, x)) < 1e-12);
            }
        }
    }
}

TEST_CASE("derivatives match central differences") {
    const SplineBasis basis = SplineBasis::uniform(0.0, 2.0, 7, 3);
    const double h = 1e-6;
    for (int m = 1; m < 40; ++m) {
        const double x = 2.0 * m / 40.0;
        const Eigen::VectorXd d = basis.eval_derivative(x);
        const Eigen::VectorXd fd = (basis.eval(x + h) - basis.eval(x - h)) / (2.0 * h);
        CHECK((d - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("closed-form integrals match quadrature") {
    for (int dim : {4, 5, 8}) {
        const SplineBasis basis = SplineBasis::uniform(-0.5, 1.5, dim, 3);
        const Eigen::VectorXd ints = basis.integrals();
        CHECK(std::abs(ints.sum() - 2.0) < 1e-12);  // partition of unity integrates to b - a
        for (int i = 0; i < dim; ++i) {
            const double q = simpson([&](double x) { return basis.eval(x)[i]; }, -0.5, 1.5, 2001);
            CHECK(std::abs(ints[i] - q) < 1e-9);
        }
    }
}

TEST_CASE("evaluation clamps to the domain and rejects non-finite input") {
    const SplineBasis basis = SplineBasis::uniform(0.0, 1.0, 5, 3);
    CHECK((basis.eval(-3.0) - basis.eval(0.0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((basis.eval(9.0) - basis.eval(1.0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(basis.eval(std::nan("")), NumericError);
    CHECK_THROWS_AS(SplineBasis::uniform(0.0, 1.0, 3, 3), UsageError);
    CHECK_THROWS_AS(SplineBasis::uniform(1.0, 0.0, 5, 3), UsageError);
}

TEST_CASE("design matrix rows equal pointwise evaluation") {
    const SplineBasis basis = SplineBasis::uniform(0.0, 1.0, 6, 3);
    const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(9, 0.0, 1.0);
    const Eigen::MatrixXd D = basis.design_matrix(xs);
    for (Eigen::Index r = 0; r < xs.size(); ++r) {
        CHECK((D.row(r).transpose() - basis.eval(xs[r])).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("cross integrals match a 2001-node Simpson oracle") {
    std::mt19937_64 rng(37);
    auto rand_dim = [&](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };
    for (int rep = 0; rep < 20; ++rep) {
        const int d1 = rand_dim(4, 7), d2 = rand_dim(4, 7), dt = rand_dim(4, 7);
        const double t_hi = 0.5 + 0.1 * rand_dim(0, 10);
        const SplineBasis b_s = SplineBasis::uniform(0.0, 1.0, d1, 3);
        const SplineBasis b_t = SplineBasis::uniform(0.0, t_hi, d2, 3);
        const SplineBasis bt_tilde = SplineBasis::uniform(0.0, t_hi, dt, 3);
        const Eigen::VectorXd s_grid = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
        const CrossIntegralMatrix M = cross_integral(b_s, b_t, bt_tilde, s_grid);

        for (int r = 0; r < dt; ++r) {
            const double q =
                simpson([&](double t) { return bt_tilde.eval(t)[r]; }, 0.0, t_hi, 2001);
            CHECK(std::abs(M.tilde_integrals[r] - q) <= 1e-6 * std::max(1.0, std::abs(q)));
        }
        for (int r = 0; r < d2; ++r) {
            for (int c = 0; c < dt; ++c) {
                const double q = simpson(
                    [&](double t) { return b_t.eval(t)[r] * bt_tilde.eval(t)[c]; }, 0.0, t_hi,
                    2001);
                CHECK(std::abs(M.cross_tt(r, c)) <= std::abs(q) + 1e-6);
                CHECK(std::abs(M.cross_tt(r, c) - q) <= 1e-6 * std::max(1.0, std::abs(q)));
            }
        }
        // Materialized M(s_l) stacks b1(s_l) v^T over G.
        const Eigen::MatrixXd Ms = M.at(2);
        CHECK(Ms.rows() == d1 + d2);
        CHECK((Ms.bottomRows(d2) - M.cross_tt).cwiseAbs().maxCoeff() == 0.0);
        CHECK((Ms.topRows(d1) - M.b1_at_s.row(2).transpose() * M.tilde_integrals.transpose())
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
}

TEST_CASE("cross_integral rejects mismatched t-domains") {
    const SplineBasis b_s = SplineBasis::uniform(0.0, 1.0, 5, 3);
    const SplineBasis b_t = SplineBasis::uniform(0.0, 1.0, 5, 3);
    const SplineBasis other = SplineBasis::uniform(0.0, 2.0, 5, 3);
    const Eigen::VectorXd s_grid = Eigen::VectorXd::LinSpaced(4, 0.0, 1.0);
    CHECK_THROWS_AS(cross_integral(b_s, b_t, other, s_grid), DataError);
}
