#include "frame/projection.hpp"

#include <string>

namespace frame {

Eigen::VectorXd ProjectedRegressors::at(Eigen::Index i, Eigen::Index j, Eigen::Index l) const {
    Eigen::VectorXd out(d1() + d2());
    out.head(d1()) = b1_at_s.row(l).transpose() * head[j][i];
    out.tail(d2()) = tail[j].row(i).transpose();
    return out;
}

double ProjectedRegressors::index_value(Eigen::Index i, Eigen::Index j, Eigen::Index l,
                                        const Eigen::VectorXd& eta) const {
    return head[j][i] * b1_at_s.row(l).dot(eta.head(d1())) +
           tail[j].row(i).dot(eta.tail(d2()));
}

Eigen::VectorXd fit_theta_one(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                              const SplineBasis& bt_tilde) {
    if (grid.size() < bt_tilde.dimension()) {
        throw DataError("fit_theta: only " + std::to_string(grid.size()) +
                        " grid points for a basis of dimension " +
                        std::to_string(bt_tilde.dimension()) + "; use a smaller basis");
    }
    const Eigen::MatrixXd B = bt_tilde.design_matrix(grid);
    Eigen::MatrixXd BtB = B.transpose() * B;
    Eigen::LLT<Eigen::MatrixXd> llt(BtB);
    if (llt.info() != Eigen::Success) {
        // Rank-deficient design: deterministic ridge jitter.
        BtB.diagonal().array() += 1e-8 * BtB.trace() / BtB.rows();
        llt.compute(BtB);
        if (llt.info() != Eigen::Success) {
            throw NumericError("fit_theta: normal matrix factorization failed");
        }
    }
    return llt.solve(B.transpose() * values);
}

PredictorCoefficients fit_theta(const Dataset& data, const std::vector<SplineBasis>& bt_tilde) {
    if (static_cast<int>(bt_tilde.size()) != data.p) {
        throw UsageError("fit_theta: expected one basis per functional predictor");
    }
    PredictorCoefficients out;
    out.theta.resize(data.p);
    for (int j = 0; j < data.p; ++j) {
        const Eigen::VectorXd& grid = data.t_grids[j];
        if (grid.size() < bt_tilde[j].dimension()) {
            throw DataError("fit_theta: predictor " + std::to_string(j) + " has only " +
                            std::to_string(grid.size()) + " grid points for basis dimension " +
                            std::to_string(bt_tilde[j].dimension()) + "; use a smaller basis");
        }
        const Eigen::MatrixXd B = bt_tilde[j].design_matrix(grid);
        Eigen::MatrixXd BtB = B.transpose() * B;
        Eigen::LLT<Eigen::MatrixXd> llt(BtB);
        if (llt.info() != Eigen::Success) {
            BtB.diagonal().array() += 1e-8 * BtB.trace() / BtB.rows();
            llt.compute(BtB);
            if (llt.info() != Eigen::Success) {
                throw NumericError("fit_theta: normal matrix factorization failed for predictor " +
                                   std::to_string(j));
            }
        }
        // Solve all units at once: theta[j] row i holds the coefficients of unit i.
        out.theta[j] = llt.solve(B.transpose() * data.functional[j].transpose()).transpose();
    }
    return out;
}

ProjectedRegressors project(const PredictorCoefficients& theta,
                            const std::vector<CrossIntegralMatrix>& M,
                            const Eigen::VectorXd& s_grid) {
    if (theta.theta.size() != M.size()) {
        throw UsageError("project: one cross-integral matrix per predictor required");
    }
    ProjectedRegressors out;
    const Eigen::Index p = static_cast<Eigen::Index>(M.size());
    out.head.resize(p);
    out.tail.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (theta.theta[j].cols() != M[j].dt()) {
            throw DataError("project: theta dimension " + std::to_string(theta.theta[j].cols()) +
                            " != cross-integral dimension " + std::to_string(M[j].dt()) +
                            " for predictor " + std::to_string(j));
        }
        if (j > 0 && (M[j].d1() != M[0].d1() || M[j].d2() != M[0].d2())) {
            throw UsageError("project: all predictors must share the index-surface dimensions");
        }
        out.head[j] = theta.theta[j] * M[j].tilde_integrals;
        out.tail[j] = theta.theta[j] * M[j].cross_tt.transpose();
    }
    out.b1_at_s = M.empty() ? Eigen::MatrixXd(s_grid.size(), 0) : M[0].b1_at_s;
    return out;
}

}  // namespace frame
