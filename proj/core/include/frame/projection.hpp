#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frame/basis.hpp"
#include "frame/curves.hpp"

namespace frame {

/// Basis coefficients theta_ij of the functional predictors: one row per unit,
/// one matrix per predictor. theta[j] is n x dim(btilde_j).
struct PredictorCoefficients {
    std::vector<Eigen::MatrixXd> theta;
};

/// Projected regressors theta_tilde_ijl = M_j(s_l) theta_ij for the additive
/// index-surface basis. Stored in factored form: the first d1 coordinates of
/// theta_tilde_ijl are b1(s_l) * head(i, j) and the last d2 coordinates
/// tail[j].row(i) are constant in l.
struct ProjectedRegressors {
    Eigen::MatrixXd b1_at_s;            // L x d1, shared across predictors
    std::vector<Eigen::VectorXd> head;  // p entries, each n: (integral of btilde)^T theta_ij
    std::vector<Eigen::MatrixXd> tail;  // p entries, each n x d2: theta_ij^T G^T

    Eigen::Index d1() const { return b1_at_s.cols(); }
    Eigen::Index d2() const { return tail.empty() ? 0 : tail[0].cols(); }
    Eigen::Index L() const { return b1_at_s.rows(); }
    Eigen::Index n() const { return head.empty() ? 0 : head[0].size(); }
    Eigen::Index n_predictors() const { return static_cast<Eigen::Index>(head.size()); }

    /// Materializes theta_tilde_ijl (length d1 + d2).
    Eigen::VectorXd at(Eigen::Index i, Eigen::Index j, Eigen::Index l) const;

    /// Index value theta_tilde_ijl^T eta without materializing the vector.
    double index_value(Eigen::Index i, Eigen::Index j, Eigen::Index l,
                       const Eigen::VectorXd& eta) const;
};

/// Least-squares fit of one curve onto a spline basis; ridge jitter fallback
/// when the design matrix is rank deficient.
Eigen::VectorXd fit_theta_one(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                              const SplineBasis& bt_tilde);

/// Fits theta_ij for every unit and predictor. bt_tilde has one basis per
/// functional predictor (built over that predictor's t-domain).
PredictorCoefficients fit_theta(const Dataset& data, const std::vector<SplineBasis>& bt_tilde);

/// Applies the cross-integral matrices to the fitted coefficients.
ProjectedRegressors project(const PredictorCoefficients& theta,
                            const std::vector<CrossIntegralMatrix>& M,
                            const Eigen::VectorXd& s_grid);

}  // namespace frame
