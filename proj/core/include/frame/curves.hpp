#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "frame/errors.hpp"

namespace frame {

/// One function observed on a finite grid of strictly increasing points.
struct SampledCurve {
    Eigen::VectorXd grid;
    Eigen::VectorXd values;

    SampledCurve() = default;
    SampledCurve(Eigen::VectorXd g, Eigen::VectorXd v);

    Eigen::Index size() const { return grid.size(); }
};

/// Throws DataError unless the grid is strictly increasing, lengths match and
/// all entries are finite. `what` names the curve in error messages.
void validate_curve(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                    const std::string& what);

/// Stored means removed by centering, needed to undo it at prediction time.
struct Centering {
    std::vector<Eigen::VectorXd> predictor_means;  // p curves on the shared t-grids
    Eigen::VectorXd scalar_means;                  // q
    Eigen::VectorXd response_mean;                 // L
};

/// n units x (p functional + q scalar) predictors plus response curves.
/// All curves for functional predictor j share t_grids[j]; all responses share
/// s_grid. Immutable by convention after construction/centering.
struct Dataset {
    int n = 0;
    int p = 0;
    int q = 0;
    std::vector<Eigen::VectorXd> t_grids;    // p entries
    std::vector<Eigen::MatrixXd> functional; // p entries, each n x len(t_grids[j])
    Eigen::MatrixXd scalars;                 // n x q
    Eigen::VectorXd s_grid;                  // L
    Eigen::MatrixXd responses;               // n x L
    std::optional<Centering> centering;

    Eigen::Index response_points() const { return s_grid.size(); }

    /// Checks all structural invariants, throws DataError on violation.
    void validate() const;
};

/// Subtracts pointwise means from every predictor and the response and stores
/// them. Centering an already centered dataset composes the stored means, so
/// the operation is idempotent up to rounding.
Dataset center(const Dataset& raw);

/// Adds the stored response mean curve back onto a centered prediction.
SampledCurve uncenter_prediction(const SampledCurve& yhat_centered,
                                 const Centering& centering,
                                 const Eigen::VectorXd& s_grid);

/// Restricts a dataset to a subset of units (used by cross-validation folds).
Dataset subset_units(const Dataset& data, const std::vector<int>& units);

/// Adds the stored means back and drops the centering record.
Dataset uncenter_dataset(const Dataset& data);

}  // namespace frame
