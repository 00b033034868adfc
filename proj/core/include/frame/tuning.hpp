#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "frame/curves.hpp"
#include "frame/penalty.hpp"
#include "frame/solver.hpp"

namespace frame {

/// Cross-validation plan over lambda and the four basis dimensions.
struct CvPlan {
    enum class PredictorDimMode {
        joint_cv,  // bt/b2 dims enter the CV product grid
        holdout,   // bt/b2 dim picked by held-out predictor reconstruction
    };

    int K = 10;
    std::vector<int> bt_dims = {4, 5, 6};
    std::vector<int> b1_dims = {4, 5, 6};
    std::vector<int> b2_dims = {4, 5, 6};
    std::vector<int> h_dims = {4, 5, 6};
    int n_lambda = 20;
    double lambda_min_ratio = 1e-3;
    unsigned long long seed = 1;
    PenaltySpec penalty = PenaltySpec::identity();
    SolverOptions options;
    PredictorDimMode predictor_dim_mode = PredictorDimMode::holdout;
    int jobs = 1;
};

struct CvEntry {
    BasisConfig bases;
    double lambda = 0.0;
    double mean_error = 0.0;
    double std_error = 0.0;
    int valid_folds = 0;
};

struct CvTable {
    std::vector<CvEntry> rows;
    std::vector<std::string> warnings;
};

struct CvResult {
    CvTable table;
    BasisConfig best_bases;
    double best_lambda = 0.0;
    double best_error = 0.0;
    // Eta refined on the full data at the selected lambda; warm-starts the
    // final fit so block activation reflects the tuned directions.
    std::vector<Eigen::VectorXd> eta;
};

/// Deterministic balanced partition of {0..n-1} into K folds.
std::vector<std::vector<int>> kfold_split(int n, int K, unsigned long long seed);

/// Smallest lambda at which every block is zero, at the initial eta with all
/// other blocks zero. Centers the data if needed.
double lambda_max(const Dataset& data, const BasisConfig& bases);

/// Descending log-spaced grid from lmax down to min_ratio * lmax. A zero lmax
/// yields an all-zero grid of the requested length.
Eigen::VectorXd lambda_grid(double lmax, int count, double min_ratio);

/// Picks the predictor-expansion dimension by holding out every 5th observed
/// time point of each X_ij, refitting and scoring the held-out squared error.
int holdout_predictor_dim(const Dataset& data, const std::vector<int>& dims, int degree = 3);

/// K-fold cross-validation over basis dimensions and the lambda path. Every
/// fold runs the full alternating fit along a warm-started descending lambda
/// path; lambda is picked by the one-standard-error rule and dimensions by the
/// smallest selected fold error.
CvResult cross_validate(const Dataset& data, const CvPlan& plan);

}  // namespace frame
