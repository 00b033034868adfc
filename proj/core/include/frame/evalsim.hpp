#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frame/curves.hpp"
#include "frame/solver.hpp"

namespace frame {

/// Synthetic study configuration. Defaults reproduce the reference design:
/// 6 functional predictors on 150 time points, 8 scalars, responses on 20
/// points, and the first two functional plus the first scalar predictor
/// carrying signal.
struct SimConfig {
    int n = 200;
    int n_test = 1000;
    int p = 6;
    int q = 8;
    int t_points = 150;
    int s_points = 20;
    double predictor_noise_sd = 0.1;
    double response_noise_sd = 0.1;
    double theta_sd = 1.0;
    unsigned long long seed = 1;

    void validate() const;
};

/// The generating mechanism fixed by one seed: coefficient surfaces
/// beta_j(s,t) = beta_j1(s) + beta_j2(t) + 0.1 beta_j1(s) beta_j2(t) with
/// 5-dim cubic spline draws, link functions g_1 = sin, g_2 = cos (zero
/// beyond), and scalar effects gamma = (1, 0, ..., 0).
struct SimTruth {
    std::vector<int> signal_functional;   // zero-based indices
    std::vector<int> signal_scalar;       // zero-based indices
    Eigen::MatrixXd beta1_coef;           // p x 5, beta_j1(s) = b(s)^T row j
    Eigen::MatrixXd beta2_coef;           // p x 5
    Eigen::VectorXd gamma;                // q
};

struct SimOutput {
    Dataset train;
    Dataset test;
    SimTruth truth;
};

/// Draws one replicate. The draw order is fixed (surfaces, then train units,
/// then test units), so a given seed always yields bit-identical output.
SimOutput generate(const SimConfig& config);

/// Draws the generating mechanism once: the coefficient surfaces followed by
/// the held-out test set, both from a single stream seeded by config.seed.
/// Study replicates hold this fixed and redraw only the training data with
/// sample_units under per-replicate seeds.
std::pair<SimTruth, Dataset> draw_mechanism(const SimConfig& config);

/// Fresh units from an existing mechanism; the stream starts at seed.
Dataset sample_units(const SimConfig& config, const SimTruth& truth, int units,
                     unsigned long long seed);

/// Selection error rates against the ground truth.
struct SelectionRates {
    double fp_functional = 0.0;
    double fn_functional = 0.0;
    double fp_scalar = 0.0;
    double fn_scalar = 0.0;
};

/// False positives: fraction of noise variables selected. False negatives:
/// fraction of signal variables missed. Indices are zero-based; a rate whose
/// denominator is empty is reported as zero.
SelectionRates fp_fn(const std::vector<int>& selected_functional,
                     const std::vector<int>& selected_scalar, int p, int q,
                     const SimTruth& truth);

/// Pointwise mean of the training responses, used as a no-predictor baseline.
struct MeanBaseline {
    Eigen::VectorXd s_grid;
    Eigen::VectorXd mean_curve;
};

MeanBaseline mean_baseline(const Dataset& train);

Eigen::MatrixXd predict_matrix(const MeanBaseline& baseline, const Dataset& test);

/// Mean squared error of a prediction matrix over all units and grid points.
double prediction_error(const Eigen::MatrixXd& yhat, const Dataset& test);
double prediction_error(const FrameModel& model, const Dataset& test);
double prediction_error(const MeanBaseline& baseline, const Dataset& test);

/// Mean absolute error at one response grid point s (must lie on the grid).
double mae(const Eigen::MatrixXd& yhat, const Dataset& test, double s);
double mae(const FrameModel& model, const Dataset& test, double s);
double mae(const MeanBaseline& baseline, const Dataset& test, double s);

}  // namespace frame
