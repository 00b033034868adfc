#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "frame/basis.hpp"
#include "frame/curves.hpp"
#include "frame/penalty.hpp"
#include "frame/projection.hpp"

namespace frame {

/// Spline dimensions of the four bases. Degree is cubic throughout.
struct BasisConfig {
    int bt_dim = 5;  // btilde(t), predictor expansion
    int b1_dim = 5;  // b1(s), s-part of the index surface
    int b2_dim = 5;  // b2(t), t-part of the index surface
    int h_dim = 5;   // h(x), ridge functions g_j
    int degree = 3;
};

struct SolverOptions {
    int max_outer = 100;
    double outer_tol = 1e-6;
    int max_sweeps = 500;
    double sweep_tol = 1e-7;
    bool record_steps = false;  // keep per-update objective pairs (diagnostics)
};

/// Fitted FRAME parameters plus everything needed to predict new units.
struct FrameModel {
    BasisConfig bases;
    PenaltySpec penalty;
    double lambda = 0.0;

    std::vector<Eigen::VectorXd> t_grids;  // p training grids
    Eigen::VectorXd s_grid;                // L response grid
    Centering centering;

    std::vector<Eigen::VectorXd> eta;              // p, each d1 + d2, unit norm when active
    std::vector<Eigen::VectorXd> xi;               // p, each h_dim; exact zero when inactive
    Eigen::VectorXd alpha;                         // q (linear omega)
    std::vector<std::array<double, 2>> h_ranges;   // p, knot range of h per predictor
    std::vector<Eigen::VectorXd> h_col_means;      // p, column means of H_j at fit time
    Eigen::VectorXd omega_col_means;               // q

    std::vector<bool> active_functional;  // p
    std::vector<bool> active_scalar;      // q

    int p() const { return static_cast<int>(eta.size()); }
    int q() const { return static_cast<int>(alpha.size()); }
};

struct FitReport {
    std::vector<double> objective_trace;  // one entry per outer iteration
    int inner_sweeps = 0;
    bool converged = false;
    double final_objective = 0.0;
    // (before, after) objective per block update / accepted eta step, when recorded.
    std::vector<std::pair<double, double>> step_objectives;
    std::vector<std::string> diagnostics;
};

/// Multiplicative group shrinkage (1 - lambda_eff / block_norm)_+; 0 when the
/// block norm vanishes.
double shrink_factor(double block_norm, double lambda_eff);

/// Block coordinate descent engine for one (dataset, basis config) pair.
/// Precomputes theta and the projected regressors once; eta, xi and alpha are
/// mutable state so regularization paths can reuse warm starts.
class FrameFitter {
public:
    FrameFitter(const Dataset& centered, const BasisConfig& bases);

    int n() const { return n_; }
    int p() const { return p_; }
    int q() const { return q_; }
    int L() const { return L_; }

    const ProjectedRegressors& regressors() const { return regressors_; }
    const std::vector<Eigen::VectorXd>& eta() const { return eta_; }
    const std::vector<Eigen::VectorXd>& xi() const { return xi_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }

    /// Up to max_count candidate directions for predictor j: the right
    /// singular vectors of the stacked theta_tilde rows, ranked by how much
    /// response variance a quadratic in their index explains, sign normalized.
    std::vector<Eigen::VectorXd> eta_candidates(int j, int max_count) const;

    /// Deterministic eta initialization: the top candidate per predictor.
    std::vector<Eigen::VectorXd> initial_eta() const;

    /// Replaces eta and rebuilds the functional blocks (h knots, H_j, S_j).
    /// Fitted block values are carried over in least-squares sense when
    /// warm_start is set, otherwise xi is reset to zero.
    void set_eta(std::vector<Eigen::VectorXd> eta, bool warm_start = false);

    void reset_coefficients();

    /// Smallest lambda at which every block shrinks to zero at the current eta.
    double lambda_max() const;

    /// Eq. (10) objective at the current state: SSE / (2L) plus the block
    /// penalties weighted by 1/L so that Algorithm 1 with threshold lambda is
    /// its exact blockwise minimizer.
    double objective(double lambda, const PenaltySpec& penalty) const;

    /// One full pass over all blocks with the given per-block thresholds
    /// (p functional then q scalar entries). Returns the max absolute
    /// coefficient change.
    double block_sweep(const Eigen::VectorXd& lambda_eff);

    /// Sweeps with fixed thresholds until max change < tol. Returns sweep count.
    int sweeps_to_convergence(const Eigen::VectorXd& lambda_eff, int max_sweeps,
                              double tol);

    /// Per-block LLA thresholds lambda * rho'(current block norm).
    Eigen::VectorXd lla_thresholds(double lambda, const PenaltySpec& penalty) const;

    /// Taylor-linearized joint eta update with backtracking on the full
    /// objective; inactive blocks are left unchanged. Returns true if any eta
    /// moved. Does not rebuild h knots; callers rebuild via set_eta.
    bool update_eta(double lambda, const PenaltySpec& penalty);

    /// Full alternating fit (Algorithm 2) at one lambda from the current state.
    FitReport run(double lambda, const PenaltySpec& penalty,
                  const SolverOptions& opt = {});

    /// Packages the current state as a standalone model.
    FrameModel snapshot(double lambda, const PenaltySpec& penalty) const;

    // Diagnostics used by optimality tests.
    double projection_norm(int block) const;       // ||H_b S_b R_b|| (R_b excludes block b)
    double fixed_point_residual(int block, double lambda_eff) const;
    double block_norm(int block) const { return block_norms_[block]; }
    bool block_active(int block) const;

private:
    struct FunctionalBlock {
        SplineBasis h;
        Eigen::VectorXd col_means;  // h_dim
        Eigen::MatrixXd Hc;         // nL x h_dim, column centered
        Eigen::MatrixXd S;          // h_dim x nL, pseudoinverse of Hc
        Eigen::MatrixXd u;          // n x L index values
    };

    int n_ = 0, p_ = 0, q_ = 0, L_ = 0;
    BasisConfig bases_;
    Eigen::VectorXd s_grid_;
    std::vector<Eigen::VectorXd> t_grids_;
    Centering centering_;
    Eigen::VectorXd Y_;                    // nL stacked, row = i * L + l
    Eigen::MatrixXd omega_cols_;           // nL x q, column centered
    Eigen::VectorXd omega_col_means_;      // q
    Eigen::VectorXd omega_sq_norms_;       // q
    PredictorCoefficients theta_;
    ProjectedRegressors regressors_;
    std::vector<FunctionalBlock> blocks_;  // p

    std::vector<Eigen::VectorXd> eta_;     // p
    std::vector<Eigen::VectorXd> xi_;      // p
    Eigen::VectorXd alpha_;                // q
    std::vector<Eigen::VectorXd> fitted_;  // p + q block fitted vectors (nL)
    Eigen::VectorXd block_norms_;          // p + q, ||fitted_b||
    Eigen::VectorXd residual_;             // Y - sum of fits

    // Fit-time bookkeeping shared with run().
    FitReport* report_ = nullptr;
    double cur_lambda_ = 0.0;
    PenaltySpec cur_penalty_ = PenaltySpec::identity();
    bool record_steps_ = false;

    Eigen::MatrixXd index_values(int j, const Eigen::VectorXd& eta) const;
    void rebuild_block(int j, bool warm_start);
    void refresh_residual();
    friend struct FitterState;
};

struct FitConfig {
    BasisConfig bases;
    PenaltySpec penalty = PenaltySpec::identity();
    double lambda = 0.0;
    SolverOptions options;
    // Warm-start directions (e.g. carried over from cross-validation); the
    // default empty value falls back to the built-in initialization.
    std::vector<Eigen::VectorXd> eta0;
};

/// Centers the data if needed, runs the full FRAME fit and packages the model.
std::pair<FrameModel, FitReport> fit(const Dataset& data, const FitConfig& config);

/// Forward model for one new unit. Curves must be observed on the training
/// t-grids; inputs are centered with the stored means, the index is clamped to
/// the training h range and the response mean curve is added back.
SampledCurve predict(const FrameModel& model, const std::vector<SampledCurve>& curves,
                     const Eigen::VectorXd& scalars);

/// Raw-scale prediction matrix for a whole dataset (rows = units).
Eigen::MatrixXd predict_matrix(const FrameModel& model, const Dataset& raw);

}  // namespace frame
