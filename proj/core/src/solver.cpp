#include "frame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace frame {

double shrink_factor(double block_norm, double lambda_eff) {
    if (block_norm <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - lambda_eff / block_norm);
}

namespace {

void sign_normalize(Eigen::VectorXd& eta) {
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (std::abs(eta[i]) > 1e-12) {
            if (eta[i] < 0.0) eta = -eta;
            return;
        }
    }
}

}  // namespace

// Snapshot of all mutable fitter state, used for warm starts and reverts.
struct FitterState {
    std::vector<Eigen::VectorXd> eta, xi;
    Eigen::VectorXd alpha;
    std::vector<Eigen::VectorXd> fitted;
    Eigen::VectorXd block_norms, residual;
    std::vector<FrameFitter::FunctionalBlock> blocks;

    static FitterState save(const FrameFitter& f) {
        return {f.eta_, f.xi_, f.alpha_, f.fitted_, f.block_norms_, f.residual_, f.blocks_};
    }
    void restore(FrameFitter& f) const {
        f.eta_ = eta;
        f.xi_ = xi;
        f.alpha_ = alpha;
        f.fitted_ = fitted;
        f.block_norms_ = block_norms;
        f.residual_ = residual;
        f.blocks_ = blocks;
    }
};

FrameFitter::FrameFitter(const Dataset& centered, const BasisConfig& bases)
    : bases_(bases) {
    centered.validate();
    if (!centered.centering) {
        throw UsageError("FrameFitter: dataset must be centered first (see frame::center)");
    }
    n_ = centered.n;
    p_ = centered.p;
    q_ = centered.q;
    L_ = static_cast<int>(centered.s_grid.size());
    s_grid_ = centered.s_grid;
    t_grids_ = centered.t_grids;
    centering_ = *centered.centering;

    Y_.resize(static_cast<Eigen::Index>(n_) * L_);
    for (int i = 0; i < n_; ++i) {
        Y_.segment(static_cast<Eigen::Index>(i) * L_, L_) = centered.responses.row(i).transpose();
    }

    // Linear omega: the block column for Z_k repeats z_ik across l, then is
    // column centered (a no-op on centered data, kept for generality).
    omega_cols_.resize(Y_.size(), q_);
    omega_col_means_.resize(q_);
    omega_sq_norms_.resize(q_);
    for (int k = 0; k < q_; ++k) {
        for (int i = 0; i < n_; ++i) {
            omega_cols_.col(k).segment(static_cast<Eigen::Index>(i) * L_, L_)
                .setConstant(centered.scalars(i, k));
        }
        omega_col_means_[k] = omega_cols_.col(k).mean();
        omega_cols_.col(k).array() -= omega_col_means_[k];
        omega_sq_norms_[k] = omega_cols_.col(k).squaredNorm();
    }

    if (p_ > 0) {
        const SplineBasis b1 = SplineBasis::uniform(s_grid_[0], s_grid_[L_ - 1],
                                                    bases_.b1_dim, bases_.degree);
        std::vector<SplineBasis> bt(p_);
        std::vector<CrossIntegralMatrix> M(p_);
        for (int j = 0; j < p_; ++j) {
            const double lo = t_grids_[j][0];
            const double hi = t_grids_[j][t_grids_[j].size() - 1];
            bt[j] = SplineBasis::uniform(lo, hi, bases_.bt_dim, bases_.degree);
            const SplineBasis b2 = SplineBasis::uniform(lo, hi, bases_.b2_dim, bases_.degree);
            M[j] = cross_integral(b1, b2, bt[j], s_grid_);
        }
        theta_ = fit_theta(centered, bt);
        regressors_ = project(theta_, M, s_grid_);
    } else {
        regressors_.b1_at_s.resize(L_, 0);
    }

    xi_.assign(p_, Eigen::VectorXd::Zero(bases_.h_dim));
    alpha_ = Eigen::VectorXd::Zero(q_);
    fitted_.assign(p_ + q_, Eigen::VectorXd::Zero(Y_.size()));
    block_norms_ = Eigen::VectorXd::Zero(p_ + q_);
    residual_ = Y_;
    blocks_.resize(p_);
    if (p_ > 0) set_eta(initial_eta(), /*warm_start=*/false);
}

std::vector<Eigen::VectorXd> FrameFitter::eta_candidates(int j, int max_count) const {
    const Eigen::Index d1 = regressors_.d1();
    const Eigen::Index d2 = regressors_.d2();
    // Right singular vectors via the (d1+d2) Gram matrix of the stacked
    // theta_tilde rows, assembled from the factored representation. The
    // leading direction alone can start the eta search in a poor basin, so
    // every non-degenerate singular vector is screened by how much response
    // variance a quadratic in its index explains, and candidates are ranked
    // by that score. Deterministic; ties resolve toward larger singular
    // values.
    const Eigen::MatrixXd B1tB1 = regressors_.b1_at_s.transpose() * regressors_.b1_at_s;
    const Eigen::VectorXd b1_sums = regressors_.b1_at_s.colwise().sum();
    const double y_var = (Y_.array() - Y_.mean()).square().sum();
    Eigen::MatrixXd gram(d1 + d2, d1 + d2);
    const double head_sq = regressors_.head[j].squaredNorm();
    const Eigen::RowVectorXd head_tail = regressors_.head[j].transpose() * regressors_.tail[j];
    gram.topLeftCorner(d1, d1) = head_sq * B1tB1;
    gram.topRightCorner(d1, d2) = b1_sums * head_tail;
    gram.bottomLeftCorner(d2, d1) = gram.topRightCorner(d1, d2).transpose();
    gram.bottomRightCorner(d2, d2) =
        static_cast<double>(L_) * (regressors_.tail[j].transpose() * regressors_.tail[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd& vals = eig.eigenvalues();
    const double val_tol = 1e-12 * std::max(vals[d1 + d2 - 1], 0.0);
    std::vector<std::pair<double, Eigen::VectorXd>> scored;  // eigenvalue-descending
    for (Eigen::Index k = d1 + d2 - 1; k >= 0; --k) {
        if (vals[k] <= val_tol) break;  // null directions give spurious fits
        const Eigen::VectorXd cand = eig.eigenvectors().col(k);
        const Eigen::MatrixXd u = index_values(j, cand);
        Eigen::MatrixXd X(Y_.size(), 3);
        X.col(0).setOnes();
        for (int i = 0; i < n_; ++i) {
            for (int l = 0; l < L_; ++l) X(i * L_ + l, 1) = u(i, l);
        }
        X.col(2) = X.col(1).array().square();
        const Eigen::VectorXd coef =
            (X.transpose() * X).completeOrthogonalDecomposition().solve(X.transpose() * Y_);
        const double score = y_var > 0.0 ? 1.0 - (Y_ - X * coef).squaredNorm() / y_var : 0.0;
        scored.emplace_back(score, cand);
    }
    std::vector<Eigen::VectorXd> out;
    std::vector<bool> used(scored.size(), false);
    while (static_cast<int>(out.size()) < max_count) {
        int pick = -1;
        double best = -1.0;
        for (size_t k = 0; k < scored.size(); ++k) {
            if (!used[k] && scored[k].first > best + 1e-12) {
                best = scored[k].first;
                pick = static_cast<int>(k);
            }
        }
        if (pick < 0) break;
        used[pick] = true;
        Eigen::VectorXd eta = scored[pick].second;
        sign_normalize(eta);
        out.push_back(std::move(eta));
    }
    return out;
}

std::vector<Eigen::VectorXd> FrameFitter::initial_eta() const {
    std::vector<Eigen::VectorXd> out(p_);
    for (int j = 0; j < p_; ++j) {
        std::vector<Eigen::VectorXd> cands = eta_candidates(j, 1);
        out[j] = cands.empty() ? Eigen::VectorXd::Unit(regressors_.d1() + regressors_.d2(), 0)
                               : cands.front();
    }
    return out;
}

Eigen::MatrixXd FrameFitter::index_values(int j, const Eigen::VectorXd& eta) const {
    const Eigen::Index d1 = regressors_.d1();
    const Eigen::Index d2 = regressors_.d2();
    const Eigen::VectorXd w = regressors_.b1_at_s * eta.head(d1);    // L
    const Eigen::VectorXd c = regressors_.tail[j] * eta.tail(d2);    // n
    Eigen::MatrixXd u = regressors_.head[j] * w.transpose();         // n x L
    u.colwise() += c;
    return u;
}

void FrameFitter::rebuild_block(int j, bool warm_start) {
    FunctionalBlock& blk = blocks_[j];
    blk.u = index_values(j, eta_[j]);
    double lo = blk.u.minCoeff();
    double hi = blk.u.maxCoeff();
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    blk.h = SplineBasis::uniform(lo, hi, bases_.h_dim, bases_.degree);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(Y_.size(), bases_.h_dim);
    const int deg = blk.h.degree();
    double N[SplineBasis::kMaxDegree + 1];
    for (int i = 0; i < n_; ++i) {
        for (int l = 0; l < L_; ++l) {
            const int first = blk.h.eval_local(blk.u(i, l), N);
            const Eigen::Index row = static_cast<Eigen::Index>(i) * L_ + l;
            for (int r = 0; r <= deg; ++r) H(row, first + r) = N[r];
        }
    }
    blk.col_means = H.colwise().mean();
    blk.Hc = H.rowwise() - blk.col_means.transpose();
    // The centered columns of a partition-of-unity basis are rank deficient by
    // one; the pseudoinverse keeps the block update an exact projection. Built
    // from a thin SVD: COD's pseudoInverse() solves a full nL x nL identity.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(blk.Hc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = std::max(blk.Hc.rows(), blk.Hc.cols()) *
                       std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv[0] : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index r = 0; r < sv.size(); ++r) {
        if (sv[r] > tol) inv[r] = 1.0 / sv[r];
    }
    blk.S = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();

    if (warm_start && block_norms_[j] > 0.0) {
        const Eigen::VectorXd xi_new = blk.S * fitted_[j];
        const Eigen::VectorXd f_new = blk.Hc * xi_new;
        residual_ += fitted_[j] - f_new;
        fitted_[j] = f_new;
        xi_[j] = xi_new;
        block_norms_[j] = f_new.norm();
    } else if (block_norms_[j] > 0.0) {
        residual_ += fitted_[j];
        fitted_[j].setZero();
        xi_[j].setZero();
        block_norms_[j] = 0.0;
    } else {
        xi_[j].setZero();
    }
}

void FrameFitter::set_eta(std::vector<Eigen::VectorXd> eta, bool warm_start) {
    if (static_cast<int>(eta.size()) != p_) {
        throw UsageError("set_eta: expected " + std::to_string(p_) + " directions");
    }
    const Eigen::Index d = regressors_.d1() + regressors_.d2();
    for (int j = 0; j < p_; ++j) {
        if (eta[j].size() != d) throw UsageError("set_eta: direction dimension mismatch");
        const double nrm = eta[j].norm();
        if (nrm <= 0.0) throw UsageError("set_eta: zero direction for predictor " + std::to_string(j));
        eta[j] /= nrm;
        sign_normalize(eta[j]);
    }
    eta_ = std::move(eta);
    for (int j = 0; j < p_; ++j) rebuild_block(j, warm_start);
}

void FrameFitter::reset_coefficients() {
    for (int j = 0; j < p_; ++j) xi_[j].setZero();
    alpha_.setZero();
    for (auto& f : fitted_) f.setZero();
    block_norms_.setZero();
    residual_ = Y_;
}

double FrameFitter::lambda_max() const {
    double best = 0.0;
    for (int j = 0; j < p_; ++j) {
        best = std::max(best, (blocks_[j].Hc * (blocks_[j].S * Y_)).norm());
    }
    for (int k = 0; k < q_; ++k) {
        if (omega_sq_norms_[k] > 0.0) {
            best = std::max(best, std::abs(omega_cols_.col(k).dot(Y_)) /
                                      std::sqrt(omega_sq_norms_[k]));
        }
    }
    return best;
}

double FrameFitter::objective(double lambda, const PenaltySpec& penalty) const {
    double pen = 0.0;
    for (int b = 0; b < p_ + q_; ++b) pen += penalty.value(block_norms_[b], lambda);
    const double value = residual_.squaredNorm() / (2.0 * L_) + pen / L_;
    if (!std::isfinite(value)) {
        throw NumericError("objective: non-finite value");
    }
    return value;
}

double FrameFitter::block_sweep(const Eigen::VectorXd& lambda_eff) {
    if (lambda_eff.size() != p_ + q_) throw UsageError("block_sweep: lambda_eff size mismatch");
    double max_change = 0.0;
    for (int j = 0; j < p_; ++j) {
        const double before = record_steps_ ? objective(cur_lambda_, cur_penalty_) : 0.0;
        const Eigen::VectorXd Rj = residual_ + fitted_[j];
        const Eigen::VectorXd g = blocks_[j].S * Rj;
        const Eigen::VectorXd Pf = blocks_[j].Hc * g;
        const double norm = Pf.norm();
        if (!std::isfinite(norm)) {
            throw NumericError("block_sweep: non-finite projection for functional block " +
                               std::to_string(j));
        }
        const double c = shrink_factor(norm, lambda_eff[j]);
        const Eigen::VectorXd xi_new = c * g;
        max_change = std::max(max_change, (xi_new - xi_[j]).cwiseAbs().maxCoeff());
        fitted_[j] = c * Pf;
        residual_ = Rj - fitted_[j];
        xi_[j] = xi_new;
        block_norms_[j] = c * norm;
        if (record_steps_ && report_) {
            report_->step_objectives.emplace_back(before, objective(cur_lambda_, cur_penalty_));
        }
    }
    for (int k = 0; k < q_; ++k) {
        const double before = record_steps_ ? objective(cur_lambda_, cur_penalty_) : 0.0;
        const int b = p_ + k;
        const Eigen::VectorXd Rk = residual_ + fitted_[b];
        double coef = 0.0;
        if (omega_sq_norms_[k] > 0.0) coef = omega_cols_.col(k).dot(Rk) / omega_sq_norms_[k];
        if (!std::isfinite(coef)) {
            throw NumericError("block_sweep: non-finite coefficient for scalar block " +
                               std::to_string(k));
        }
        const double norm = std::abs(coef) * std::sqrt(omega_sq_norms_[k]);
        const double c = shrink_factor(norm, lambda_eff[b]);
        const double a_new = c * coef;
        max_change = std::max(max_change, std::abs(a_new - alpha_[k]));
        fitted_[b] = a_new * omega_cols_.col(k);
        residual_ = Rk - fitted_[b];
        alpha_[k] = a_new;
        block_norms_[b] = c * norm;
        if (record_steps_ && report_) {
            report_->step_objectives.emplace_back(before, objective(cur_lambda_, cur_penalty_));
        }
    }
    return max_change;
}

int FrameFitter::sweeps_to_convergence(const Eigen::VectorXd& lambda_eff, int max_sweeps,
                                       double tol) {
    int sweeps = 0;
    while (sweeps < max_sweeps) {
        const double change = block_sweep(lambda_eff);
        ++sweeps;
        if (change < tol) break;
    }
    return sweeps;
}

Eigen::VectorXd FrameFitter::lla_thresholds(double lambda, const PenaltySpec& penalty) const {
    Eigen::VectorXd out(p_ + q_);
    for (int b = 0; b < p_ + q_; ++b) {
        out[b] = lambda * penalty.derivative(block_norms_[b], lambda);
    }
    return out;
}

bool FrameFitter::update_eta(double lambda, const PenaltySpec& penalty) {
    std::vector<int> active;
    for (int j = 0; j < p_; ++j) {
        if (block_norms_[j] > 0.0) active.push_back(j);
    }
    if (active.empty()) return false;

    const Eigen::Index d1 = regressors_.d1();
    const Eigen::Index d2 = regressors_.d2();
    const Eigen::Index d = d1 + d2;
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd A(Y_.size(), na * d);
    double dN[SplineBasis::kMaxDegree + 1];
    for (Eigen::Index idx = 0; idx < na; ++idx) {
        const int j = active[idx];
        const int deg = blocks_[j].h.degree();
        for (int i = 0; i < n_; ++i) {
            for (int l = 0; l < L_; ++l) {
                const int first = blocks_[j].h.eval_derivative_local(blocks_[j].u(i, l), dN);
                double w = 0.0;
                for (int r = 0; r <= deg; ++r) w += dN[r] * xi_[j][first + r];
                auto row = A.row(static_cast<Eigen::Index>(i) * L_ + l);
                row.segment(idx * d, d1) =
                    (w * regressors_.head[j][i]) * regressors_.b1_at_s.row(l);
                row.segment(idx * d + d1, d2) = w * regressors_.tail[j].row(i);
            }
        }
    }
    // Min-norm least-squares step via the Gram matrix: pinv(A^T A) A^T r equals
    // pinv(A) r, and the COD of the small Gram is far cheaper than one of A.
    const Eigen::MatrixXd AtA = A.transpose() * A;
    const Eigen::VectorXd Atr = A.transpose() * residual_;
    const Eigen::VectorXd delta = AtA.completeOrthogonalDecomposition().solve(Atr);

    const double obj_cur = objective(lambda, penalty);
    double step = 1.0;
    for (int attempt = 0; attempt < 20; ++attempt, step *= 0.5) {
        std::vector<Eigen::VectorXd> cand_eta(active.size());
        bool degenerate = false;
        for (Eigen::Index idx = 0; idx < na; ++idx) {
            Eigen::VectorXd e = eta_[active[idx]] + step * delta.segment(idx * d, d);
            const double nrm = e.norm();
            if (nrm <= 1e-14) {
                degenerate = true;
                break;
            }
            e /= nrm;
            sign_normalize(e);
            cand_eta[idx] = std::move(e);
        }
        if (degenerate) continue;

        // Evaluate the candidate with the current h knots and column means.
        Eigen::VectorXd new_residual = residual_;
        std::vector<Eigen::VectorXd> new_fitted(active.size());
        Eigen::VectorXd new_norms = block_norms_;
        for (Eigen::Index idx = 0; idx < na; ++idx) {
            const int j = active[idx];
            const Eigen::MatrixXd u = index_values(j, cand_eta[idx]);
            const double cm_dot = blocks_[j].col_means.dot(xi_[j]);
            const int deg = blocks_[j].h.degree();
            double N[SplineBasis::kMaxDegree + 1];
            Eigen::VectorXd f(Y_.size());
            for (int i = 0; i < n_; ++i) {
                for (int l = 0; l < L_; ++l) {
                    const int first = blocks_[j].h.eval_local(u(i, l), N);
                    double v = 0.0;
                    for (int r = 0; r <= deg; ++r) v += N[r] * xi_[j][first + r];
                    f[static_cast<Eigen::Index>(i) * L_ + l] = v - cm_dot;
                }
            }
            new_residual += fitted_[j] - f;
            new_norms[j] = f.norm();
            new_fitted[idx] = std::move(f);
        }
        double pen = 0.0;
        for (int b = 0; b < p_ + q_; ++b) pen += penalty.value(new_norms[b], lambda);
        const double obj_cand = new_residual.squaredNorm() / (2.0 * L_) + pen / L_;
        if (obj_cand < obj_cur - 1e-14 * std::max(1.0, std::abs(obj_cur))) {
            for (Eigen::Index idx = 0; idx < na; ++idx) {
                const int j = active[idx];
                eta_[j] = cand_eta[idx];
                fitted_[j] = std::move(new_fitted[idx]);
            }
            residual_ = std::move(new_residual);
            block_norms_ = std::move(new_norms);
            if (record_steps_ && report_) {
                report_->step_objectives.emplace_back(obj_cur, obj_cand);
            }
            return true;
        }
    }
    return false;
}

FitReport FrameFitter::run(double lambda, const PenaltySpec& penalty, const SolverOptions& opt) {
    FitReport report;
    report_ = &report;
    cur_lambda_ = lambda;
    cur_penalty_ = penalty;
    record_steps_ = opt.record_steps;

    FitterState best = FitterState::save(*this);
    double best_obj = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opt.max_outer; ++iter) {
        // LLA: first pass uses the identity thresholds, later passes reweight
        // with rho' at the previous block norms.
        const Eigen::VectorXd lambda_eff =
            (penalty.kind == PenaltySpec::Kind::identity || iter == 0)
                ? Eigen::VectorXd::Constant(p_ + q_, lambda)
                : lla_thresholds(lambda, penalty);
        report.inner_sweeps += sweeps_to_convergence(lambda_eff, opt.max_sweeps, opt.sweep_tol);
        const double obj = objective(lambda, penalty);

        if (obj > best_obj + 1e-10 * std::max(1.0, std::abs(best_obj))) {
            // The h-knot rebuild after the eta step made things worse; revert
            // without recording the rejected iterate.
            best.restore(*this);
            report.diagnostics.push_back("reverted to best iterate after objective increase");
            report.converged = true;
            break;
        }
        report.objective_trace.push_back(obj);
        if (obj < best_obj) {
            best_obj = obj;
            best = FitterState::save(*this);
        }
        if (iter > 0 && std::abs(prev - obj) <= opt.outer_tol * std::max(1.0, std::abs(obj))) {
            report.converged = true;
            break;
        }
        prev = obj;

        if (iter + 1 < opt.max_outer) {
            const bool moved = update_eta(lambda, penalty);
            if (moved) {
                set_eta(eta_, /*warm_start=*/true);
            }
        }
    }
    if (!report.converged) {
        best.restore(*this);
    }
    report.final_objective = objective(lambda, penalty);
    record_steps_ = false;
    report_ = nullptr;
    return report;
}

bool FrameFitter::block_active(int block) const { return block_norms_[block] > 0.0; }

double FrameFitter::projection_norm(int block) const {
    if (block < p_) {
        const Eigen::VectorXd Rb = residual_ + fitted_[block];
        return (blocks_[block].Hc * (blocks_[block].S * Rb)).norm();
    }
    const int k = block - p_;
    if (omega_sq_norms_[k] <= 0.0) return 0.0;
    const Eigen::VectorXd Rb = residual_ + fitted_[block];
    return std::abs(omega_cols_.col(k).dot(Rb)) / std::sqrt(omega_sq_norms_[k]);
}

double FrameFitter::fixed_point_residual(int block, double lambda_eff) const {
    const Eigen::VectorXd Rb = residual_ + fitted_[block];
    Eigen::VectorXd Pf;
    if (block < p_) {
        Pf = blocks_[block].Hc * (blocks_[block].S * Rb);
    } else {
        const int k = block - p_;
        if (omega_sq_norms_[k] <= 0.0) return fitted_[block].norm();
        Pf = omega_cols_.col(k) * (omega_cols_.col(k).dot(Rb) / omega_sq_norms_[k]);
    }
    const double c = shrink_factor(Pf.norm(), lambda_eff);
    return (fitted_[block] - c * Pf).norm();
}

FrameModel FrameFitter::snapshot(double lambda, const PenaltySpec& penalty) const {
    FrameModel m;
    m.bases = bases_;
    m.penalty = penalty;
    m.lambda = lambda;
    m.t_grids = t_grids_;
    m.s_grid = s_grid_;
    m.centering = centering_;
    m.eta = eta_;
    m.xi = xi_;
    m.alpha = alpha_;
    m.omega_col_means = omega_col_means_;
    m.h_ranges.resize(p_);
    m.h_col_means.resize(p_);
    m.active_functional.resize(p_);
    m.active_scalar.resize(q_);
    for (int j = 0; j < p_; ++j) {
        m.h_ranges[j] = {blocks_[j].h.lower(), blocks_[j].h.upper()};
        m.h_col_means[j] = blocks_[j].col_means;
        m.active_functional[j] = block_norms_[j] > 0.0;
    }
    for (int k = 0; k < q_; ++k) m.active_scalar[k] = block_norms_[p_ + k] > 0.0;
    return m;
}

std::pair<FrameModel, FitReport> fit(const Dataset& data, const FitConfig& config) {
    const Dataset centered = data.centering ? data : center(data);
    FrameFitter fitter(centered, config.bases);
    if (!config.eta0.empty()) fitter.set_eta(config.eta0, /*warm_start=*/false);
    FitReport report = fitter.run(config.lambda, config.penalty, config.options);
    return {fitter.snapshot(config.lambda, config.penalty), std::move(report)};
}

namespace {

// Per-predictor pieces needed to map a raw curve to its index values.
struct PredictContext {
    std::vector<SplineBasis> bt;
    std::vector<CrossIntegralMatrix> M;
    std::vector<SplineBasis> h;

    explicit PredictContext(const FrameModel& model) {
        const int p = model.p();
        bt.resize(p);
        M.resize(p);
        h.resize(p);
        const Eigen::Index L = model.s_grid.size();
        const SplineBasis b1 = SplineBasis::uniform(model.s_grid[0], model.s_grid[L - 1],
                                                    model.bases.b1_dim, model.bases.degree);
        for (int j = 0; j < p; ++j) {
            const auto& grid = model.t_grids[j];
            bt[j] = SplineBasis::uniform(grid[0], grid[grid.size() - 1], model.bases.bt_dim,
                                         model.bases.degree);
            const SplineBasis b2 = SplineBasis::uniform(grid[0], grid[grid.size() - 1],
                                                        model.bases.b2_dim, model.bases.degree);
            M[j] = cross_integral(b1, b2, bt[j], model.s_grid);
            h[j] = SplineBasis::uniform(model.h_ranges[j][0], model.h_ranges[j][1],
                                        model.bases.h_dim, model.bases.degree);
        }
    }
};

Eigen::VectorXd predict_centered(const FrameModel& model, const PredictContext& ctx,
                                 const std::vector<Eigen::VectorXd>& centered_curves,
                                 const Eigen::VectorXd& centered_scalars) {
    const Eigen::Index L = model.s_grid.size();
    Eigen::VectorXd yhat = Eigen::VectorXd::Zero(L);
    for (int j = 0; j < model.p(); ++j) {
        if (!model.active_functional[j]) continue;
        const Eigen::VectorXd theta =
            fit_theta_one(model.t_grids[j], centered_curves[j], ctx.bt[j]);
        const Eigen::VectorXd head_part = model.eta[j].head(ctx.M[j].d1());
        const Eigen::VectorXd tail_part = model.eta[j].tail(ctx.M[j].d2());
        const double head = ctx.M[j].tilde_integrals.dot(theta);
        const double tail = (ctx.M[j].cross_tt * theta).dot(tail_part);
        for (Eigen::Index l = 0; l < L; ++l) {
            const double u = head * ctx.M[j].b1_at_s.row(l).dot(head_part) + tail;
            yhat[l] += (ctx.h[j].eval(u) - model.h_col_means[j]).dot(model.xi[j]);
        }
    }
    for (int k = 0; k < model.q(); ++k) {
        if (!model.active_scalar[k]) continue;
        yhat.array() += (centered_scalars[k] - model.omega_col_means[k]) * model.alpha[k];
    }
    return yhat;
}

}  // namespace

SampledCurve predict(const FrameModel& model, const std::vector<SampledCurve>& curves,
                     const Eigen::VectorXd& scalars) {
    if (static_cast<int>(curves.size()) != model.p()) {
        std::string msg = "predict: expected " + std::to_string(model.p()) +
                          " functional predictors (indices";
        for (int j = 0; j < model.p(); ++j) msg += " " + std::to_string(j);
        msg += "), got " + std::to_string(curves.size());
        throw DataError(msg);
    }
    if (scalars.size() != model.q()) {
        throw DataError("predict: expected " + std::to_string(model.q()) +
                        " scalar predictors, got " + std::to_string(scalars.size()));
    }
    std::vector<Eigen::VectorXd> centered_curves(model.p());
    for (int j = 0; j < model.p(); ++j) {
        const auto& grid = model.t_grids[j];
        if (curves[j].grid.size() != grid.size() ||
            (curves[j].grid - grid).cwiseAbs().maxCoeff() > 0.0) {
            throw DataError("predict: predictor " + std::to_string(j) +
                            " is not observed on the training t-grid");
        }
        centered_curves[j] = curves[j].values - model.centering.predictor_means[j];
    }
    const Eigen::VectorXd centered_scalars = scalars - model.centering.scalar_means;

    PredictContext ctx(model);
    SampledCurve out;
    out.grid = model.s_grid;
    out.values = predict_centered(model, ctx, centered_curves, centered_scalars) +
                 model.centering.response_mean;
    return out;
}

Eigen::MatrixXd predict_matrix(const FrameModel& model, const Dataset& raw) {
    if (raw.p != model.p() || raw.q != model.q()) {
        throw DataError("predict_matrix: dataset shape does not match the model");
    }
    if (raw.s_grid.size() != model.s_grid.size() ||
        (raw.s_grid - model.s_grid).cwiseAbs().maxCoeff() > 0.0) {
        throw DataError("predict_matrix: response grid does not match the model");
    }
    PredictContext ctx(model);
    const Eigen::Index L = model.s_grid.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(raw.n, L);
    for (int j = 0; j < model.p(); ++j) {
        if (raw.t_grids[j].size() != model.t_grids[j].size() ||
            (raw.t_grids[j] - model.t_grids[j]).cwiseAbs().maxCoeff() > 0.0) {
            throw DataError("predict_matrix: predictor " + std::to_string(j) +
                            " is not observed on the training t-grid");
        }
        if (!model.active_functional[j]) continue;
        const Eigen::MatrixXd Xc =
            raw.functional[j].rowwise() - model.centering.predictor_means[j].transpose();
        const Eigen::MatrixXd B = ctx.bt[j].design_matrix(model.t_grids[j]);
        Eigen::MatrixXd BtB = B.transpose() * B;
        Eigen::LLT<Eigen::MatrixXd> llt(BtB);
        if (llt.info() != Eigen::Success) {
            BtB.diagonal().array() += 1e-8 * BtB.trace() / BtB.rows();
            llt.compute(BtB);
        }
        const Eigen::MatrixXd theta = llt.solve(B.transpose() * Xc.transpose()).transpose();
        const Eigen::VectorXd head = theta * ctx.M[j].tilde_integrals;                    // n
        const Eigen::VectorXd tail = (theta * ctx.M[j].cross_tt.transpose()) *
                                     model.eta[j].tail(ctx.M[j].d2());                    // n
        const Eigen::VectorXd w = ctx.M[j].b1_at_s * model.eta[j].head(ctx.M[j].d1());    // L
        const double cm_dot = model.h_col_means[j].dot(model.xi[j]);
        const int deg = ctx.h[j].degree();
        double N[SplineBasis::kMaxDegree + 1];
        for (int i = 0; i < raw.n; ++i) {
            for (Eigen::Index l = 0; l < L; ++l) {
                const double u = head[i] * w[l] + tail[i];
                const int first = ctx.h[j].eval_local(u, N);
                double v = 0.0;
                for (int r = 0; r <= deg; ++r) v += N[r] * model.xi[j][first + r];
                out(i, l) += v - cm_dot;
            }
        }
    }
    for (int k = 0; k < model.q(); ++k) {
        if (!model.active_scalar[k]) continue;
        const Eigen::VectorXd zc = raw.scalars.col(k).array() - model.centering.scalar_means[k] -
                                   model.omega_col_means[k];
        out.colwise() += zc * model.alpha[k];
    }
    out.rowwise() += model.centering.response_mean.transpose();
    return out;
}

}  // namespace frame
