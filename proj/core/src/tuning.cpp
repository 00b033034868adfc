#include "frame/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <tuple>
#include <limits>
#include <random>

#include "frame/util.hpp"

namespace frame {

std::vector<std::vector<int>> kfold_split(int n, int K, unsigned long long seed) {
    if (K < 2) throw UsageError("kfold_split: need K >= 2");
    if (n < K) {
        throw UsageError("kfold_split: n = " + std::to_string(n) + " < K = " + std::to_string(K));
    }
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    // Explicit Fisher-Yates so the partition is identical across platforms.
    std::mt19937_64 rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng() % static_cast<unsigned long long>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::vector<int>> folds(K);
    for (int i = 0; i < n; ++i) folds[i % K].push_back(perm[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

double lambda_max(const Dataset& data, const BasisConfig& bases) {
    const Dataset centered = data.centering ? data : center(data);
    FrameFitter fitter(centered, bases);
    return fitter.lambda_max();
}

Eigen::VectorXd lambda_grid(double lmax, int count, double min_ratio) {
    if (count < 1) throw UsageError("lambda_grid: count must be >= 1");
    if (min_ratio <= 0.0 || min_ratio >= 1.0) {
        throw UsageError("lambda_grid: min_ratio must lie in (0, 1)");
    }
    Eigen::VectorXd grid(count);
    if (lmax <= 0.0) {
        grid.setZero();
        return grid;
    }
    if (count == 1) {
        grid[0] = lmax;
        return grid;
    }
    const double log_hi = std::log(lmax);
    const double log_lo = std::log(lmax * min_ratio);
    for (int i = 0; i < count; ++i) {
        grid[i] = std::exp(log_hi + (log_lo - log_hi) * i / (count - 1));
    }
    return grid;
}

int holdout_predictor_dim(const Dataset& data, const std::vector<int>& dims, int degree) {
    if (data.p == 0) throw UsageError("holdout_predictor_dim: no functional predictors");
    if (dims.empty()) throw UsageError("holdout_predictor_dim: empty dimension grid");
    double best_err = std::numeric_limits<double>::infinity();
    int best_dim = dims.front();
    for (const int dim : dims) {
        double err = 0.0;
        for (int j = 0; j < data.p; ++j) {
            const Eigen::VectorXd& grid = data.t_grids[j];
            std::vector<int> train_idx, test_idx;
            for (int m = 0; m < grid.size(); ++m) {
                (m % 5 == 4 ? test_idx : train_idx).push_back(m);
            }
            if (static_cast<int>(train_idx.size()) < dim || test_idx.empty()) continue;
            const SplineBasis basis =
                SplineBasis::uniform(grid[0], grid[grid.size() - 1], dim, degree);
            Eigen::MatrixXd Btr(train_idx.size(), dim), Bte(test_idx.size(), dim);
            Eigen::MatrixXd Xtr(train_idx.size(), data.n), Xte(test_idx.size(), data.n);
            for (size_t r = 0; r < train_idx.size(); ++r) {
                Btr.row(r) = basis.eval(grid[train_idx[r]]).transpose();
                Xtr.row(r) = data.functional[j].col(train_idx[r]).transpose();
            }
            for (size_t r = 0; r < test_idx.size(); ++r) {
                Bte.row(r) = basis.eval(grid[test_idx[r]]).transpose();
                Xte.row(r) = data.functional[j].col(test_idx[r]).transpose();
            }
            Eigen::MatrixXd BtB = Btr.transpose() * Btr;
            Eigen::LLT<Eigen::MatrixXd> llt(BtB);
            if (llt.info() != Eigen::Success) {
                BtB.diagonal().array() += 1e-8 * BtB.trace() / BtB.rows();
                llt.compute(BtB);
            }
            const Eigen::MatrixXd theta = llt.solve(Btr.transpose() * Xtr);
            err += (Bte * theta - Xte).squaredNorm();
        }
        if (err < best_err) {
            best_err = err;
            best_dim = dim;
        }
    }
    return best_dim;
}

namespace {

// Path fit at fixed eta: warm-started sweeps, with LLA reweighting for
// non-identity penalties.
void path_sweeps(FrameFitter& fitter, double lambda, const PenaltySpec& penalty,
                 const SolverOptions& opt) {
    const int nb = fitter.p() + fitter.q();
    Eigen::VectorXd le = Eigen::VectorXd::Constant(nb, lambda);
    fitter.sweeps_to_convergence(le, opt.max_sweeps, opt.sweep_tol);
    if (penalty.kind == PenaltySpec::Kind::identity) return;
    for (int iter = 0; iter < 10; ++iter) {
        const Eigen::VectorXd next = fitter.lla_thresholds(lambda, penalty);
        if ((next - le).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, lambda)) break;
        le = next;
        fitter.sweeps_to_convergence(le, opt.max_sweeps, opt.sweep_tol);
    }
}

// Initial eta estimates: a short marginal single-index fit per predictor
// (all other blocks frozen at zero), restarted from the top screened
// candidate directions to escape bad basins. Every predictor gets the
// direction that best explains the response on its own, so the fold paths
// price them on equal footing.
std::vector<Eigen::VectorXd> marginal_initial_eta(FrameFitter& fitter,
                                                  const SolverOptions& opt) {
    constexpr int kStarts = 3;
    std::vector<Eigen::VectorXd> out = fitter.initial_eta();
    const int nb = fitter.p() + fitter.q();
    std::vector<Eigen::VectorXd> eta = out;
    for (int j = 0; j < fitter.p(); ++j) {
        Eigen::VectorXd le =
            Eigen::VectorXd::Constant(nb, std::numeric_limits<double>::infinity());
        le[j] = 0.0;
        double best_obj = std::numeric_limits<double>::infinity();
        for (const Eigen::VectorXd& cand : fitter.eta_candidates(j, kStarts)) {
            eta[j] = cand;
            fitter.set_eta(eta, /*warm_start=*/false);
            fitter.reset_coefficients();
            for (int it = 0; it < 5; ++it) {
                fitter.sweeps_to_convergence(le, opt.max_sweeps, opt.sweep_tol);
                if (!fitter.update_eta(0.0, PenaltySpec::identity())) break;
                fitter.set_eta(fitter.eta(), /*warm_start=*/true);
            }
            fitter.sweeps_to_convergence(le, opt.max_sweeps, opt.sweep_tol);
            const double obj = fitter.objective(0.0, PenaltySpec::identity());
            if (obj < best_obj) {
                best_obj = obj;
                out[j] = fitter.eta()[j];
            }
        }
        eta[j] = out[j];
    }
    fitter.reset_coefficients();
    return out;
}

double heldout_mse(const FrameModel& model, const Dataset& test_raw) {
    const Eigen::MatrixXd yhat = predict_matrix(model, test_raw);
    return (yhat - test_raw.responses).squaredNorm() /
           static_cast<double>(test_raw.responses.size());
}

struct ComboOutcome {
    std::vector<CvEntry> rows;
    double best_lambda = 0.0;
    double best_error = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> eta;
    bool valid = false;
    std::string warning;
};

ComboOutcome run_combo(const Dataset& raw, const std::vector<std::vector<int>>& folds,
                       const BasisConfig& bases, const CvPlan& plan,
                       const std::vector<Eigen::VectorXd>& init_eta) {
    ComboOutcome out;
    const int K = static_cast<int>(folds.size());
    try {
        const Dataset full_centered = center(raw);
        FrameFitter full_fitter(full_centered, bases);
        const double lmax = full_fitter.lambda_max();
        const Eigen::VectorXd grid = lambda_grid(lmax, plan.n_lambda, plan.lambda_min_ratio);

        std::vector<FrameFitter> fold_fitters;
        std::vector<Dataset> fold_tests;
        fold_fitters.reserve(K);
        fold_tests.reserve(K);
        for (int f = 0; f < K; ++f) {
            std::vector<int> train_units;
            for (int g = 0; g < K; ++g) {
                if (g == f) continue;
                train_units.insert(train_units.end(), folds[g].begin(), folds[g].end());
            }
            std::sort(train_units.begin(), train_units.end());
            fold_fitters.emplace_back(center(subset_units(raw, train_units)), bases);
            fold_tests.push_back(subset_units(raw, folds[f]));
        }

        std::vector<Eigen::VectorXd> eta = init_eta;
        Eigen::MatrixXd errors(K, grid.size());
        int best_gi = 0;
        // Parsimony rule: the sparsest (largest) lambda whose mean fold error
        // is within one standard error of the minimum, or within 10% of it,
        // whichever allowance is larger. Near the minimum the error curve is
        // extremely flat, so the plain argmin (and even the bare 1-SE rule
        // when fold errors are tightly correlated) drifts toward small lambda
        // and overselects. The grid is descending, so the sparsest qualifying
        // lambda is the smallest qualifying index.
        auto select_index = [&]() {
            const Eigen::VectorXd means = errors.colwise().mean();
            int min_gi = 0;
            means.minCoeff(&min_gi);
            const double var = (errors.col(min_gi).array() - means[min_gi]).square().sum() /
                               std::max(1, K - 1);
            const double threshold =
                means[min_gi] + std::max(std::sqrt(var / K), 0.1 * means[min_gi]);
            for (Eigen::Index gi = 0; gi < grid.size(); ++gi) {
                if (means[gi] <= threshold) return static_cast<int>(gi);
            }
            return min_gi;
        };
        // Eta refit on the full data at the selected lambda. If every
        // functional block is zero there, eta cannot move and the alternation
        // would deadlock, so walk down the (warm-started) path until at least
        // one block activates and refine eta along the way.
        auto refit_eta_at = [&](int gi) {
            full_fitter.set_eta(eta, /*warm_start=*/false);
            full_fitter.reset_coefficients();
            for (Eigen::Index g = gi; g < grid.size(); ++g) {
                full_fitter.run(grid[g], plan.penalty, plan.options);
                bool any_active = false;
                for (int j = 0; j < full_fitter.p(); ++j) {
                    any_active = any_active || full_fitter.block_active(j);
                }
                if (any_active) break;
            }
            eta = full_fitter.eta();
        };
        int prev_gi = -1;
        for (int alt = 0; alt < 10; ++alt) {
            for (int f = 0; f < K; ++f) {
                FrameFitter& fitter = fold_fitters[f];
                if (fitter.p() > 0) fitter.set_eta(eta, /*warm_start=*/false);
                fitter.reset_coefficients();
                for (Eigen::Index gi = 0; gi < grid.size(); ++gi) {
                    path_sweeps(fitter, grid[gi], plan.penalty, plan.options);
                    const FrameModel model = fitter.snapshot(grid[gi], plan.penalty);
                    errors(f, gi) = heldout_mse(model, fold_tests[f]);
                }
            }
            best_gi = select_index();
            if (log_level() >= LogLevel::debug) {
                const Eigen::VectorXd means = errors.colwise().mean();
                int min_gi = 0;
                means.minCoeff(&min_gi);
                log_debug("cv dims " + std::to_string(bases.bt_dim) + " " +
                          std::to_string(bases.b1_dim) + " " + std::to_string(bases.b2_dim) +
                          " " + std::to_string(bases.h_dim) + " alt " + std::to_string(alt) +
                          ": sel gi " + std::to_string(best_gi) + " lam " +
                          std::to_string(grid[best_gi]) + " err " +
                          std::to_string(means[best_gi]) + " | argmin gi " +
                          std::to_string(min_gi) + " lam " + std::to_string(grid[min_gi]) +
                          " err " + std::to_string(means[min_gi]));
            }
            if (best_gi == prev_gi) break;
            prev_gi = best_gi;
            if (full_fitter.p() == 0) break;
            refit_eta_at(best_gi);
        }

        // Final full-data eta refit at the selected lambda.
        if (full_fitter.p() > 0) refit_eta_at(best_gi);
        out.eta = eta;

        out.rows.reserve(grid.size());
        for (Eigen::Index gi = 0; gi < grid.size(); ++gi) {
            CvEntry entry;
            entry.bases = bases;
            entry.lambda = grid[gi];
            entry.mean_error = errors.col(gi).mean();
            const double var =
                (errors.col(gi).array() - entry.mean_error).square().sum() / std::max(1, K - 1);
            entry.std_error = std::sqrt(var / K);
            entry.valid_folds = K;
            out.rows.push_back(entry);
        }
        out.best_lambda = grid[best_gi];
        out.best_error = out.rows[best_gi].mean_error;
        out.valid = true;
    } catch (const std::exception& e) {
        out.valid = false;
        out.warning = std::string("combo excluded after fit failure: ") + e.what();
    }
    return out;
}

}  // namespace

CvResult cross_validate(const Dataset& data, const CvPlan& plan) {
    const Dataset raw = data.centering ? uncenter_dataset(data) : data;
    raw.validate();
    const auto folds = kfold_split(raw.n, plan.K, plan.seed);

    std::vector<BasisConfig> combos;
    if (raw.p == 0) {
        combos.push_back(BasisConfig{});
    } else if (plan.predictor_dim_mode == CvPlan::PredictorDimMode::holdout) {
        const int dim_t = holdout_predictor_dim(raw, plan.bt_dims);
        for (int b1 : plan.b1_dims) {
            for (int h : plan.h_dims) {
                combos.push_back(BasisConfig{dim_t, b1, dim_t, h});
            }
        }
    } else {
        for (int bt : plan.bt_dims) {
            for (int b1 : plan.b1_dims) {
                for (int b2 : plan.b2_dims) {
                    for (int h : plan.h_dims) {
                        combos.push_back(BasisConfig{bt, b1, b2, h});
                    }
                }
            }
        }
    }

    // Initial eta estimates depend on the (bt, b1, b2) dims but not on the
    // ridge dimension, so compute them once per distinct triple (with the
    // first h dim) and share across combos.
    std::vector<std::vector<Eigen::VectorXd>> combo_init(combos.size());
    if (raw.p > 0) {
        const Dataset centered = center(raw);
        std::map<std::tuple<int, int, int>, std::vector<Eigen::VectorXd>> cache;
        for (size_t ci = 0; ci < combos.size(); ++ci) {
            const BasisConfig& b = combos[ci];
            const auto key = std::make_tuple(b.bt_dim, b.b1_dim, b.b2_dim);
            auto it = cache.find(key);
            if (it == cache.end()) {
                BasisConfig ib = b;
                ib.h_dim = plan.h_dims.empty() ? b.h_dim : plan.h_dims.front();
                FrameFitter fitter(centered, ib);
                it = cache.emplace(key, marginal_initial_eta(fitter, plan.options)).first;
            }
            combo_init[ci] = it->second;
        }
    }

    std::vector<ComboOutcome> outcomes(combos.size());
    parallel_for(static_cast<int>(combos.size()), plan.jobs, [&](int ci) {
        outcomes[ci] = run_combo(raw, folds, combos[ci], plan, combo_init[ci]);
    });

    CvResult result;
    double best = std::numeric_limits<double>::infinity();
    for (size_t ci = 0; ci < combos.size(); ++ci) {
        const ComboOutcome& oc = outcomes[ci];
        if (!oc.valid) {
            result.table.warnings.push_back(oc.warning);
            continue;
        }
        result.table.rows.insert(result.table.rows.end(), oc.rows.begin(), oc.rows.end());
        if (oc.best_error < best) {
            best = oc.best_error;
            result.best_bases = combos[ci];
            result.best_lambda = oc.best_lambda;
            result.best_error = oc.best_error;
            result.eta = oc.eta;
        }
    }
    if (!std::isfinite(best)) {
        throw NumericError("cross_validate: every dimension combination failed");
    }
    return result;
}

}  // namespace frame
