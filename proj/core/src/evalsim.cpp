#include "frame/evalsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "frame/basis.hpp"

namespace frame {

void SimConfig::validate() const {
    if (n < 2) throw UsageError("sim config: need n >= 2");
    if (n_test < 0) throw UsageError("sim config: need n_test >= 0");
    if (p < 1 || q < 0) throw UsageError("sim config: need p >= 1 and q >= 0");
    if (t_points < 2 || s_points < 2) {
        throw UsageError("sim config: need at least 2 grid points per axis");
    }
    if (predictor_noise_sd < 0.0 || response_noise_sd < 0.0 || theta_sd < 0.0) {
        throw UsageError("sim config: noise standard deviations must be >= 0");
    }
}

namespace {

constexpr int kFourierDim = 3;
constexpr int kBetaDim = 5;
constexpr int kSimpsonNodes = 2001;

Eigen::Vector3d fourier(double t) {
    const double w = 2.0 * std::numbers::pi * t;
    return {1.0, std::numbers::sqrt2 * std::sin(w), std::numbers::sqrt2 * std::cos(w)};
}

double link(int j, double x) {
    if (j == 0) return std::sin(x);
    if (j == 1) return std::cos(x);
    return 0.0;
}

Eigen::VectorXd equispaced(int count) {
    return Eigen::VectorXd::LinSpaced(count, 0.0, 1.0);
}

// Composite Simpson weights on [0, 1] with an odd node count.
Eigen::VectorXd simpson_weights(int nodes) {
    const double h = 1.0 / (nodes - 1);
    Eigen::VectorXd w(nodes);
    for (int k = 0; k < nodes; ++k) {
        w[k] = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    }
    return w * (h / 3.0);
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
    const Eigen::Index m = grid.size();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) {
        const double half = 0.5 * (grid[k + 1] - grid[k]);
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

// Integrals of the truth surfaces that every unit draw reuses.
struct TruthTables {
    Eigen::VectorXd t_grid;
    Eigen::VectorXd s_grid;
    Eigen::MatrixXd beta1_at_s;         // p x s_points
    Eigen::Vector3d fourier_int;        // integral of F over [0, 1]
    Eigen::MatrixXd beta2_fourier_int;  // p x 3, integral of beta_j2 F
    Eigen::VectorXd tw;                 // trapezoid weights on t_grid
    Eigen::MatrixXd beta2_at_t;         // p x t_points
    Eigen::MatrixXd fourier_at_t;       // t_points x 3
};

SimTruth draw_truth_stream(const SimConfig& config, std::mt19937_64& rng) {
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = stdnorm(rng);
        }
        return m;
    };
    SimTruth truth;
    truth.beta1_coef = draw(config.p, kBetaDim);
    truth.beta2_coef = draw(config.p, kBetaDim);
    truth.signal_functional = config.p >= 2 ? std::vector<int>{0, 1} : std::vector<int>{0};
    truth.gamma = Eigen::VectorXd::Zero(config.q);
    truth.signal_scalar.clear();
    if (config.q > 0) {
        truth.gamma[0] = 1.0;
        truth.signal_scalar.push_back(0);
    }
    return truth;
}

TruthTables build_tables(const SimConfig& config, const SimTruth& truth) {
    TruthTables tab;
    tab.t_grid = equispaced(config.t_points);
    tab.s_grid = equispaced(config.s_points);
    const SplineBasis beta_basis = SplineBasis::uniform(0.0, 1.0, kBetaDim, 3);

    // beta_j(s_l, t) = c_jl + (1 + 0.1 c_jl) beta_j2(t) with c_jl = beta_j1(s_l),
    // so each integral against X splits into two precomputable pieces.
    tab.beta1_at_s.resize(config.p, config.s_points);
    for (int j = 0; j < config.p; ++j) {
        for (int l = 0; l < config.s_points; ++l) {
            tab.beta1_at_s(j, l) =
                beta_basis.eval(tab.s_grid[l]).dot(truth.beta1_coef.row(j).transpose());
        }
    }

    // Simpson quadrature of F_m(t) and beta_j2(t) F_m(t) on the noiseless part.
    const Eigen::VectorXd sw = simpson_weights(kSimpsonNodes);
    tab.fourier_int = Eigen::Vector3d::Zero();
    tab.beta2_fourier_int = Eigen::MatrixXd::Zero(config.p, kFourierDim);
    for (int k = 0; k < kSimpsonNodes; ++k) {
        const double t = static_cast<double>(k) / (kSimpsonNodes - 1);
        const Eigen::Vector3d f = fourier(t);
        tab.fourier_int += sw[k] * f;
        const Eigen::VectorXd b = beta_basis.eval(t);
        for (int j = 0; j < config.p; ++j) {
            tab.beta2_fourier_int.row(j) += sw[k] * truth.beta2_coef.row(j).dot(b) * f.transpose();
        }
    }

    // Trapezoid weights and beta_j2 values on the observation grid handle the
    // pointwise predictor noise, which only exists at sampled points.
    tab.tw = trapezoid_weights(tab.t_grid);
    tab.beta2_at_t.resize(config.p, config.t_points);
    for (int j = 0; j < config.p; ++j) {
        for (int m = 0; m < config.t_points; ++m) {
            tab.beta2_at_t(j, m) =
                beta_basis.eval(tab.t_grid[m]).dot(truth.beta2_coef.row(j).transpose());
        }
    }

    tab.fourier_at_t.resize(config.t_points, kFourierDim);
    for (int m = 0; m < config.t_points; ++m) {
        tab.fourier_at_t.row(m) = fourier(tab.t_grid[m]).transpose();
    }
    return tab;
}

Dataset sample_units_stream(const SimConfig& config, const SimTruth& truth,
                            const TruthTables& tab, int units, std::mt19937_64& rng) {
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    Dataset d;
    d.n = units;
    d.p = config.p;
    d.q = config.q;
    d.t_grids.assign(config.p, tab.t_grid);
    d.s_grid = tab.s_grid;
    d.functional.assign(config.p, Eigen::MatrixXd(units, config.t_points));
    d.scalars.resize(units, config.q);
    d.responses.resize(units, config.s_points);
    for (int i = 0; i < units; ++i) {
        Eigen::MatrixXd theta(config.p, kFourierDim);
        std::vector<Eigen::VectorXd> noise(config.p);
        for (int j = 0; j < config.p; ++j) {
            for (int m = 0; m < kFourierDim; ++m) theta(j, m) = config.theta_sd * stdnorm(rng);
        }
        for (int j = 0; j < config.p; ++j) {
            noise[j].resize(config.t_points);
            for (int m = 0; m < config.t_points; ++m) {
                noise[j][m] = config.predictor_noise_sd * stdnorm(rng);
            }
            d.functional[j].row(i) =
                (tab.fourier_at_t * theta.row(j).transpose() + noise[j]).transpose();
        }
        for (int k = 0; k < config.q; ++k) d.scalars(i, k) = stdnorm(rng);

        for (int l = 0; l < config.s_points; ++l) {
            double y = 0.0;
            for (int j = 0; j < config.p; ++j) {
                const double c = tab.beta1_at_s(j, l);
                const double basis_part =
                    theta.row(j).dot(c * tab.fourier_int.transpose() +
                                     (1.0 + 0.1 * c) * tab.beta2_fourier_int.row(j));
                const double noise_part =
                    c * tab.tw.dot(noise[j]) +
                    (1.0 + 0.1 * c) * (tab.tw.array() * tab.beta2_at_t.row(j).transpose().array())
                                          .matrix()
                                          .dot(noise[j]);
                y += link(j, basis_part + noise_part);
            }
            y += truth.gamma.dot(d.scalars.row(i).transpose());
            d.responses(i, l) = y;
        }
        for (int l = 0; l < config.s_points; ++l) {
            d.responses(i, l) += config.response_noise_sd * stdnorm(rng);
        }
    }
    return d;
}

}  // namespace

SimOutput generate(const SimConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    SimOutput out;
    out.truth = draw_truth_stream(config, rng);
    const TruthTables tab = build_tables(config, out.truth);
    out.train = sample_units_stream(config, out.truth, tab, config.n, rng);
    out.test = sample_units_stream(config, out.truth, tab, config.n_test, rng);
    return out;
}

std::pair<SimTruth, Dataset> draw_mechanism(const SimConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    SimTruth truth = draw_truth_stream(config, rng);
    const TruthTables tab = build_tables(config, truth);
    Dataset test = sample_units_stream(config, truth, tab, config.n_test, rng);
    return {std::move(truth), std::move(test)};
}

Dataset sample_units(const SimConfig& config, const SimTruth& truth, int units,
                     unsigned long long seed) {
    config.validate();
    if (units < 0) throw UsageError("sample_units: need units >= 0");
    std::mt19937_64 rng(seed);
    const TruthTables tab = build_tables(config, truth);
    return sample_units_stream(config, truth, tab, units, rng);
}

namespace {

std::pair<double, double> rates(const std::vector<int>& selected, const std::vector<int>& signal,
                                int total) {
    auto contains = [](const std::vector<int>& v, int x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };
    int fp = 0, fn = 0;
    const int n_signal = static_cast<int>(signal.size());
    const int n_noise = total - n_signal;
    for (int idx = 0; idx < total; ++idx) {
        const bool is_signal = contains(signal, idx);
        const bool picked = contains(selected, idx);
        if (is_signal && !picked) ++fn;
        if (!is_signal && picked) ++fp;
    }
    return {n_noise > 0 ? static_cast<double>(fp) / n_noise : 0.0,
            n_signal > 0 ? static_cast<double>(fn) / n_signal : 0.0};
}

}  // namespace

SelectionRates fp_fn(const std::vector<int>& selected_functional,
                     const std::vector<int>& selected_scalar, int p, int q,
                     const SimTruth& truth) {
    for (int j : selected_functional) {
        if (j < 0 || j >= p) throw UsageError("fp_fn: functional index out of range");
    }
    for (int k : selected_scalar) {
        if (k < 0 || k >= q) throw UsageError("fp_fn: scalar index out of range");
    }
    SelectionRates r;
    std::tie(r.fp_functional, r.fn_functional) =
        rates(selected_functional, truth.signal_functional, p);
    std::tie(r.fp_scalar, r.fn_scalar) = rates(selected_scalar, truth.signal_scalar, q);
    return r;
}

MeanBaseline mean_baseline(const Dataset& train) {
    if (train.n < 1) throw DataError("mean_baseline: empty training set");
    MeanBaseline b;
    b.s_grid = train.s_grid;
    const Dataset raw = train.centering ? uncenter_dataset(train) : train;
    b.mean_curve = raw.responses.colwise().mean();
    return b;
}

Eigen::MatrixXd predict_matrix(const MeanBaseline& baseline, const Dataset& test) {
    if (test.s_grid.size() != baseline.s_grid.size() ||
        (test.s_grid - baseline.s_grid).cwiseAbs().maxCoeff() > 0.0) {
        throw DataError("mean baseline: response grid does not match the training grid");
    }
    return baseline.mean_curve.transpose().replicate(test.n, 1);
}

double prediction_error(const Eigen::MatrixXd& yhat, const Dataset& test) {
    if (yhat.rows() != test.responses.rows() || yhat.cols() != test.responses.cols()) {
        throw DataError("prediction_error: prediction shape does not match the test set");
    }
    return (yhat - test.responses).squaredNorm() / static_cast<double>(test.responses.size());
}

double prediction_error(const FrameModel& model, const Dataset& test) {
    return prediction_error(predict_matrix(model, test), test);
}

double prediction_error(const MeanBaseline& baseline, const Dataset& test) {
    return prediction_error(predict_matrix(baseline, test), test);
}

namespace {

Eigen::Index grid_index(const Eigen::VectorXd& grid, double s) {
    for (Eigen::Index l = 0; l < grid.size(); ++l) {
        if (grid[l] == s) return l;
    }
    throw DataError("mae: s = " + std::to_string(s) + " is not a response grid point");
}

}  // namespace

double mae(const Eigen::MatrixXd& yhat, const Dataset& test, double s) {
    if (yhat.rows() != test.responses.rows() || yhat.cols() != test.responses.cols()) {
        throw DataError("mae: prediction shape does not match the test set");
    }
    const Eigen::Index l = grid_index(test.s_grid, s);
    return (yhat.col(l) - test.responses.col(l)).cwiseAbs().mean();
}

double mae(const FrameModel& model, const Dataset& test, double s) {
    return mae(predict_matrix(model, test), test, s);
}

double mae(const MeanBaseline& baseline, const Dataset& test, double s) {
    return mae(predict_matrix(baseline, test), test, s);
}

}  // namespace frame
