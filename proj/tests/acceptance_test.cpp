// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frame/basis.hpp"
#include "frame/evalsim.hpp"
#include "frame/io.hpp"
#include "frame/solver.hpp"
#include "frame/tuning.hpp"
#include "frame/util.hpp"

using namespace frame;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << ": " << name;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

Dataset random_dataset(std::mt19937_64& rng, int n = 12, int p = 2, int q = 2, int T = 25,
                       int L = 8) {
    std::normal_distribution<double> norm;
    Dataset d;
    d.n = n;
    d.p = p;
    d.q = q;
    d.t_grids.assign(p, Eigen::VectorXd::LinSpaced(T, 0.0, 1.0));
    for (int j = 0; j < p; ++j) {
        Eigen::MatrixXd x(n, T);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = norm(rng);
        d.functional.push_back(x);
    }
    d.scalars.resize(n, q);
    for (Eigen::Index i = 0; i < d.scalars.size(); ++i) d.scalars(i) = norm(rng);
    d.s_grid = Eigen::VectorXd::LinSpaced(L, 0.0, 1.0);
    d.responses.resize(n, L);
    for (Eigen::Index i = 0; i < d.responses.size(); ++i) d.responses(i) = norm(rng);
    return d;
}

const BasisConfig kSmallBases{4, 4, 4, 4};

// ---------------------------------------------------------------------------
// Criterion 1: simulation-study reproduction at R = 20.

struct ReplicateMetrics {
    SelectionRates rates;
    double pe_frame = 0.0;
    double pe_mean = 0.0;
    bool ok = false;
};

ReplicateMetrics one_replicate(const SimConfig& sim_cfg, const SimTruth& truth,
                               const Dataset& test, unsigned long long seed) {
    ReplicateMetrics m;
    const Dataset train = sample_units(sim_cfg, truth, sim_cfg.n, seed);

    CvPlan plan;  // defaults: K = 10, dims {4,5,6}, 20 lambdas, holdout bt/b2 dim
    plan.seed = seed;
    plan.jobs = 1;
    const CvResult cv = cross_validate(train, plan);

    FitConfig fc;
    fc.bases = cv.best_bases;
    fc.lambda = cv.best_lambda;
    fc.eta0 = cv.eta;
    const auto [model, report] = fit(train, fc);

    std::vector<int> sel_f, sel_s;
    for (int j = 0; j < model.p(); ++j) {
        if (model.active_functional[j]) sel_f.push_back(j);
    }
    for (int k = 0; k < model.q(); ++k) {
        if (model.active_scalar[k]) sel_s.push_back(k);
    }
    m.rates = fp_fn(sel_f, sel_s, sim_cfg.p, sim_cfg.q, truth);
    m.pe_frame = prediction_error(model, test);
    m.pe_mean = prediction_error(mean_baseline(train), test);
    m.ok = true;
    return m;
}

void criterion_1() {
    const int R = 20;
    const unsigned long long base_seed = 1029;
    const auto t0 = std::chrono::steady_clock::now();

    // One mechanism, one test set; replicates redraw only the training data,
    // matching the reference study's per-replicate variability.
    SimConfig sim_cfg;
    sim_cfg.seed = base_seed;
    const auto [truth, test_set] = draw_mechanism(sim_cfg);

    std::vector<ReplicateMetrics> metrics(R);
    parallel_for(R, 0, [&](int r) {
        try {
            metrics[r] = one_replicate(sim_cfg, truth, test_set, base_seed + 1 + r);
        } catch (const std::exception& e) {
            std::cerr << "replicate " << r << " failed: " << e.what() << "\n";
        }
    });
    const double minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;

    int ok_count = 0;
    double fp_f = 0, fn_f = 0, fp_s = 0, fn_s = 0, pe = 0, pe_mean = 0;
    for (const auto& m : metrics) {
        if (!m.ok) continue;
        ++ok_count;
        fp_f += m.rates.fp_functional;
        fn_f += m.rates.fn_functional;
        fp_s += m.rates.fp_scalar;
        fn_s += m.rates.fn_scalar;
        pe += m.pe_frame;
        pe_mean += m.pe_mean;
    }
    if (ok_count == 0) {
        report("criterion 1: simulation study reproduction (R=20)", false, "all replicates failed");
        return;
    }
    fp_f /= ok_count;
    fn_f /= ok_count;
    fp_s /= ok_count;
    fn_s /= ok_count;
    pe /= ok_count;
    pe_mean /= ok_count;

    std::ostringstream detail;
    detail << "FP_f=" << fp_f << " FN_f=" << fn_f << " FP_s=" << fp_s << " FN_s=" << fn_s
           << " PE=" << pe << " MeanPE=" << pe_mean << " min=" << minutes
           << " ok=" << ok_count << "/" << R;
    const bool ok = ok_count == R && fp_f <= 0.05 && fn_f <= 0.15 && fp_s <= 0.05 &&
                    fn_s == 0.0 && pe <= 0.12 && pe_mean >= 1.10 && pe_mean <= 1.30 &&
                    minutes <= 15.0;
    report("criterion 1: simulation study reproduction (R=20)", ok, detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: solver property suite.

bool property_monotone_objective() {
    std::mt19937_64 rng(9001);
    SolverOptions opt;
    opt.record_steps = true;
    for (int rep = 0; rep < 50; ++rep) {
        const Dataset d = center(random_dataset(rng));
        FrameFitter fitter(d, kSmallBases);
        const double lambda = 0.3 * fitter.lambda_max();
        const FitReport report = fitter.run(lambda, PenaltySpec::identity(), opt);
        for (const auto& [before, after] : report.step_objectives) {
            if (after > before + 1e-10 * std::max(1.0, std::abs(before))) return false;
        }
    }
    return true;
}

bool property_optimality() {
    std::mt19937_64 rng(9002);
    for (int rep = 0; rep < 10; ++rep) {
        const Dataset d = center(random_dataset(rng));
        FrameFitter fitter(d, kSmallBases);
        const double lambda = 0.4 * fitter.lambda_max();
        fitter.run(lambda, PenaltySpec::identity(), {});
        for (int b = 0; b < fitter.p() + fitter.q(); ++b) {
            if (fitter.block_active(b)) {
                if (fitter.fixed_point_residual(b, lambda) >= 1e-6) return false;
            } else if (fitter.projection_norm(b) > lambda + 1e-8) {
                return false;
            }
        }
    }
    return true;
}

bool property_loop_oracles() {
    std::mt19937_64 rng(9003);
    const Dataset raw = random_dataset(rng, 14, 2, 2, 25, 8);
    const Dataset d = center(raw);
    FrameFitter fitter(d, kSmallBases);
    const double lambda = 0.25 * fitter.lambda_max();
    const PenaltySpec penalty = PenaltySpec::identity();
    fitter.run(lambda, penalty, {});
    const FrameModel model = fitter.snapshot(lambda, penalty);

    // Objective oracle.
    const Eigen::Index L = d.s_grid.size();
    Eigen::VectorXd resid(d.n * L);
    for (int i = 0; i < d.n; ++i) {
        for (Eigen::Index l = 0; l < L; ++l) resid[i * L + l] = d.responses(i, l);
    }
    double pen_term = 0.0;
    for (int j = 0; j < model.p(); ++j) {
        const SplineBasis h = SplineBasis::uniform(model.h_ranges[j][0], model.h_ranges[j][1],
                                                   model.bases.h_dim, model.bases.degree);
        Eigen::VectorXd fitted(d.n * L);
        for (int i = 0; i < d.n; ++i) {
            for (Eigen::Index l = 0; l < L; ++l) {
                const double u = fitter.regressors().index_value(i, j, l, model.eta[j]);
                double acc = 0.0;
                const Eigen::VectorXd hv = h.eval(u);
                for (int b = 0; b < model.bases.h_dim; ++b) {
                    acc += (hv[b] - model.h_col_means[j][b]) * model.xi[j][b];
                }
                fitted[i * L + l] = acc;
            }
        }
        resid -= fitted;
        pen_term += penalty.value(fitted.norm(), lambda);
    }
    for (int k = 0; k < model.q(); ++k) {
        Eigen::VectorXd fitted(d.n * L);
        for (int i = 0; i < d.n; ++i) {
            for (Eigen::Index l = 0; l < L; ++l) {
                fitted[i * L + l] = (d.scalars(i, k) - model.omega_col_means[k]) * model.alpha[k];
            }
        }
        resid -= fitted;
        pen_term += penalty.value(fitted.norm(), lambda);
    }
    const double oracle = resid.squaredNorm() / (2.0 * L) + pen_term / L;
    if (std::abs(fitter.objective(lambda, penalty) - oracle) >
        1e-12 * std::max(1.0, std::abs(oracle))) {
        return false;
    }

    // PE and MAE oracles on random predictions.
    std::normal_distribution<double> norm;
    Eigen::MatrixXd yhat(raw.n, L);
    for (Eigen::Index i = 0; i < yhat.size(); ++i) yhat(i) = norm(rng);
    double pe_oracle = 0.0;
    for (int i = 0; i < raw.n; ++i) {
        for (Eigen::Index l = 0; l < L; ++l) {
            const double diff = raw.responses(i, l) - yhat(i, l);
            pe_oracle += diff * diff;
        }
    }
    pe_oracle /= static_cast<double>(raw.n) * L;
    if (std::abs(prediction_error(yhat, raw) - pe_oracle) > 1e-12) return false;
    double mae_oracle = 0.0;
    for (int i = 0; i < raw.n; ++i) mae_oracle += std::abs(raw.responses(i, 3) - yhat(i, 3));
    mae_oracle /= raw.n;
    return std::abs(mae(yhat, raw, raw.s_grid[3]) - mae_oracle) <= 1e-12;
}

bool property_cross_integral() {
    std::mt19937_64 rng(9004);
    auto rand_dim = [&](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };
    auto simpson = [](const std::function<double(double)>& f, double a, double b) {
        const int nodes = 2001;
        const double h = (b - a) / (nodes - 1);
        double acc = 0.0;
        for (int k = 0; k < nodes; ++k) {
            const double w = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            acc += w * f(a + k * h);
        }
        return acc * h / 3.0;
    };
    for (int rep = 0; rep < 20; ++rep) {
        const int d1 = rand_dim(4, 7), d2 = rand_dim(4, 7), dt = rand_dim(4, 7);
        const double t_hi = 0.5 + 0.1 * rand_dim(0, 10);
        const SplineBasis b_s = SplineBasis::uniform(0.0, 1.0, d1, 3);
        const SplineBasis b_t = SplineBasis::uniform(0.0, t_hi, d2, 3);
        const SplineBasis bt_tilde = SplineBasis::uniform(0.0, t_hi, dt, 3);
        const Eigen::VectorXd s_grid = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
        const CrossIntegralMatrix M = cross_integral(b_s, b_t, bt_tilde, s_grid);
        for (int r = 0; r < dt; ++r) {
            const double q = simpson([&](double t) { return bt_tilde.eval(t)[r]; }, 0.0, t_hi);
            if (std::abs(M.tilde_integrals[r] - q) > 1e-6 * std::max(1.0, std::abs(q))) {
                return false;
            }
        }
        for (int r = 0; r < d2; ++r) {
            for (int c = 0; c < dt; ++c) {
                const double q = simpson(
                    [&](double t) { return b_t.eval(t)[r] * bt_tilde.eval(t)[c]; }, 0.0, t_hi);
                if (std::abs(M.cross_tt(r, c) - q) > 1e-6 * std::max(1.0, std::abs(q))) {
                    return false;
                }
            }
        }
    }
    return true;
}

bool property_linear_recovery() {
    // Noiseless linear-link instance whose true direction sits near the
    // leading right singular vector of the stacked regressors, so the
    // eigenvector initialization starts inside the Gauss-Newton contraction
    // basin and the Taylor model is essentially exact from the first step.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> norm;
    const int n = 30, T = 30;
    const Eigen::Index L = 10;
    Dataset d;
    d.n = n;
    d.p = 1;
    d.q = 0;
    d.t_grids.assign(1, Eigen::VectorXd::LinSpaced(T, 0.0, 1.0));
    Eigen::MatrixXd x(n, T);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = norm(rng);
    d.functional.push_back(x);
    d.scalars.resize(n, 0);
    d.s_grid = Eigen::VectorXd::LinSpaced(L, 0.0, 1.0);
    d.responses = Eigen::MatrixXd::Zero(n, L);

    BasisConfig bases = kSmallBases;
    bases.bt_dim = 5;  // keeps the least-squares direction unique

    FrameFitter probe(center(d), bases);
    const Eigen::Index dim = probe.regressors().d1() + probe.regressors().d2();
    Eigen::MatrixXd A0(n * L, dim);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index l = 0; l < L; ++l) {
            A0.row(i * L + l) = probe.regressors().at(i, 0, l).transpose();
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A0, Eigen::ComputeThinV);
    const Eigen::VectorXd lead = svd.matrixV().col(0);
    Eigen::VectorXd w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w[i] = norm(rng);
    const Eigen::VectorXd eta_true = (lead + 0.01 * w).normalized();
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index l = 0; l < L; ++l) {
            d.responses(i, l) = probe.regressors().index_value(i, 0, l, eta_true);
        }
    }

    // Closed-form least-squares direction on the materialized regressors.
    const Dataset centered = center(d);
    Eigen::VectorXd yc(n * L);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index l = 0; l < L; ++l) yc[i * L + l] = centered.responses(i, l);
    }
    Eigen::VectorXd eta_canon = A0.completeOrthogonalDecomposition().solve(yc);
    eta_canon.normalize();
    for (Eigen::Index i = 0; i < eta_canon.size(); ++i) {
        if (std::abs(eta_canon[i]) > 1e-12) {
            if (eta_canon[i] < 0.0) eta_canon = -eta_canon;
            break;
        }
    }
    const Eigen::VectorXd u1 = A0 * eta_canon;
    const Eigen::VectorXd u2 = A0 * eta_true;
    if (std::abs(u1.dot(u2)) / (u1.norm() * u2.norm()) <= 1.0 - 1e-10) return false;

    FrameFitter fitter(centered, bases);
    SolverOptions opt;
    opt.max_outer = 5;
    opt.outer_tol = 0.0;
    const FitReport rep = fitter.run(0.0, PenaltySpec::identity(), opt);
    return fitter.block_active(0) && rep.final_objective < 1e-10 &&
           (fitter.eta()[0] - eta_canon).cwiseAbs().maxCoeff() < 1e-6;
}

bool property_shift_and_lla() {
    std::mt19937_64 rng(9006);
    const Dataset d = random_dataset(rng);
    Dataset shifted = d;
    shifted.responses.array() += 2.5;
    FitConfig fc;
    fc.bases = kSmallBases;
    FrameFitter probe(center(d), fc.bases);
    fc.lambda = 0.3 * probe.lambda_max();
    const auto [m1, r1] = fit(d, fc);
    const auto [m2, r2] = fit(shifted, fc);
    for (int j = 0; j < m1.p(); ++j) {
        if ((m1.eta[j] - m2.eta[j]).cwiseAbs().maxCoeff() > 1e-10) return false;
        if ((m1.xi[j] - m2.xi[j]).cwiseAbs().maxCoeff() > 1e-10) return false;
    }
    if ((m1.alpha - m2.alpha).cwiseAbs().maxCoeff() > 1e-10) return false;
    const Eigen::MatrixXd y1 = predict_matrix(m1, d);
    const Eigen::MatrixXd y2 = predict_matrix(m2, shifted);
    if (((y2 - y1).array() - 2.5).cwiseAbs().maxCoeff() > 1e-10) return false;

    // Identity-penalty LLA reweighting changes nothing, bit for bit.
    const Dataset c = center(d);
    FrameFitter a(c, fc.bases), b(c, fc.bases);
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(a.p() + a.q(), fc.lambda);
    a.sweeps_to_convergence(flat, 200, 1e-9);
    b.sweeps_to_convergence(flat, 200, 1e-9);
    const Eigen::VectorXd reweighted = b.lla_thresholds(fc.lambda, PenaltySpec::identity());
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        if (reweighted[i] != flat[i]) return false;
    }
    a.sweeps_to_convergence(flat, 50, 0.0);
    b.sweeps_to_convergence(reweighted, 50, 0.0);
    for (int j = 0; j < a.p(); ++j) {
        for (Eigen::Index i = 0; i < a.xi()[j].size(); ++i) {
            if (a.xi()[j][i] != b.xi()[j][i]) return false;
        }
    }
    for (Eigen::Index k = 0; k < a.alpha().size(); ++k) {
        if (a.alpha()[k] != b.alpha()[k]) return false;
    }
    return true;
}

void criterion_2() {
    report("criterion 2a: objective monotone over solver steps", property_monotone_objective());
    report("criterion 2b: blockwise optimality conditions", property_optimality());
    report("criterion 2c: objective/PE/MAE loop oracles (1e-12)", property_loop_oracles());
    report("criterion 2d: cross integrals vs Simpson oracle (1e-6)", property_cross_integral());
    report("criterion 2e: noiseless linear index recovery", property_linear_recovery());
    report("criterion 2f: shift equivariance and identity-LLA bitwise match",
           property_shift_and_lla());
}

// ---------------------------------------------------------------------------
// Criterion 3: replicate command is byte-deterministic.

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_3() {
    const fs::path tmp =
        fs::temp_directory_path() / ("frame_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(tmp);
    const std::string cfg = (tmp / "cfg.json").string();
    {
        std::ofstream out(cfg);
        out << R"({
  "sim": {"n": 20, "n_test": 10, "p": 2, "q": 2, "t_points": 20, "s_points": 5},
  "replicates": 2,
  "cv": {"K": 4, "n_lambda": 5, "bt_dims": [4], "b1_dims": [4], "b2_dims": [4], "h_dims": [4]},
  "seed": 17
})";
    }
    bool ok = true;
    std::string detail;
    for (const char* dir : {"r1", "r2"}) {
        const std::string cmd = std::string(FRAME_CLI_PATH) + " replicate --config " + cfg +
                                " --jobs 2 --out " + (tmp / dir).string() + " >/dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            ok = false;
            detail = "replicate command failed";
        }
    }
    if (ok) {
        for (const char* name : {"replicates.csv", "summary.csv"}) {
            const std::string a = slurp((tmp / "r1" / name).string());
            const std::string b = slurp((tmp / "r2" / name).string());
            if (a.empty() || a != b) {
                ok = false;
                detail = std::string(name) + " differs between runs";
            }
        }
    }
    fs::remove_all(tmp);
    report("criterion 3: replicate output is byte-identical for a fixed seed", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: empty active set at and above lambda_max.

void criterion_4() {
    std::mt19937_64 rng(9100);
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
        const Dataset d = center(random_dataset(rng));
        FrameFitter fitter(d, kSmallBases);
        fitter.run(1.01 * fitter.lambda_max(), PenaltySpec::identity(), {});
        for (int b = 0; b < fitter.p() + fitter.q(); ++b) {
            if (fitter.block_active(b)) ok = false;
        }
    }
    report("criterion 4: empty active set at 1.01 * lambda_max (20 datasets)", ok);
}

}  // namespace

int main() {
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_1();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ")
              << (g_failures == 0 ? "" : std::to_string(g_failures)) << std::endl;
    return g_failures == 0 ? 0 : 1;
}
