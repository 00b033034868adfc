#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frame/depplot.hpp"
#include "frame/evalsim.hpp"
#include "frame/io.hpp"
#include "frame/solver.hpp"
#include "frame/tuning.hpp"
#include "frame/util.hpp"

namespace fs = std::filesystem;
using namespace frame;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<long long> seed;
    std::optional<int> jobs;
    std::string out;
    std::optional<std::string> lambda;
    std::optional<std::string> penalty;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON configuration file");
    cmd->add_option("--seed", flags.seed, "Random seed (overrides the config)");
    cmd->add_option("--jobs", flags.jobs, "Worker threads, 0 = all logical cores");
    cmd->add_option("--out", flags.out, "Output file or directory");
    cmd->add_option("--lambda", flags.lambda, "Penalty level: 'cv' or a number");
    cmd->add_option("--penalty", flags.penalty, "Penalty kind: identity, scad or mcp");
}

RunConfig load_config(const CommonFlags& flags) {
    RunConfig cfg = read_config(flags.config_path);
    if (flags.seed) {
        if (*flags.seed < 0) throw UsageError("--seed must be >= 0");
        cfg.seed = static_cast<unsigned long long>(*flags.seed);
        cfg.sim.seed = cfg.seed;
        cfg.cv.seed = cfg.seed;
    } else {
        cfg.sim.seed = cfg.seed;
        cfg.cv.seed = cfg.seed;
    }
    if (flags.jobs) {
        if (*flags.jobs < 0) throw UsageError("--jobs must be >= 0");
        cfg.jobs = *flags.jobs;
    }
    if (flags.penalty) cfg.penalty = PenaltySpec::parse(*flags.penalty);
    if (flags.lambda) {
        if (*flags.lambda == "cv") {
            cfg.cv_lambda = true;
        } else {
            try {
                cfg.lambda = std::stod(*flags.lambda);
            } catch (const std::exception&) {
                throw UsageError("--lambda must be 'cv' or a number");
            }
            if (cfg.lambda < 0.0 || !std::isfinite(cfg.lambda)) {
                throw UsageError("--lambda must be >= 0 and finite");
            }
            cfg.cv_lambda = false;
        }
    }
    cfg.cv.penalty = cfg.penalty;
    cfg.cv.options = cfg.options;
    return cfg;
}

NamedDataset load_training_data(const RunConfig& cfg) {
    if (cfg.paths.train_curves.empty()) {
        throw UsageError("config: 'paths.train_curves' is required for this command");
    }
    const CurveTable curves = read_curve_table(cfg.paths.train_curves);
    if (!cfg.paths.train_scalars.empty()) {
        const ScalarTable scalars = read_scalar_table(cfg.paths.train_scalars);
        return make_dataset(curves, &scalars);
    }
    return make_dataset(curves, nullptr);
}

void write_truth(const std::string& path, const SimTruth& truth, unsigned long long seed) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "{\n  \"seed\": " << seed << ",\n  \"signal_functional\": [";
    for (size_t i = 0; i < truth.signal_functional.size(); ++i) {
        out << (i ? ", " : "") << truth.signal_functional[i];
    }
    out << "],\n  \"signal_scalar\": [";
    for (size_t i = 0; i < truth.signal_scalar.size(); ++i) {
        out << (i ? ", " : "") << truth.signal_scalar[i];
    }
    out << "],\n  \"gamma\": [";
    for (Eigen::Index k = 0; k < truth.gamma.size(); ++k) {
        out << (k ? ", " : "") << format_value(truth.gamma[k]);
    }
    out << "]\n}\n";
}

int cmd_simulate(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags);
    const std::string out_dir = flags.out.empty() ? "." : flags.out;
    fs::create_directories(out_dir);
    const SimOutput sim = generate(cfg.sim);

    const auto unit_ids = default_unit_ids(sim.train.n);
    const auto pred_names = default_predictor_names(sim.train.p);
    const auto scalar_names = default_scalar_names(sim.train.q);
    write_curve_table(out_dir + "/train_curves.csv",
                      to_curve_table(sim.train, unit_ids, pred_names));
    write_scalar_table(out_dir + "/train_scalars.csv",
                       to_scalar_table(sim.train, unit_ids, scalar_names));
    if (sim.test.n > 0) {
        const auto test_ids = default_unit_ids(sim.test.n);
        write_curve_table(out_dir + "/test_curves.csv",
                          to_curve_table(sim.test, test_ids, pred_names));
        write_scalar_table(out_dir + "/test_scalars.csv",
                           to_scalar_table(sim.test, test_ids, scalar_names));
    } else {
        std::cerr << "warning: n_test = 0, no test files written\n";
    }
    write_truth(out_dir + "/truth.json", sim.truth, cfg.sim.seed);
    std::cout << "wrote " << out_dir << "/train_curves.csv (" << sim.train.n << " units)\n";
    return 0;
}

void print_cv_table(const CvResult& cv) {
    std::cout << "cv: " << cv.table.rows.size() << " (dims, lambda) rows, best bases bt="
              << cv.best_bases.bt_dim << " b1=" << cv.best_bases.b1_dim
              << " b2=" << cv.best_bases.b2_dim << " h=" << cv.best_bases.h_dim
              << " lambda=" << format_value(cv.best_lambda)
              << " error=" << format_value(cv.best_error) << "\n";
    for (const auto& w : cv.table.warnings) std::cerr << "warning: " << w << "\n";
}

void write_cv_table(const std::string& path, const CvResult& cv) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "bt_dim,b1_dim,b2_dim,h_dim,lambda,mean_error,std_error,valid_folds\n";
    for (const auto& r : cv.table.rows) {
        out << r.bases.bt_dim << ',' << r.bases.b1_dim << ',' << r.bases.b2_dim << ','
            << r.bases.h_dim << ',' << format_value(r.lambda) << ','
            << format_value(r.mean_error) << ',' << format_value(r.std_error) << ','
            << r.valid_folds << '\n';
    }
}

FitConfig resolve_fit_config(const RunConfig& cfg, const Dataset& data,
                             const CvResult** cv_out, std::optional<CvResult>& cv_store) {
    FitConfig fc;
    fc.penalty = cfg.penalty;
    fc.options = cfg.options;
    if (!cfg.cv_dims && !cfg.cv_lambda) {
        fc.bases = cfg.bases;
        fc.lambda = cfg.lambda;
        return fc;
    }
    CvPlan plan = cfg.cv;
    plan.jobs = cfg.jobs;
    if (!cfg.cv_dims) {
        plan.bt_dims = {cfg.bases.bt_dim};
        plan.b1_dims = {cfg.bases.b1_dim};
        plan.b2_dims = {cfg.bases.b2_dim};
        plan.h_dims = {cfg.bases.h_dim};
    }
    cv_store = cross_validate(data, plan);
    *cv_out = &*cv_store;
    fc.bases = cv_store->best_bases;
    fc.lambda = cfg.cv_lambda ? cv_store->best_lambda : cfg.lambda;
    return fc;
}

int cmd_fit(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags);
    const NamedDataset nd = load_training_data(cfg);
    std::optional<CvResult> cv_store;
    const CvResult* cv = nullptr;
    const FitConfig fc = resolve_fit_config(cfg, nd.data, &cv, cv_store);
    if (cv != nullptr) print_cv_table(*cv);
    const auto [model, report] = fit(nd.data, fc);

    std::cout << "final objective: " << format_value(report.final_objective) << "\n";
    std::cout << "active functional:";
    for (int j = 0; j < model.p(); ++j) {
        if (model.active_functional[j]) std::cout << ' ' << nd.predictor_names[j];
    }
    std::cout << "\nactive scalar:";
    for (int k = 0; k < model.q(); ++k) {
        if (model.active_scalar[k]) std::cout << ' ' << nd.scalar_names[k];
    }
    std::cout << "\n";
    const std::string out = flags.out.empty() ? "model.json" : flags.out;
    save_model(out, model);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_cv(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags);
    const NamedDataset nd = load_training_data(cfg);
    CvPlan plan = cfg.cv;
    plan.jobs = cfg.jobs;
    const CvResult cv = cross_validate(nd.data, plan);
    print_cv_table(cv);
    const std::string out = flags.out.empty() ? "cv_table.csv" : flags.out;
    write_cv_table(out, cv);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_predict(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags);
    if (cfg.paths.model.empty()) throw UsageError("config: 'paths.model' is required");
    if (cfg.paths.curves.empty()) throw UsageError("config: 'paths.curves' is required");
    const FrameModel model = load_model(cfg.paths.model);
    const CurveTable curves = read_curve_table(cfg.paths.curves);
    std::optional<ScalarTable> scalars;
    if (!cfg.paths.scalars.empty()) scalars = read_scalar_table(cfg.paths.scalars);
    const NamedDataset nd = make_dataset(curves, scalars ? &*scalars : nullptr, "response",
                                         /*require_response=*/false);
    if (nd.data.p != model.p() || nd.data.q != model.q()) {
        throw DataError("predict: data has " + std::to_string(nd.data.p) + " functional and " +
                        std::to_string(nd.data.q) + " scalar predictors, model expects " +
                        std::to_string(model.p()) + " and " + std::to_string(model.q()));
    }
    const std::string out_path = flags.out.empty() ? "predictions.csv" : flags.out;
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open '" + out_path + "' for writing");
    out << "unit_id,s,yhat\n";
    for (int i = 0; i < nd.data.n; ++i) {
        std::vector<SampledCurve> unit_curves(model.p());
        for (int j = 0; j < model.p(); ++j) {
            unit_curves[j].grid = nd.data.t_grids[j];
            unit_curves[j].values = nd.data.functional[j].row(i).transpose();
        }
        const SampledCurve yhat =
            predict(model, unit_curves, nd.data.scalars.row(i).transpose());
        for (Eigen::Index l = 0; l < yhat.grid.size(); ++l) {
            out << nd.unit_ids[i] << ',' << format_value(yhat.grid[l]) << ','
                << format_value(yhat.values[l]) << '\n';
        }
    }
    std::cout << "wrote " << out_path << " (" << nd.data.n << " units)\n";
    return 0;
}

int cmd_depplot(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags);
    if (cfg.paths.model.empty()) throw UsageError("config: 'paths.model' is required");
    const FrameModel model = load_model(cfg.paths.model);
    if (model.p() == 0) throw DataError("depplot: model has no functional predictors");
    const int j = cfg.depplot.predictor;
    if (j < 0 || j >= model.p()) {
        throw UsageError("config: depplot.predictor out of range [0, " +
                         std::to_string(model.p()) + ")");
    }
    std::vector<ShapeSpecConfig> shape_cfgs = cfg.depplot.shapes;
    if (shape_cfgs.empty()) {
        const auto& grid = model.t_grids[j];
        for (const char* kind : {"linear", "logarithmic", "exponential"}) {
            ShapeSpecConfig sc;
            sc.kind = kind;
            sc.start = 0.0;
            sc.end = 100.0;
            sc.points = static_cast<int>(grid.size());
            sc.t_min = grid[0];
            sc.t_max = grid[grid.size() - 1];
            shape_cfgs.push_back(sc);
        }
    }
    std::vector<NamedCurve> shapes;
    for (const auto& sc : shape_cfgs) {
        ShapeSpec spec;
        spec.kind = ShapeSpec::parse_kind(sc.kind);
        spec.start = sc.start;
        spec.end = sc.end;
        if (sc.points < 2) throw UsageError("config: shape needs at least 2 points");
        if (!(sc.t_max > sc.t_min)) throw UsageError("config: shape needs t_max > t_min");
        spec.grid = Eigen::VectorXd::LinSpaced(sc.points, sc.t_min, sc.t_max);
        for (auto& nc : make_shapes(spec)) shapes.push_back(std::move(nc));
    }
    const auto table = dependence_table(model, j, shapes);
    const std::string out_path = flags.out.empty() ? "dependence.csv" : flags.out;
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open '" + out_path + "' for writing");
    out << "shape_id,series,t,value\n";
    for (const auto& pair : table) {
        for (Eigen::Index m = 0; m < pair.input.grid.size(); ++m) {
            out << pair.shape_id << ",input," << format_value(pair.input.grid[m]) << ','
                << format_value(pair.input.values[m]) << '\n';
        }
        for (Eigen::Index l = 0; l < pair.output.grid.size(); ++l) {
            out << pair.shape_id << ",output," << format_value(pair.output.grid[l]) << ','
                << format_value(pair.output.values[l]) << '\n';
        }
    }
    std::cout << "wrote " << out_path << " (" << table.size() << " shapes)\n";
    return 0;
}

struct ReplicateRow {
    int replicate = 0;
    unsigned long long seed = 0;
    bool ok = false;
    std::string error;
    SelectionRates rates;
    double pe_frame = 0.0;
    double pe_mean = 0.0;
    BasisConfig bases;
    double lambda = 0.0;
};

int cmd_replicate(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags);
    if (cfg.replicates < 1) throw UsageError("config: 'replicates' must be >= 1");
    if (cfg.sim.n_test < 1) throw UsageError("config: replicate needs sim.n_test >= 1");
    const std::string out_dir = flags.out.empty() ? "." : flags.out;
    fs::create_directories(out_dir);

    // The generating mechanism and the held-out test set are drawn once from
    // the base seed; replicates redraw only the training data. Replicate
    // means then estimate the variability of the procedure, not of the truth.
    SimConfig sim_cfg = cfg.sim;
    sim_cfg.seed = cfg.seed;
    const auto [truth, test_set] = draw_mechanism(sim_cfg);

    std::vector<ReplicateRow> rows(cfg.replicates);
    parallel_for(cfg.replicates, cfg.jobs, [&](int r) {
        ReplicateRow& row = rows[r];
        row.replicate = r;
        row.seed = cfg.seed + 1 + static_cast<unsigned long long>(r);
        try {
            const Dataset train = sample_units(sim_cfg, truth, sim_cfg.n, row.seed);

            CvPlan plan = cfg.cv;
            plan.seed = row.seed;
            plan.jobs = 1;  // replicates are already fanned out
            const CvResult cv = cross_validate(train, plan);

            FitConfig fc;
            fc.bases = cv.best_bases;
            fc.penalty = cfg.penalty;
            fc.lambda = cfg.cv_lambda ? cv.best_lambda : cfg.lambda;
            fc.options = cfg.options;
            fc.eta0 = cv.eta;
            const auto [model, report] = fit(train, fc);

            std::vector<int> sel_f, sel_s;
            for (int j = 0; j < model.p(); ++j) {
                if (model.active_functional[j]) sel_f.push_back(j);
            }
            for (int k = 0; k < model.q(); ++k) {
                if (model.active_scalar[k]) sel_s.push_back(k);
            }
            row.rates = fp_fn(sel_f, sel_s, sim_cfg.p, sim_cfg.q, truth);
            row.pe_frame = prediction_error(model, test_set);
            row.pe_mean = prediction_error(mean_baseline(train), test_set);
            row.bases = fc.bases;
            row.lambda = fc.lambda;
            row.ok = true;
            log_info("replicate " + std::to_string(r) +
                     " done, pe=" + format_value(row.pe_frame));
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });

    const std::string rows_path = out_dir + "/replicates.csv";
    {
        std::ofstream out(rows_path);
        if (!out) throw DataError("cannot open '" + rows_path + "' for writing");
        out << "replicate,seed,status,fp_functional,fn_functional,fp_scalar,fn_scalar,"
               "pe_frame,pe_mean,bt_dim,b1_dim,b2_dim,h_dim,lambda\n";
        for (const auto& row : rows) {
            out << row.replicate << ',' << row.seed << ',' << (row.ok ? "ok" : "failed") << ',';
            if (row.ok) {
                out << format_value(row.rates.fp_functional) << ','
                    << format_value(row.rates.fn_functional) << ','
                    << format_value(row.rates.fp_scalar) << ','
                    << format_value(row.rates.fn_scalar) << ',' << format_value(row.pe_frame)
                    << ',' << format_value(row.pe_mean) << ',' << row.bases.bt_dim << ','
                    << row.bases.b1_dim << ',' << row.bases.b2_dim << ',' << row.bases.h_dim
                    << ',' << format_value(row.lambda) << '\n';
            } else {
                out << ",,,,,,,,,,\n";
            }
        }
    }

    std::vector<const ReplicateRow*> ok_rows;
    for (const auto& row : rows) {
        if (row.ok) {
            ok_rows.push_back(&row);
        } else {
            std::cerr << "warning: replicate " << row.replicate << " failed: " << row.error
                      << "\n";
        }
    }
    if (ok_rows.empty()) throw NumericError("replicate: every replicate failed");

    auto mean_se = [&](auto get) {
        double mean = 0.0;
        for (const auto* row : ok_rows) mean += get(*row);
        mean /= static_cast<double>(ok_rows.size());
        double var = 0.0;
        for (const auto* row : ok_rows) var += (get(*row) - mean) * (get(*row) - mean);
        var /= std::max<size_t>(1, ok_rows.size() - 1);
        return std::pair<double, double>(mean, std::sqrt(var / ok_rows.size()));
    };

    const std::string summary_path = out_dir + "/summary.csv";
    {
        std::ofstream out(summary_path);
        if (!out) throw DataError("cannot open '" + summary_path + "' for writing");
        out << "metric,method,mean,se\n";
        auto emit = [&](const char* metric, const char* method, auto get) {
            const auto [m, se] = mean_se(get);
            out << metric << ',' << method << ',' << format_value(m) << ',' << format_value(se)
                << '\n';
        };
        emit("fp_functional", "frame", [](const ReplicateRow& r) { return r.rates.fp_functional; });
        emit("fn_functional", "frame", [](const ReplicateRow& r) { return r.rates.fn_functional; });
        emit("fp_scalar", "frame", [](const ReplicateRow& r) { return r.rates.fp_scalar; });
        emit("fn_scalar", "frame", [](const ReplicateRow& r) { return r.rates.fn_scalar; });
        emit("pe", "frame", [](const ReplicateRow& r) { return r.pe_frame; });
        emit("pe", "mean", [](const ReplicateRow& r) { return r.pe_mean; });
    }
    std::cout << "wrote " << rows_path << " and " << summary_path << " ("
              << ok_rows.size() << "/" << rows.size() << " replicates ok)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FRAME: sparse nonlinear additive regression for functional responses"};
    app.require_subcommand(1);

    CommonFlags flags;
    int (*handler)(const CommonFlags&) = nullptr;
    const std::pair<const char*, int (*)(const CommonFlags&)> cmds[] = {
        {"simulate", cmd_simulate}, {"fit", cmd_fit},         {"predict", cmd_predict},
        {"cv", cmd_cv},             {"depplot", cmd_depplot}, {"replicate", cmd_replicate},
    };
    for (const auto& [name, fn] : cmds) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, flags);
        sub->callback([&handler, fn = fn] { handler = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return handler(flags);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
