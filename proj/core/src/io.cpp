#include "frame/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace frame {

using nlohmann::json;

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double parse_double(const std::string& field, const std::string& path, size_t row) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw DataError(path + ": row " + std::to_string(row) + ": '" + field +
                        "' is not a number");
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return in;
}

// Index of `id` in `ids`, appending it when new.
int intern(std::vector<std::string>& ids, const std::string& id) {
    for (size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return static_cast<int>(i);
    }
    ids.push_back(id);
    return static_cast<int>(ids.size()) - 1;
}

}  // namespace

int CurveTable::find_series(const std::string& id) const {
    for (size_t s = 0; s < series_ids.size(); ++s) {
        if (series_ids[s] == id) return static_cast<int>(s);
    }
    return -1;
}

CurveTable read_curve_table(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{
                                       "unit_id", "series_id", "t", "value"}) {
        throw DataError(path + ": row 1: expected header unit_id,series_id,t,value");
    }
    CurveTable table;
    // (series, unit) -> sorted (t, value) rows
    std::vector<std::vector<std::vector<std::pair<double, double>>>> rows;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw DataError(path + ": row " + std::to_string(row) + ": expected 4 fields, got " +
                            std::to_string(fields.size()));
        }
        const int u = intern(table.unit_ids, fields[0]);
        const int s = intern(table.series_ids, fields[1]);
        const double t = parse_double(fields[2], path, row);
        const double v = parse_double(fields[3], path, row);
        if (static_cast<size_t>(s) >= rows.size()) rows.resize(s + 1);
        if (static_cast<size_t>(u) >= rows[s].size()) rows[s].resize(table.unit_ids.size());
        rows[s].resize(std::max(rows[s].size(), table.unit_ids.size()));
        rows[s][u].emplace_back(t, v);
    }
    const int n = static_cast<int>(table.unit_ids.size());
    table.grids.resize(table.series_ids.size());
    table.values.resize(table.series_ids.size());
    for (size_t s = 0; s < table.series_ids.size(); ++s) {
        rows[s].resize(n);
        Eigen::VectorXd grid;
        for (int u = 0; u < n; ++u) {
            auto& pts = rows[s][u];
            std::sort(pts.begin(), pts.end());
            if (u == 0) {
                grid.resize(pts.size());
                for (size_t m = 0; m < pts.size(); ++m) grid[m] = pts[m].first;
            }
            if (static_cast<Eigen::Index>(pts.size()) != grid.size()) {
                throw DataError(path + ": series '" + table.series_ids[s] + "': unit '" +
                                table.unit_ids[u] + "' has " + std::to_string(pts.size()) +
                                " points, expected " + std::to_string(grid.size()));
            }
            for (size_t m = 0; m < pts.size(); ++m) {
                if (pts[m].first != grid[m]) {
                    throw DataError(path + ": series '" + table.series_ids[s] + "': unit '" +
                                    table.unit_ids[u] + "' is not observed on the shared grid");
                }
                if (m > 0 && pts[m].first == pts[m - 1].first) {
                    throw DataError(path + ": series '" + table.series_ids[s] + "': unit '" +
                                    table.unit_ids[u] + "' has duplicate t = " +
                                    format_value(pts[m].first));
                }
            }
        }
        table.grids[s] = grid;
        table.values[s].resize(n, grid.size());
        for (int u = 0; u < n; ++u) {
            for (Eigen::Index m = 0; m < grid.size(); ++m) {
                table.values[s](u, m) = rows[s][u][m].second;
            }
        }
    }
    return table;
}

void write_curve_table(const std::string& path, const CurveTable& table) {
    std::ofstream out = open_out(path);
    out << "unit_id,series_id,t,value\n";
    for (size_t s = 0; s < table.series_ids.size(); ++s) {
        for (size_t u = 0; u < table.unit_ids.size(); ++u) {
            for (Eigen::Index m = 0; m < table.grids[s].size(); ++m) {
                out << table.unit_ids[u] << ',' << table.series_ids[s] << ','
                    << format_value(table.grids[s][m]) << ','
                    << format_value(table.values[s](u, m)) << '\n';
            }
        }
    }
    if (!out) throw DataError("failed while writing '" + path + "'");
}

ScalarTable ScalarTable::empty(std::vector<std::string> unit_ids) {
    ScalarTable t;
    t.values.resize(static_cast<Eigen::Index>(unit_ids.size()), 0);
    t.unit_ids = std::move(unit_ids);
    return t;
}

ScalarTable read_scalar_table(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) != std::vector<std::string>{"unit_id", "name", "value"}) {
        throw DataError(path + ": row 1: expected header unit_id,name,value");
    }
    ScalarTable table;
    std::vector<std::vector<std::pair<int, double>>> cells;  // per unit: (name idx, value)
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3) {
            throw DataError(path + ": row " + std::to_string(row) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        }
        const int u = intern(table.unit_ids, fields[0]);
        const int k = intern(table.names, fields[1]);
        if (static_cast<size_t>(u) >= cells.size()) cells.resize(u + 1);
        for (const auto& [kk, vv] : cells[u]) {
            if (kk == k) {
                throw DataError(path + ": row " + std::to_string(row) + ": duplicate entry for ('" +
                                fields[0] + "', '" + fields[1] + "')");
            }
        }
        cells[u].emplace_back(k, parse_double(fields[2], path, row));
    }
    const int n = static_cast<int>(table.unit_ids.size());
    const int q = static_cast<int>(table.names.size());
    table.values.resize(n, q);
    for (int u = 0; u < n; ++u) {
        if (static_cast<int>(cells[u].size()) != q) {
            throw DataError(path + ": unit '" + table.unit_ids[u] + "' has " +
                            std::to_string(cells[u].size()) + " scalars, expected " +
                            std::to_string(q));
        }
        for (const auto& [k, v] : cells[u]) table.values(u, k) = v;
    }
    return table;
}

void write_scalar_table(const std::string& path, const ScalarTable& table) {
    std::ofstream out = open_out(path);
    out << "unit_id,name,value\n";
    for (size_t u = 0; u < table.unit_ids.size(); ++u) {
        for (size_t k = 0; k < table.names.size(); ++k) {
            out << table.unit_ids[u] << ',' << table.names[k] << ','
                << format_value(table.values(u, k)) << '\n';
        }
    }
    if (!out) throw DataError("failed while writing '" + path + "'");
}

NamedDataset make_dataset(const CurveTable& curves, const ScalarTable* scalars,
                          const std::string& response_series, bool require_response) {
    NamedDataset nd;
    nd.unit_ids = curves.unit_ids;
    const int n = static_cast<int>(curves.unit_ids.size());
    const int resp = curves.find_series(response_series);
    if (resp < 0 && require_response) {
        throw DataError("curve file lacks the '" + response_series + "' series");
    }
    Dataset& d = nd.data;
    d.n = n;
    for (size_t s = 0; s < curves.series_ids.size(); ++s) {
        if (static_cast<int>(s) == resp) continue;
        nd.predictor_names.push_back(curves.series_ids[s]);
        d.t_grids.push_back(curves.grids[s]);
        d.functional.push_back(curves.values[s]);
    }
    d.p = static_cast<int>(d.functional.size());
    if (resp >= 0) {
        d.s_grid = curves.grids[resp];
        d.responses = curves.values[resp];
    } else {
        d.s_grid.resize(0);
        d.responses.resize(n, 0);
    }
    if (scalars != nullptr && !scalars->names.empty()) {
        nd.scalar_names = scalars->names;
        d.q = static_cast<int>(scalars->names.size());
        d.scalars.resize(n, d.q);
        for (int u = 0; u < n; ++u) {
            const auto it = std::find(scalars->unit_ids.begin(), scalars->unit_ids.end(),
                                      curves.unit_ids[u]);
            if (it == scalars->unit_ids.end()) {
                throw DataError("scalar file lacks unit '" + curves.unit_ids[u] + "'");
            }
            d.scalars.row(u) = scalars->values.row(it - scalars->unit_ids.begin());
        }
    } else {
        d.q = 0;
        d.scalars.resize(n, 0);
    }
    if (require_response) d.validate();
    return nd;
}

CurveTable to_curve_table(const Dataset& data, const std::vector<std::string>& unit_ids,
                          const std::vector<std::string>& predictor_names,
                          const std::string& response_series) {
    if (static_cast<int>(unit_ids.size()) != data.n ||
        static_cast<int>(predictor_names.size()) != data.p) {
        throw UsageError("to_curve_table: identifier counts do not match the dataset");
    }
    CurveTable t;
    t.unit_ids = unit_ids;
    t.series_ids = predictor_names;
    t.grids = data.t_grids;
    t.values = data.functional;
    if (data.s_grid.size() > 0) {
        t.series_ids.push_back(response_series);
        t.grids.push_back(data.s_grid);
        t.values.push_back(data.responses);
    }
    return t;
}

ScalarTable to_scalar_table(const Dataset& data, const std::vector<std::string>& unit_ids,
                            const std::vector<std::string>& scalar_names) {
    if (static_cast<int>(unit_ids.size()) != data.n ||
        static_cast<int>(scalar_names.size()) != data.q) {
        throw UsageError("to_scalar_table: identifier counts do not match the dataset");
    }
    ScalarTable t;
    t.unit_ids = unit_ids;
    t.names = scalar_names;
    t.values = data.scalars;
    return t;
}

std::vector<std::string> default_unit_ids(int n) {
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = "unit_" + std::to_string(i + 1);
    return ids;
}

std::vector<std::string> default_predictor_names(int p) {
    std::vector<std::string> ids(p);
    for (int j = 0; j < p; ++j) ids[j] = "X" + std::to_string(j + 1);
    return ids;
}

std::vector<std::string> default_scalar_names(int q) {
    std::vector<std::string> ids(q);
    for (int k = 0; k < q; ++k) ids[k] = "Z" + std::to_string(k + 1);
    return ids;
}

namespace {

constexpr int kModelFormatVersion = 1;

json vec_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd json_vec(const json& a, const std::string& field) {
    if (!a.is_array()) throw DataError("model file: field '" + field + "' must be an array");
    Eigen::VectorXd v(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) {
            throw DataError("model file: field '" + field + "' has a non-numeric entry");
        }
        v[i] = a[i].get<double>();
    }
    return v;
}

json vecs_json(const std::vector<Eigen::VectorXd>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(vec_json(v));
    return a;
}

std::vector<Eigen::VectorXd> json_vecs(const json& a, const std::string& field) {
    if (!a.is_array()) throw DataError("model file: field '" + field + "' must be an array");
    std::vector<Eigen::VectorXd> vs;
    vs.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        vs.push_back(json_vec(a[i], field + "[" + std::to_string(i) + "]"));
    }
    return vs;
}

const json& require(const json& obj, const std::string& field, const std::string& what) {
    const auto it = obj.find(field);
    if (it == obj.end()) throw DataError(what + ": missing field '" + field + "'");
    return *it;
}

}  // namespace

void save_model(const std::string& path, const FrameModel& model) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["bases"] = {{"bt_dim", model.bases.bt_dim},
                    {"b1_dim", model.bases.b1_dim},
                    {"b2_dim", model.bases.b2_dim},
                    {"h_dim", model.bases.h_dim},
                    {"degree", model.bases.degree}};
    doc["penalty"] = {{"kind", model.penalty.name()}, {"a", model.penalty.a}};
    doc["lambda"] = model.lambda;
    doc["t_grids"] = vecs_json(model.t_grids);
    doc["s_grid"] = vec_json(model.s_grid);
    doc["centering"] = {{"predictor_means", vecs_json(model.centering.predictor_means)},
                        {"scalar_means", vec_json(model.centering.scalar_means)},
                        {"response_mean", vec_json(model.centering.response_mean)}};
    doc["eta"] = vecs_json(model.eta);
    doc["xi"] = vecs_json(model.xi);
    doc["alpha"] = vec_json(model.alpha);
    json ranges = json::array();
    for (const auto& r : model.h_ranges) ranges.push_back({r[0], r[1]});
    doc["h_ranges"] = ranges;
    doc["h_col_means"] = vecs_json(model.h_col_means);
    doc["omega_col_means"] = vec_json(model.omega_col_means);
    doc["active_functional"] = model.active_functional;
    doc["active_scalar"] = model.active_scalar;

    std::ofstream out = open_out(path);
    out << doc.dump(1) << '\n';
    if (!out) throw DataError("failed while writing '" + path + "'");
}

FrameModel load_model(const std::string& path) {
    std::ifstream in = open_in(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("model file '" + path + "': parse error: " + e.what());
    }
    const std::string what = "model file '" + path + "'";
    const json& ver = require(doc, "format_version", what);
    if (!ver.is_number_integer() || ver.get<int>() != kModelFormatVersion) {
        throw DataError(what + ": unsupported format_version (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    }
    FrameModel m;
    try {
        const json& b = require(doc, "bases", what);
        m.bases.bt_dim = require(b, "bt_dim", what).get<int>();
        m.bases.b1_dim = require(b, "b1_dim", what).get<int>();
        m.bases.b2_dim = require(b, "b2_dim", what).get<int>();
        m.bases.h_dim = require(b, "h_dim", what).get<int>();
        m.bases.degree = require(b, "degree", what).get<int>();
        const json& pen = require(doc, "penalty", what);
        m.penalty = PenaltySpec::parse(require(pen, "kind", what).get<std::string>());
        m.penalty.a = require(pen, "a", what).get<double>();
        m.lambda = require(doc, "lambda", what).get<double>();
        m.t_grids = json_vecs(require(doc, "t_grids", what), "t_grids");
        m.s_grid = json_vec(require(doc, "s_grid", what), "s_grid");
        const json& c = require(doc, "centering", what);
        m.centering.predictor_means =
            json_vecs(require(c, "predictor_means", what), "predictor_means");
        m.centering.scalar_means = json_vec(require(c, "scalar_means", what), "scalar_means");
        m.centering.response_mean = json_vec(require(c, "response_mean", what), "response_mean");
        m.eta = json_vecs(require(doc, "eta", what), "eta");
        m.xi = json_vecs(require(doc, "xi", what), "xi");
        m.alpha = json_vec(require(doc, "alpha", what), "alpha");
        for (const json& r : require(doc, "h_ranges", what)) {
            if (!r.is_array() || r.size() != 2) {
                throw DataError(what + ": h_ranges entries must be [lo, hi] pairs");
            }
            m.h_ranges.push_back({r[0].get<double>(), r[1].get<double>()});
        }
        m.h_col_means = json_vecs(require(doc, "h_col_means", what), "h_col_means");
        m.omega_col_means = json_vec(require(doc, "omega_col_means", what), "omega_col_means");
        m.active_functional = require(doc, "active_functional", what).get<std::vector<bool>>();
        m.active_scalar = require(doc, "active_scalar", what).get<std::vector<bool>>();
    } catch (const json::exception& e) {
        throw DataError(what + ": malformed field: " + e.what());
    }
    const size_t p = m.eta.size();
    if (m.t_grids.size() != p || m.xi.size() != p || m.h_ranges.size() != p ||
        m.h_col_means.size() != p || m.active_functional.size() != p ||
        m.centering.predictor_means.size() != p) {
        throw DataError(what + ": inconsistent functional predictor counts");
    }
    const size_t q = static_cast<size_t>(m.alpha.size());
    if (m.active_scalar.size() != q || static_cast<size_t>(m.omega_col_means.size()) != q ||
        static_cast<size_t>(m.centering.scalar_means.size()) != q) {
        throw DataError(what + ": inconsistent scalar predictor counts");
    }
    return m;
}

namespace {

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            throw UsageError("config: unknown key '" + key + "' in " + section);
        }
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config: malformed value for '") + key + "'");
    }
}

}  // namespace

RunConfig read_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in = open_in(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw UsageError("config '" + path + "': parse error: " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config '" + path + "': top level must be an object");
    reject_unknown(doc, "the top level",
                   {"sim", "paths", "basis", "penalty", "lambda", "cv", "solver", "replicates",
                    "seed", "jobs", "depplot"});

    if (doc.contains("sim")) {
        const json& s = doc["sim"];
        reject_unknown(s, "'sim'",
                       {"n", "n_test", "p", "q", "t_points", "s_points", "predictor_noise_sd",
                        "response_noise_sd", "theta_sd"});
        read_field(s, "n", cfg.sim.n);
        read_field(s, "n_test", cfg.sim.n_test);
        read_field(s, "p", cfg.sim.p);
        read_field(s, "q", cfg.sim.q);
        read_field(s, "t_points", cfg.sim.t_points);
        read_field(s, "s_points", cfg.sim.s_points);
        read_field(s, "predictor_noise_sd", cfg.sim.predictor_noise_sd);
        read_field(s, "response_noise_sd", cfg.sim.response_noise_sd);
        read_field(s, "theta_sd", cfg.sim.theta_sd);
    }
    if (doc.contains("paths")) {
        const json& p = doc["paths"];
        reject_unknown(p, "'paths'", {"train_curves", "train_scalars", "curves", "scalars",
                                      "model"});
        read_field(p, "train_curves", cfg.paths.train_curves);
        read_field(p, "train_scalars", cfg.paths.train_scalars);
        read_field(p, "curves", cfg.paths.curves);
        read_field(p, "scalars", cfg.paths.scalars);
        read_field(p, "model", cfg.paths.model);
    }
    if (doc.contains("basis")) {
        const json& b = doc["basis"];
        if (b.is_string()) {
            if (b.get<std::string>() != "cv") {
                throw UsageError("config: 'basis' must be \"cv\" or an object of dimensions");
            }
            cfg.cv_dims = true;
        } else {
            reject_unknown(b, "'basis'", {"bt_dim", "b1_dim", "b2_dim", "h_dim", "degree"});
            cfg.cv_dims = false;
            read_field(b, "bt_dim", cfg.bases.bt_dim);
            read_field(b, "b1_dim", cfg.bases.b1_dim);
            read_field(b, "b2_dim", cfg.bases.b2_dim);
            read_field(b, "h_dim", cfg.bases.h_dim);
            read_field(b, "degree", cfg.bases.degree);
        }
    }
    if (doc.contains("penalty")) {
        const json& p = doc["penalty"];
        if (p.is_string()) {
            cfg.penalty = PenaltySpec::parse(p.get<std::string>());
        } else {
            reject_unknown(p, "'penalty'", {"kind", "a"});
            cfg.penalty = PenaltySpec::parse(require(p, "kind", "config").get<std::string>());
            read_field(p, "a", cfg.penalty.a);
        }
    }
    if (doc.contains("lambda")) {
        const json& l = doc["lambda"];
        if (l.is_string()) {
            if (l.get<std::string>() != "cv") {
                throw UsageError("config: 'lambda' must be \"cv\" or a number");
            }
            cfg.cv_lambda = true;
        } else if (l.is_number()) {
            cfg.cv_lambda = false;
            cfg.lambda = l.get<double>();
            if (cfg.lambda < 0.0) throw UsageError("config: 'lambda' must be >= 0");
        } else {
            throw UsageError("config: 'lambda' must be \"cv\" or a number");
        }
    }
    if (doc.contains("cv")) {
        const json& c = doc["cv"];
        reject_unknown(c, "'cv'",
                       {"K", "bt_dims", "b1_dims", "b2_dims", "h_dims", "n_lambda",
                        "lambda_min_ratio", "predictor_dim_mode"});
        read_field(c, "K", cfg.cv.K);
        read_field(c, "bt_dims", cfg.cv.bt_dims);
        read_field(c, "b1_dims", cfg.cv.b1_dims);
        read_field(c, "b2_dims", cfg.cv.b2_dims);
        read_field(c, "h_dims", cfg.cv.h_dims);
        read_field(c, "n_lambda", cfg.cv.n_lambda);
        read_field(c, "lambda_min_ratio", cfg.cv.lambda_min_ratio);
        if (c.contains("predictor_dim_mode")) {
            const std::string mode = c["predictor_dim_mode"].get<std::string>();
            if (mode == "holdout") {
                cfg.cv.predictor_dim_mode = CvPlan::PredictorDimMode::holdout;
            } else if (mode == "joint_cv") {
                cfg.cv.predictor_dim_mode = CvPlan::PredictorDimMode::joint_cv;
            } else {
                throw UsageError("config: predictor_dim_mode must be holdout or joint_cv");
            }
        }
    }
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        reject_unknown(s, "'solver'", {"max_outer", "outer_tol", "max_sweeps", "sweep_tol"});
        read_field(s, "max_outer", cfg.options.max_outer);
        read_field(s, "outer_tol", cfg.options.outer_tol);
        read_field(s, "max_sweeps", cfg.options.max_sweeps);
        read_field(s, "sweep_tol", cfg.options.sweep_tol);
    }
    read_field(doc, "replicates", cfg.replicates);
    read_field(doc, "seed", cfg.seed);
    read_field(doc, "jobs", cfg.jobs);
    if (doc.contains("depplot")) {
        const json& d = doc["depplot"];
        reject_unknown(d, "'depplot'", {"predictor", "shapes"});
        read_field(d, "predictor", cfg.depplot.predictor);
        if (d.contains("shapes")) {
            if (!d["shapes"].is_array()) {
                throw UsageError("config: 'depplot.shapes' must be an array");
            }
            for (const json& s : d["shapes"]) {
                reject_unknown(s, "'depplot.shapes'",
                               {"kind", "start", "end", "points", "t_min", "t_max"});
                ShapeSpecConfig sc;
                read_field(s, "kind", sc.kind);
                read_field(s, "start", sc.start);
                read_field(s, "end", sc.end);
                read_field(s, "points", sc.points);
                read_field(s, "t_min", sc.t_min);
                read_field(s, "t_max", sc.t_max);
                cfg.depplot.shapes.push_back(sc);
            }
        }
    }
    return cfg;
}

}  // namespace frame
