#pragma once

#include <string>
#include <vector>

#include "frame/curves.hpp"
#include "frame/evalsim.hpp"
#include "frame/penalty.hpp"
#include "frame/solver.hpp"
#include "frame/tuning.hpp"

namespace frame {

/// Long-format curve file: header unit_id,series_id,t,value. Units and series
/// keep first-appearance order; within one series every unit must be observed
/// on the identical grid.
struct CurveTable {
    std::vector<std::string> unit_ids;
    std::vector<std::string> series_ids;
    std::vector<Eigen::VectorXd> grids;    // one per series
    std::vector<Eigen::MatrixXd> values;   // one per series, units x grid

    int find_series(const std::string& id) const;  // -1 when absent
};

CurveTable read_curve_table(const std::string& path);
void write_curve_table(const std::string& path, const CurveTable& table);

/// Long-format scalar file: header unit_id,name,value.
struct ScalarTable {
    std::vector<std::string> unit_ids;
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // units x names

    static ScalarTable empty(std::vector<std::string> unit_ids);
};

ScalarTable read_scalar_table(const std::string& path);
void write_scalar_table(const std::string& path, const ScalarTable& table);

/// A dataset plus the identifiers it was read with.
struct NamedDataset {
    Dataset data;
    std::vector<std::string> unit_ids;
    std::vector<std::string> predictor_names;
    std::vector<std::string> scalar_names;
};

/// Assembles a dataset from the two tables. The series named `response_series`
/// becomes the response; every other series a functional predictor. Scalars
/// are reordered to the curve file's unit order. Set require_response = false
/// for prediction inputs without observed responses (the response grid is then
/// empty and responses are n x 0).
NamedDataset make_dataset(const CurveTable& curves, const ScalarTable* scalars,
                          const std::string& response_series = "response",
                          bool require_response = true);

CurveTable to_curve_table(const Dataset& data, const std::vector<std::string>& unit_ids,
                          const std::vector<std::string>& predictor_names,
                          const std::string& response_series = "response");
ScalarTable to_scalar_table(const Dataset& data, const std::vector<std::string>& unit_ids,
                            const std::vector<std::string>& scalar_names);

/// Default identifiers: unit_1..unit_n, X1..Xp, Z1..Zq.
std::vector<std::string> default_unit_ids(int n);
std::vector<std::string> default_predictor_names(int p);
std::vector<std::string> default_scalar_names(int q);

/// Versioned structured-text model document, full numeric precision.
void save_model(const std::string& path, const FrameModel& model);
FrameModel load_model(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_value(double v);

/// Shape request inside a config file.
struct ShapeSpecConfig {
    std::string kind = "linear";
    double start = 0.0;
    double end = 100.0;
    int points = 101;
    double t_min = 0.0;
    double t_max = 1.0;
};

struct DepplotConfig {
    int predictor = 0;
    std::vector<ShapeSpecConfig> shapes;
};

/// Everything a command can be configured with. Unknown keys in the file are
/// rejected; command-line flags override individual fields afterwards.
struct RunConfig {
    SimConfig sim;

    struct Paths {
        std::string train_curves;
        std::string train_scalars;
        std::string curves;   // prediction / depplot input
        std::string scalars;
        std::string model;
    } paths;

    bool cv_dims = true;     // "basis": "cv" or explicit dims
    BasisConfig bases;

    PenaltySpec penalty = PenaltySpec::identity();
    bool cv_lambda = true;   // "lambda": "cv" or a number
    double lambda = 0.0;

    CvPlan cv;
    SolverOptions options;

    int replicates = 20;
    unsigned long long seed = 1;
    int jobs = 0;            // 0 = all logical cores

    DepplotConfig depplot;
};

/// Reads a JSON config file; an empty path yields all defaults. Throws
/// UsageError on unknown keys or malformed values.
RunConfig read_config(const std::string& path);

}  // namespace frame
