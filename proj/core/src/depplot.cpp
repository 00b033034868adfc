#include "frame/depplot.hpp"

#include <cmath>

namespace frame {

ShapeSpec::Kind ShapeSpec::parse_kind(const std::string& name) {
    if (name == "linear") return Kind::linear;
    if (name == "logarithmic") return Kind::logarithmic;
    if (name == "exponential") return Kind::exponential;
    if (name == "s_shape") return Kind::s_shape;
    if (name == "inverse_s") return Kind::inverse_s;
    if (name == "converging_family") return Kind::converging_family;
    if (name == "diverging_family") return Kind::diverging_family;
    throw UsageError("unknown shape kind '" + name +
                     "' (valid: linear, logarithmic, exponential, s_shape, inverse_s, "
                     "converging_family, diverging_family)");
}

std::string ShapeSpec::kind_name(Kind kind) {
    switch (kind) {
        case Kind::linear: return "linear";
        case Kind::logarithmic: return "logarithmic";
        case Kind::exponential: return "exponential";
        case Kind::s_shape: return "s_shape";
        case Kind::inverse_s: return "inverse_s";
        case Kind::converging_family: return "converging_family";
        case Kind::diverging_family: return "diverging_family";
    }
    throw UsageError("unknown shape kind");
}

namespace {

constexpr double kLogisticSteepness = 10.0;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Logistic on [0, 1] rescaled so the endpoints are exactly 0 and 1.
double unit_s(double tau) {
    const double lo = logistic(-0.5 * kLogisticSteepness);
    const double hi = logistic(0.5 * kLogisticSteepness);
    return (logistic(kLogisticSteepness * (tau - 0.5)) - lo) / (hi - lo);
}

// Inverse of unit_s, also an exact [0, 1] bijection. Steep at the ends.
double unit_inverse_s(double tau) {
    const double lo = logistic(-0.5 * kLogisticSteepness);
    const double hi = logistic(0.5 * kLogisticSteepness);
    const double y = lo + tau * (hi - lo);
    return 0.5 + std::log(y / (1.0 - y)) / kLogisticSteepness;
}

double unit_shape(ShapeSpec::Kind kind, double tau) {
    switch (kind) {
        case ShapeSpec::Kind::linear: return tau;
        case ShapeSpec::Kind::logarithmic: return std::log(1.0 + 9.0 * tau) / std::log(10.0);
        case ShapeSpec::Kind::exponential: return (std::pow(10.0, tau) - 1.0) / 9.0;
        case ShapeSpec::Kind::s_shape: return unit_s(tau);
        case ShapeSpec::Kind::inverse_s: return unit_inverse_s(tau);
        default: throw UsageError("unit_shape: family kinds are handled separately");
    }
}

}  // namespace

std::vector<NamedCurve> make_shapes(const ShapeSpec& spec) {
    validate_curve(spec.grid, Eigen::VectorXd::Zero(spec.grid.size()), "shape grid");
    if (spec.grid.size() < 2) throw UsageError("make_shapes: need at least 2 grid points");
    const bool family = spec.kind == ShapeSpec::Kind::converging_family ||
                        spec.kind == ShapeSpec::Kind::diverging_family;
    if (!family && spec.start == spec.end) {
        throw UsageError("make_shapes: start and end must differ for monotone kinds");
    }
    const double t0 = spec.grid[0];
    const double span = spec.grid[spec.grid.size() - 1] - t0;
    const double range = spec.end - spec.start;

    std::vector<NamedCurve> out;
    const std::string base = ShapeSpec::kind_name(spec.kind);
    if (!family) {
        NamedCurve nc;
        nc.id = base;
        nc.curve.grid = spec.grid;
        nc.curve.values.resize(spec.grid.size());
        for (Eigen::Index m = 0; m < spec.grid.size(); ++m) {
            const double tau = (spec.grid[m] - t0) / span;
            nc.curve.values[m] = spec.start + range * unit_shape(spec.kind, tau);
        }
        out.push_back(std::move(nc));
        return out;
    }

    const double slopes[] = {0.5, 1.0, 1.5};
    for (double r : slopes) {
        NamedCurve nc;
        nc.id = base + "_" + (r == 0.5 ? "slow" : r == 1.0 ? "base" : "fast");
        nc.curve.grid = spec.grid;
        nc.curve.values.resize(spec.grid.size());
        for (Eigen::Index m = 0; m < spec.grid.size(); ++m) {
            const double tau = (spec.grid[m] - t0) / span;
            nc.curve.values[m] = spec.kind == ShapeSpec::Kind::diverging_family
                                     ? spec.start + r * range * tau
                                     : spec.end - r * range * (1.0 - tau);
        }
        out.push_back(std::move(nc));
    }
    return out;
}

namespace {

double interp_linear(const SampledCurve& c, double t) {
    const Eigen::Index m = c.grid.size();
    if (t < c.grid[0] || t > c.grid[m - 1]) {
        throw DataError("dependence_table: shape does not cover the training window");
    }
    Eigen::Index hi = 1;
    while (hi < m - 1 && c.grid[hi] < t) ++hi;
    const double w = (t - c.grid[hi - 1]) / (c.grid[hi] - c.grid[hi - 1]);
    return (1.0 - w) * c.values[hi - 1] + w * c.values[hi];
}

}  // namespace

std::vector<DependencePair> dependence_table(const FrameModel& model, int predictor,
                                             const std::vector<NamedCurve>& shapes) {
    if (model.p() == 0) throw DataError("dependence_table: model has no functional predictors");
    if (predictor < 0 || predictor >= model.p()) {
        throw DataError("dependence_table: predictor index " + std::to_string(predictor) +
                        " out of range [0, " + std::to_string(model.p()) + ")");
    }
    std::vector<DependencePair> out;
    out.reserve(shapes.size());
    const Eigen::VectorXd& t_grid = model.t_grids[predictor];
    for (const NamedCurve& shape : shapes) {
        std::vector<SampledCurve> curves(model.p());
        for (int j = 0; j < model.p(); ++j) {
            curves[j].grid = model.t_grids[j];
            curves[j].values = model.centering.predictor_means[j];
        }
        curves[predictor].values.resize(t_grid.size());
        for (Eigen::Index m = 0; m < t_grid.size(); ++m) {
            curves[predictor].values[m] = interp_linear(shape.curve, t_grid[m]);
        }
        DependencePair pair;
        pair.shape_id = shape.id;
        pair.input = curves[predictor];
        pair.output = predict(model, curves, model.centering.scalar_means);
        out.push_back(std::move(pair));
    }
    return out;
}

}  // namespace frame
