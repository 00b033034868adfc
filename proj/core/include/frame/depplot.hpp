#pragma once

#include <string>
#include <vector>

#include "frame/curves.hpp"
#include "frame/solver.hpp"

namespace frame {

/// Idealized input curves for dependence plots. Single kinds produce one
/// curve from start to end; the family kinds produce three lines with slope
/// multipliers 0.5, 1.0 and 1.5 sharing one endpoint.
struct ShapeSpec {
    enum class Kind {
        linear,
        logarithmic,
        exponential,
        s_shape,
        inverse_s,
        converging_family,
        diverging_family,
    };

    Kind kind = Kind::linear;
    double start = 0.0;
    double end = 100.0;
    Eigen::VectorXd grid;

    static Kind parse_kind(const std::string& name);
    static std::string kind_name(Kind kind);
};

struct NamedCurve {
    std::string id;
    SampledCurve curve;
};

/// Builds the curves for one spec. Monotone kinds hit start and end exactly;
/// families share the exact common endpoint and fan out (or in) around the
/// base line.
std::vector<NamedCurve> make_shapes(const ShapeSpec& spec);

struct DependencePair {
    std::string shape_id;
    SampledCurve input;   // on the model's training t-grid
    SampledCurve output;  // on the model's response s-grid
};

/// Feeds each shape through the fitted model as functional predictor j,
/// holding every other predictor at its training mean. Shapes are linearly
/// interpolated onto the training t-grid, so any part of a shape outside
/// that window is ignored; the shape must cover the window.
std::vector<DependencePair> dependence_table(const FrameModel& model, int predictor,
                                             const std::vector<NamedCurve>& shapes);

}  // namespace frame
