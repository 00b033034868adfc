#include "frame/curves.hpp"

#include <cmath>

namespace frame {

SampledCurve::SampledCurve(Eigen::VectorXd g, Eigen::VectorXd v)
    : grid(std::move(g)), values(std::move(v)) {
    validate_curve(grid, values, "curve");
}

void validate_curve(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                    const std::string& what) {
    if (grid.size() != values.size()) {
        throw DataError(what + ": grid length " + std::to_string(grid.size()) +
                        " != values length " + std::to_string(values.size()));
    }
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(values[i])) {
            throw DataError(what + ": non-finite entry at position " + std::to_string(i));
        }
        if (i > 0 && grid[i] <= grid[i - 1]) {
            throw DataError(what + ": grid not strictly increasing at position " +
                            std::to_string(i));
        }
    }
}

void Dataset::validate() const {
    if (n < 2) throw DataError("dataset: need n >= 2 units, got " + std::to_string(n));
    if (p < 0 || q < 0 || p + q < 1) {
        throw DataError("dataset: need p >= 0, q >= 0 and p + q >= 1");
    }
    if (static_cast<int>(t_grids.size()) != p || static_cast<int>(functional.size()) != p) {
        throw DataError("dataset: expected " + std::to_string(p) + " functional predictors");
    }
    for (int j = 0; j < p; ++j) {
        const auto& g = t_grids[j];
        validate_curve(g, Eigen::VectorXd::Zero(g.size()), "t-grid of predictor " + std::to_string(j));
        if (functional[j].rows() != n || functional[j].cols() != g.size()) {
            throw DataError("predictor " + std::to_string(j) + ": values are " +
                            std::to_string(functional[j].rows()) + "x" +
                            std::to_string(functional[j].cols()) + ", expected " +
                            std::to_string(n) + "x" + std::to_string(g.size()));
        }
        if (!functional[j].allFinite()) {
            throw DataError("predictor " + std::to_string(j) + ": non-finite values");
        }
    }
    if (scalars.rows() != n || scalars.cols() != q) {
        throw DataError("dataset: scalar matrix must be n x q");
    }
    if (!scalars.allFinite()) throw DataError("dataset: non-finite scalar values");
    validate_curve(s_grid, Eigen::VectorXd::Zero(s_grid.size()), "response s-grid");
    if (responses.rows() != n || responses.cols() != s_grid.size()) {
        throw DataError("dataset: response matrix must be n x L");
    }
    if (!responses.allFinite()) throw DataError("dataset: non-finite response values");
}

Dataset center(const Dataset& raw) {
    raw.validate();
    Dataset out = raw;
    Centering c;
    c.predictor_means.resize(raw.p);
    for (int j = 0; j < raw.p; ++j) {
        Eigen::VectorXd mean = raw.functional[j].colwise().mean();
        out.functional[j] = raw.functional[j].rowwise() - mean.transpose();
        c.predictor_means[j] = mean;
    }
    c.scalar_means = raw.scalars.colwise().mean();
    out.scalars = raw.scalars.rowwise() - c.scalar_means.transpose();
    c.response_mean = raw.responses.colwise().mean();
    out.responses = raw.responses.rowwise() - c.response_mean.transpose();

    if (raw.centering) {
        // Compose with the previous centering so uncentering still recovers raw data.
        for (int j = 0; j < raw.p; ++j) c.predictor_means[j] += raw.centering->predictor_means[j];
        c.scalar_means += raw.centering->scalar_means;
        c.response_mean += raw.centering->response_mean;
    }
    out.centering = std::move(c);
    return out;
}

SampledCurve uncenter_prediction(const SampledCurve& yhat_centered,
                                 const Centering& centering,
                                 const Eigen::VectorXd& s_grid) {
    if (yhat_centered.grid.size() != s_grid.size() ||
        (yhat_centered.grid - s_grid).cwiseAbs().maxCoeff() > 0.0) {
        throw DataError("uncenter_prediction: grid does not match the stored response grid");
    }
    SampledCurve out;
    out.grid = yhat_centered.grid;
    out.values = yhat_centered.values + centering.response_mean;
    return out;
}

Dataset uncenter_dataset(const Dataset& data) {
    if (!data.centering) return data;
    Dataset out = data;
    const Centering& c = *data.centering;
    for (int j = 0; j < data.p; ++j) {
        out.functional[j] = data.functional[j].rowwise() + c.predictor_means[j].transpose();
    }
    out.scalars = data.scalars.rowwise() + c.scalar_means.transpose();
    out.responses = data.responses.rowwise() + c.response_mean.transpose();
    out.centering.reset();
    return out;
}

Dataset subset_units(const Dataset& data, const std::vector<int>& units) {
    Dataset out;
    out.n = static_cast<int>(units.size());
    out.p = data.p;
    out.q = data.q;
    out.t_grids = data.t_grids;
    out.s_grid = data.s_grid;
    out.functional.resize(data.p);
    for (int j = 0; j < data.p; ++j) {
        out.functional[j].resize(out.n, data.functional[j].cols());
        for (int r = 0; r < out.n; ++r) out.functional[j].row(r) = data.functional[j].row(units[r]);
    }
    out.scalars.resize(out.n, data.q);
    out.responses.resize(out.n, data.s_grid.size());
    for (int r = 0; r < out.n; ++r) {
        out.scalars.row(r) = data.scalars.row(units[r]);
        out.responses.row(r) = data.responses.row(units[r]);
    }
    out.centering = data.centering;
    return out;
}

}  // namespace frame
