#include "frame/basis.hpp"

#include <algorithm>
#include <cmath>

namespace frame {

SplineBasis SplineBasis::uniform(double a, double b, int dimension, int degree) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
        throw UsageError("SplineBasis: need finite a < b");
    }
    if (degree < 0) throw UsageError("SplineBasis: degree must be >= 0");
    if (degree > kMaxDegree) {
        throw UsageError("SplineBasis: degree must be <= " + std::to_string(kMaxDegree));
    }
    if (dimension < degree + 1) {
        throw UsageError("SplineBasis: dimension must be >= degree + 1, got " +
                         std::to_string(dimension));
    }
    SplineBasis basis;
    basis.a_ = a;
    basis.b_ = b;
    basis.degree_ = degree;
    basis.dim_ = dimension;
    const int interior = dimension - degree - 1;
    basis.knots_.reserve(dimension + degree + 1);
    for (int i = 0; i <= degree; ++i) basis.knots_.push_back(a);
    for (int i = 1; i <= interior; ++i) {
        basis.knots_.push_back(a + (b - a) * static_cast<double>(i) / (interior + 1));
    }
    for (int i = 0; i <= degree; ++i) basis.knots_.push_back(b);
    return basis;
}

std::vector<double> SplineBasis::breakpoints() const {
    std::vector<double> bp;
    bp.push_back(a_);
    for (int i = degree_ + 1; i < dim_; ++i) bp.push_back(knots_[i]);
    bp.push_back(b_);
    return bp;
}

int SplineBasis::find_span(double x) const {
    if (x >= b_) return dim_ - 1;
    if (x <= a_) return degree_;
    int lo = degree_, hi = dim_;  // knots_[lo] <= x < knots_[hi]
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (knots_[mid] <= x) lo = mid;
        else hi = mid;
    }
    return lo;
}

void SplineBasis::nonzero_basis(int span, double x, int deg, double* N) const {
    N[0] = 1.0;
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    for (int j = 1; j <= deg; ++j) {
        left[j] = x - knots_[span + 1 - j];
        right[j] = knots_[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[r + 1] + left[j - r];
            double temp = denom > 0.0 ? N[r] / denom : 0.0;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
}

int SplineBasis::eval_local(double x, double* N) const {
    if (!std::isfinite(x)) throw NumericError("SplineBasis::eval: non-finite argument");
    x = std::clamp(x, a_, b_);
    const int span = find_span(x);
    nonzero_basis(span, x, degree_, N);
    return span - degree_;
}

Eigen::VectorXd SplineBasis::eval(double x) const {
    double N[kMaxDegree + 1];
    const int first = eval_local(x, N);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int r = 0; r <= degree_; ++r) out[first + r] = N[r];
    return out;
}

int SplineBasis::eval_derivative_local(double x, double* dN) const {
    if (!std::isfinite(x)) throw NumericError("SplineBasis::eval_derivative: non-finite argument");
    x = std::clamp(x, a_, b_);
    const int span = find_span(x);
    const int first = span - degree_;
    if (degree_ == 0) {
        dN[0] = 0.0;
        return first;
    }
    // Degree-1 lower basis: Nlow[k] = N_{span-degree+1+k, degree-1}.
    double Nlow[kMaxDegree + 1];
    nonzero_basis(span, x, degree_ - 1, Nlow);
    for (int r = 0; r <= degree_; ++r) {
        const int i = first + r;
        double a1 = 0.0, a2 = 0.0;
        if (r >= 1) {
            double denom = knots_[i + degree_] - knots_[i];
            if (denom > 0.0) a1 = Nlow[r - 1] / denom;
        }
        if (r <= degree_ - 1) {
            double denom = knots_[i + degree_ + 1] - knots_[i + 1];
            if (denom > 0.0) a2 = Nlow[r] / denom;
        }
        dN[r] = degree_ * (a1 - a2);
    }
    return first;
}

Eigen::VectorXd SplineBasis::eval_derivative(double x) const {
    double dN[kMaxDegree + 1];
    const int first = eval_derivative_local(x, dN);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int r = 0; r <= degree_; ++r) out[first + r] = dN[r];
    return out;
}

Eigen::MatrixXd SplineBasis::design_matrix(const Eigen::VectorXd& xs) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(xs.size(), dim_);
    double N[kMaxDegree + 1];
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const int first = eval_local(xs[i], N);
        for (int r = 0; r <= degree_; ++r) out(i, first + r) = N[r];
    }
    return out;
}

Eigen::VectorXd SplineBasis::integrals() const {
    Eigen::VectorXd out(dim_);
    for (int i = 0; i < dim_; ++i) {
        out[i] = (knots_[i + degree_ + 1] - knots_[i]) / (degree_ + 1);
    }
    return out;
}

Eigen::MatrixXd CrossIntegralMatrix::at(Eigen::Index l) const {
    Eigen::MatrixXd M(d1() + d2(), dt());
    M.topRows(d1()) = b1_at_s.row(l).transpose() * tilde_integrals.transpose();
    M.bottomRows(d2()) = cross_tt;
    return M;
}

namespace {
// 4-point Gauss-Legendre on [-1, 1]; exact for polynomials of degree <= 7.
constexpr double kGlNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                  0.6521451548625461, 0.3478548451374538};
}  // namespace

CrossIntegralMatrix cross_integral(const SplineBasis& b_s, const SplineBasis& b_t,
                                   const SplineBasis& bt_tilde,
                                   const Eigen::VectorXd& s_grid) {
    if (b_t.lower() != bt_tilde.lower() || b_t.upper() != bt_tilde.upper()) {
        throw DataError("cross_integral: b_t and bt_tilde must share the t-domain");
    }
    CrossIntegralMatrix M;
    M.s_grid = s_grid;
    M.b1_at_s = b_s.design_matrix(s_grid);
    M.tilde_integrals = bt_tilde.integrals();

    // Merged breakpoints so the integrand is polynomial on every span.
    std::vector<double> bp = b_t.breakpoints();
    const std::vector<double> bp2 = bt_tilde.breakpoints();
    bp.insert(bp.end(), bp2.begin(), bp2.end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(b_t.dimension(), bt_tilde.dimension());
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        const double mid = 0.5 * (bp[k] + bp[k + 1]);
        const double half = 0.5 * (bp[k + 1] - bp[k]);
        if (half <= 0.0) continue;
        for (int g = 0; g < 4; ++g) {
            const double x = mid + half * kGlNodes[g];
            G.noalias() += (half * kGlWeights[g]) * (b_t.eval(x) * bt_tilde.eval(x).transpose());
        }
    }
    M.cross_tt = G;
    if (!M.cross_tt.allFinite() || !M.b1_at_s.allFinite()) {
        throw NumericError("cross_integral: non-finite entries");
    }
    return M;
}

}  // namespace frame
