#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frame/errors.hpp"

namespace frame {

/// Clamped B-spline basis with equally spaced interior knots on [a, b].
/// dimension = interior_knots + degree + 1. The basis functions are
/// nonnegative and form a partition of unity on [a, b]. Evaluation outside
/// [a, b] clamps the argument to the boundary.
class SplineBasis {
public:
    SplineBasis() = default;

    /// Builds a basis of the given dimension (>= degree + 1).
    static SplineBasis uniform(double a, double b, int dimension, int degree = 3);

    int dimension() const { return dim_; }
    int degree() const { return degree_; }
    double lower() const { return a_; }
    double upper() const { return b_; }
    const std::vector<double>& knots() const { return knots_; }

    /// Knot breakpoints a = x_0 < x_1 < ... < x_m+1 = b delimiting the spans.
    std::vector<double> breakpoints() const;

    /// Basis values at x (clamped to [a, b]). Length = dimension().
    Eigen::VectorXd eval(double x) const;

    /// First derivatives of the basis functions at x (clamped to [a, b]).
    Eigen::VectorXd eval_derivative(double x) const;

    /// Maximum degree accepted by uniform(); keeps local evaluation on the
    /// stack in the hot loops.
    static constexpr int kMaxDegree = 30;

    /// Allocation-free evaluation: writes the degree()+1 nonzero basis values
    /// at x into N and returns the index of the first nonzero function.
    int eval_local(double x, double* N) const;

    /// Same for the first derivatives.
    int eval_derivative_local(double x, double* dN) const;

    /// Rows are eval(xs[i]); shape len(xs) x dimension().
    Eigen::MatrixXd design_matrix(const Eigen::VectorXd& xs) const;

    /// Integrals of each basis function over [a, b] (closed form).
    Eigen::VectorXd integrals() const;

private:
    double a_ = 0.0;
    double b_ = 1.0;
    int degree_ = 3;
    int dim_ = 4;
    std::vector<double> knots_;

    int find_span(double x) const;
    // Nonzero basis functions of degree `deg` at x in the given span, written
    // into N (deg + 1 values).
    void nonzero_basis(int span, double x, int deg, double* N) const;
};

/// M(s_l) = integral of b(s_l, t) btilde(t)^T dt for the additive index
/// surface basis b(s, t) = concat(b1(s), b2(t)). The first d1 rows factor as
/// b1(s_l) * v^T with v = integral of btilde; the last d2 rows are the
/// s-independent cross-product matrix G = integral of b2(t) btilde(t)^T dt.
struct CrossIntegralMatrix {
    Eigen::VectorXd s_grid;          // L
    Eigen::MatrixXd b1_at_s;         // L x d1
    Eigen::VectorXd tilde_integrals; // d_t, v above
    Eigen::MatrixXd cross_tt;        // d2 x d_t, G above

    Eigen::Index d1() const { return b1_at_s.cols(); }
    Eigen::Index d2() const { return cross_tt.rows(); }
    Eigen::Index dt() const { return tilde_integrals.size(); }

    /// Materializes M(s_l) as a (d1 + d2) x d_t matrix.
    Eigen::MatrixXd at(Eigen::Index l) const;
};

/// Computes the cross-basis integral matrix of the additive index surface.
/// b_t and bt_tilde must share the t-domain. Per-span Gauss-Legendre
/// quadrature with 4 nodes, exact for products of cubics up to rounding.
CrossIntegralMatrix cross_integral(const SplineBasis& b_s, const SplineBasis& b_t,
                                   const SplineBasis& bt_tilde,
                                   const Eigen::VectorXd& s_grid);

}  // namespace frame
