#pragma once

#include <Eigen/Dense>

namespace casbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

// Module tolerances. Every function takes them as a defaulted argument so
// callers can override per call.
struct Tolerances {
    double eig_floor = 1e-12;
    double symmetry = 1e-12;
};

inline constexpr Tolerances kDefaults{};

// Throws InvalidInput when |m(i,j) - m(j,i)| > tol * (1 + |m(i,j)|) for some (i, j).
void check_symmetric(const Matrix& m, const Tolerances& tol = kDefaults);

// Symmetric eigendecomposition m = V diag(values) V^T, values ascending.
struct SymEigen {
    Vector values;
    Matrix vectors;

    // V diag(fn(values)) V^T, symmetrized.
    template <typename Fn>
    Matrix rebuild(Fn&& fn) const
    {
        Vector mapped = values.unaryExpr(fn);
        Matrix out = vectors * mapped.asDiagonal() * vectors.transpose();
        return 0.5 * (out + out.transpose());
    }
};

SymEigen sym_eigen(const Matrix& m, const Tolerances& tol = kDefaults);

/// Symmetric square root. Eigenvalues below the floor are raised to it first.
Matrix sym_sqrt(const Matrix& m, const Tolerances& tol = kDefaults);

/// Inverse via the eigendecomposition. Throws Singular if lambda_min < eig_floor.
Matrix sym_inv(const Matrix& m, const Tolerances& tol = kDefaults);

/// Same eigenvectors, eigenvalues clamped into [lo, hi].
Matrix eig_clamp(const Matrix& m, double lo, double hi, const Tolerances& tol = kDefaults);

double min_eigenvalue(const Matrix& m, const Tolerances& tol = kDefaults);
double max_eigenvalue(const Matrix& m, const Tolerances& tol = kDefaults);

/// ||a - b||_F / max(||b||_F, tiny).
double rel_frobenius(const Matrix& a, const Matrix& b);

}  // namespace linalg
}  // namespace casbo
