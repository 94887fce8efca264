#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace casbo::linalg {

void check_symmetric(const Matrix& m, const Tolerances& tol)
{
    require(m.rows() == m.cols() && m.rows() > 0, "matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (!std::isfinite(a) || !std::isfinite(b))
                fail(ErrorCode::Numeric, "matrix has non-finite entries");
            if (std::abs(a - b) > tol.symmetry * (1.0 + std::abs(a))) {
                std::ostringstream os;
                os << "matrix is not symmetric at (" << i << ", " << j << "): " << a << " vs " << b;
                fail(ErrorCode::InvalidInput, os.str());
            }
        }
    }
}

SymEigen sym_eigen(const Matrix& m, const Tolerances& tol)
{
    check_symmetric(m, tol);
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        fail(ErrorCode::Numeric, "symmetric eigendecomposition did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix sym_sqrt(const Matrix& m, const Tolerances& tol)
{
    const double floor = tol.eig_floor;
    return sym_eigen(m, tol).rebuild([floor](double v) { return std::sqrt(std::max(v, floor)); });
}

Matrix sym_inv(const Matrix& m, const Tolerances& tol)
{
    const SymEigen eig = sym_eigen(m, tol);
    if (eig.values(0) < tol.eig_floor) {
        std::ostringstream os;
        os << "matrix is singular: smallest eigenvalue " << eig.values(0) << " < " << tol.eig_floor;
        fail(ErrorCode::Singular, os.str());
    }
    return eig.rebuild([](double v) { return 1.0 / v; });
}

Matrix eig_clamp(const Matrix& m, double lo, double hi, const Tolerances& tol)
{
    require(lo <= hi, "eig_clamp: lower bound exceeds upper bound");
    return sym_eigen(m, tol).rebuild([lo, hi](double v) { return std::clamp(v, lo, hi); });
}

namespace {

Vector eigenvalues_only(const Matrix& m, const Tolerances& tol)
{
    check_symmetric(m, tol);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        fail(ErrorCode::Numeric, "symmetric eigendecomposition did not converge");
    return solver.eigenvalues();
}

}  // namespace

double min_eigenvalue(const Matrix& m, const Tolerances& tol) { return eigenvalues_only(m, tol)(0); }

double max_eigenvalue(const Matrix& m, const Tolerances& tol)
{
    const Vector v = eigenvalues_only(m, tol);
    return v(v.size() - 1);
}

double rel_frobenius(const Matrix& a, const Matrix& b)
{
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace casbo::linalg
