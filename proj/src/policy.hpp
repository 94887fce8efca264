#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace casbo {

// One step of the search distribution N(mu_k, Sigma_k). The precision matrix
// is the stored state; covariance and both square roots are caches rebuilt
// from a single eigendecomposition whenever the precision changes.
class GaussianStep {
public:
    GaussianStep(Vector mean, const Matrix& precision,
                 const linalg::Tolerances& tol = linalg::kDefaults);

    static GaussianStep from_covariance(Vector mean, const Matrix& cov,
                                        const linalg::Tolerances& tol = linalg::kDefaults);

    Eigen::Index dim() const { return mean_.size(); }

    const Vector& mean() const { return mean_; }
    const Matrix& precision() const { return precision_; }
    const Matrix& covariance() const { return cov_; }
    // Sigma^{1/2}
    const Matrix& cov_sqrt() const { return cov_sqrt_; }
    // Sigma^{-1/2}
    const Matrix& precision_sqrt() const { return precision_sqrt_; }

    double min_cov_eigenvalue() const { return 1.0 / precision_eigenvalues_.maxCoeff(); }
    double max_cov_eigenvalue() const { return 1.0 / precision_eigenvalues_.minCoeff(); }

    void set_mean(Vector mean);

    // Eigenvalues are clamped into [eig_floor, 1/eig_floor] so that the
    // precision and the covariance both stay above the floor.
    void set_precision(const Matrix& precision);

private:
    Vector mean_;
    Matrix precision_;
    Matrix cov_;
    Matrix cov_sqrt_;
    Matrix precision_sqrt_;
    Vector precision_eigenvalues_;
    linalg::Tolerances tol_;
};

struct PolicyChain {
    std::vector<GaussianStep> steps;

    int K() const { return static_cast<int>(steps.size()); }
    int dim() const { return steps.empty() ? 0 : static_cast<int>(steps.front().dim()); }
};

PolicyChain init_chain(int K, int d, double tau);

// z(k) and x(k) are d x N; column j is sample j. Each x column is computed
// once from the z column that produced it and stored.
struct TrajectoryBatch {
    std::vector<Matrix> z;
    std::vector<Matrix> x;

    int K() const { return static_cast<int>(z.size()); }
    int N() const { return z.empty() ? 0 : static_cast<int>(z.front().cols()); }
    int dim() const { return z.empty() ? 0 : static_cast<int>(z.front().rows()); }

    // Candidate trajectory j as a d x K matrix (column k = x_k^j).
    Matrix trajectory(int j) const;
};

TrajectoryBatch sample_batch(const PolicyChain& chain, int N, Rng& rng);

/// Per-step means as a d x K matrix (column k = mu_k).
Matrix mean_trajectory(const PolicyChain& chain);

// Text snapshot: one line per step, "k mu_1..mu_d S_11 S_12 .. S_dd" with the
// covariance row-major and k starting at 1.
void write_snapshot(std::ostream& os, const PolicyChain& chain);
PolicyChain read_snapshot(std::istream& is);

void save_snapshot(const std::string& path, const PolicyChain& chain);
PolicyChain load_snapshot(const std::string& path);

}  // namespace casbo
