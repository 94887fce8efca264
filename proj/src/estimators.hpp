#pragma once

#include <span>
#include <vector>

#include "linalg.hpp"
#include "policy.hpp"

namespace casbo {

// Step indices in this module are 0-based: row k of a K x N score matrix holds
// the scores of step k + 1.

struct NormalizedRow {
    Vector h;
    double kappa = 0.0;
    bool degenerate = false;
};

struct ScoreTable {
    Matrix raw;
    Matrix cumulative;
    Matrix normalized;
    Vector kappa;
    std::vector<bool> degenerate;
};

/// Suffix sums down each column: out(k, j) = sum_{i >= k} raw(i, j).
/// Throws InvalidScore naming (k, j) for non-finite input.
Matrix cumulative_scores(const Matrix& raw);

/// 1e-12 * (1 + |max(s)|).
double default_score_eps(const Vector& s_row);

/// Min-max normalization of one row into [0, 1]. Rows whose spread is below
/// score_eps are degenerate: h = 0 and kappa = 0.
NormalizedRow normalize_scores(const Vector& s_row, double score_eps);
NormalizedRow normalize_scores(const Vector& s_row);

ScoreTable build_score_table(const Matrix& raw);

/// H = (1/N) sum_j h_j z_j z_j^T for the d x N draws of one step.
Matrix build_H(const Matrix& z_k, const Vector& h);

/// g_ik = (1/N) sum_j Sigma_k^{-1/2} z_k^j (raw(i, j) - baseline(i)), for k <= i.
Vector grad_estimator_mu(const PolicyChain& chain, const TrajectoryBatch& batch, const Matrix& raw,
                         const Vector& baseline, int i, int k);

Vector sum_grad_for_step(std::span<const Vector> terms);

// Unnormalized Monte-Carlo updates driven by cumulative scores s_k^j:
//   mu'  = mu - (beta/N) sum_j (x_j - mu) s_j
//   P'   = P + (beta/N) sum_j (P (x_j - mu)(x_j - mu)^T P - P) s_j
// The normalized updates used by the optimizers replace s with h(s).
Vector mc_mean_update(const Vector& mean, const Matrix& x_k, const Vector& s_k, double beta);
Matrix mc_precision_update(const Matrix& precision, const Vector& mean, const Matrix& x_k, const Vector& s_k,
                           double beta);

}  // namespace casbo
