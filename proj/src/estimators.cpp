#include "estimators.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace casbo {

Matrix cumulative_scores(const Matrix& raw)
{
    const Eigen::Index K = raw.rows();
    Matrix out(K, raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        double running = 0.0;
        for (Eigen::Index k = K - 1; k >= 0; --k) {
            const double v = raw(k, j);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "non-finite score " << v << " at step " << k << ", sample " << j;
                fail(ErrorCode::InvalidScore, os.str());
            }
            running += v;
            out(k, j) = running;
        }
    }
    return out;
}

double default_score_eps(const Vector& s_row) { return 1e-12 * (1.0 + std::abs(s_row.maxCoeff())); }

NormalizedRow normalize_scores(const Vector& s_row, double score_eps)
{
    require(s_row.size() >= 2, "normalization needs at least two scores");
    const double lo = s_row.minCoeff();
    const double hi = s_row.maxCoeff();
    const double spread = hi - lo;

    NormalizedRow row;
    if (!(spread >= score_eps)) {
        row.h = Vector::Zero(s_row.size());
        row.degenerate = true;
        return row;
    }
    row.h = (s_row.array() - lo) / spread;
    row.kappa = row.h.mean();
    return row;
}

NormalizedRow normalize_scores(const Vector& s_row)
{
    require(s_row.size() >= 2, "normalization needs at least two scores");
    return normalize_scores(s_row, default_score_eps(s_row));
}

ScoreTable build_score_table(const Matrix& raw)
{
    ScoreTable table;
    table.raw = raw;
    table.cumulative = cumulative_scores(raw);
    table.normalized.resize(raw.rows(), raw.cols());
    table.kappa.resize(raw.rows());
    table.degenerate.resize(raw.rows());
    for (Eigen::Index k = 0; k < raw.rows(); ++k) {
        NormalizedRow row = normalize_scores(table.cumulative.row(k).transpose());
        table.normalized.row(k) = row.h.transpose();
        table.kappa(k) = row.kappa;
        table.degenerate[k] = row.degenerate;
    }
    return table;
}

Matrix build_H(const Matrix& z_k, const Vector& h)
{
    require(z_k.cols() == h.size() && h.size() > 0, "build_H: draw count does not match weights");
    require((h.array() >= 0.0).all() && (h.array() <= 1.0).all(), "build_H: weights must lie in [0, 1]");
    const Matrix weighted = z_k * h.asDiagonal();
    Matrix out = weighted * z_k.transpose() / static_cast<double>(h.size());
    return 0.5 * (out + out.transpose());
}

Vector grad_estimator_mu(const PolicyChain& chain, const TrajectoryBatch& batch, const Matrix& raw,
                         const Vector& baseline, int i, int k)
{
    require(k >= 0 && i < chain.K(), "estimator step index out of range");
    require(k <= i, "estimator needs k <= i");
    require(batch.K() == chain.K() && raw.rows() == chain.K() && raw.cols() == batch.N(),
            "estimator: score matrix does not match batch");
    require(baseline.size() == chain.K(), "estimator: baseline needs one entry per step");

    const Vector diff = (raw.row(i).transpose().array() - baseline(i)).matrix();
    const Vector zf = batch.z[k] * diff / static_cast<double>(batch.N());
    return chain.steps[k].precision_sqrt() * zf;
}

Vector sum_grad_for_step(std::span<const Vector> terms)
{
    require(!terms.empty(), "no gradient terms to sum");
    Vector sum = terms.front();
    for (std::size_t t = 1; t < terms.size(); ++t) {
        require(terms[t].size() == sum.size(), "gradient terms differ in length");
        sum += terms[t];
    }
    return sum;
}

Vector mc_mean_update(const Vector& mean, const Matrix& x_k, const Vector& s_k, double beta)
{
    require(x_k.rows() == mean.size() && x_k.cols() == s_k.size(), "mc_mean_update: shape mismatch");
    const Matrix centered = x_k.colwise() - mean;
    return mean - beta / static_cast<double>(s_k.size()) * (centered * s_k);
}

Matrix mc_precision_update(const Matrix& precision, const Vector& mean, const Matrix& x_k, const Vector& s_k,
                           double beta)
{
    require(x_k.rows() == mean.size() && x_k.cols() == s_k.size(), "mc_precision_update: shape mismatch");
    require(precision.rows() == mean.size(), "mc_precision_update: precision shape mismatch");
    const Matrix whitened = precision * (x_k.colwise() - mean);
    const Matrix outer = whitened * s_k.asDiagonal() * whitened.transpose();
    const double n = static_cast<double>(s_k.size());
    Matrix out = precision + beta / n * (outer - s_k.sum() * precision);
    return 0.5 * (out + out.transpose());
}

}  // namespace casbo
