#include "policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "error.hpp"

namespace casbo {

GaussianStep::GaussianStep(Vector mean, const Matrix& precision, const linalg::Tolerances& tol)
    : mean_(std::move(mean)), tol_(tol)
{
    require(mean_.size() > 0, "step dimension must be positive");
    require(precision.rows() == mean_.size() && precision.cols() == mean_.size(),
            "precision dimension does not match mean");
    set_precision(precision);
}

GaussianStep GaussianStep::from_covariance(Vector mean, const Matrix& cov, const linalg::Tolerances& tol)
{
    return GaussianStep(std::move(mean), linalg::sym_inv(cov, tol), tol);
}

void GaussianStep::set_mean(Vector mean)
{
    require(mean.size() == mean_.size(), "mean dimension mismatch");
    if (!mean.allFinite())
        fail(ErrorCode::Numeric, "mean update produced non-finite values");
    mean_ = std::move(mean);
}

void GaussianStep::set_precision(const Matrix& precision)
{
    const linalg::SymEigen eig = linalg::sym_eigen(precision, tol_);
    const double lo = tol_.eig_floor;
    const double hi = 1.0 / tol_.eig_floor;
    precision_eigenvalues_ = eig.values.unaryExpr([lo, hi](double v) { return std::clamp(v, lo, hi); });

    const linalg::SymEigen clamped{precision_eigenvalues_, eig.vectors};
    precision_ = clamped.rebuild([](double v) { return v; });
    cov_ = clamped.rebuild([](double v) { return 1.0 / v; });
    cov_sqrt_ = clamped.rebuild([](double v) { return 1.0 / std::sqrt(v); });
    precision_sqrt_ = clamped.rebuild([](double v) { return std::sqrt(v); });
}

PolicyChain init_chain(int K, int d, double tau)
{
    require(K >= 1, "K must be >= 1");
    require(d >= 1, "d must be >= 1");
    require(tau > 0.0 && std::isfinite(tau), "tau must be positive");

    PolicyChain chain;
    chain.steps.reserve(K);
    const Matrix precision = Matrix::Identity(d, d) / tau;
    for (int k = 0; k < K; ++k)
        chain.steps.emplace_back(Vector::Zero(d), precision);
    return chain;
}

Matrix TrajectoryBatch::trajectory(int j) const
{
    Matrix out(dim(), K());
    for (int k = 0; k < K(); ++k)
        out.col(k) = x[k].col(j);
    return out;
}

TrajectoryBatch sample_batch(const PolicyChain& chain, int N, Rng& rng)
{
    require(N >= 2, "batch size N must be >= 2");
    require(chain.K() >= 1, "chain is empty");

    const int d = chain.dim();
    TrajectoryBatch batch;
    batch.z.reserve(chain.K());
    batch.x.reserve(chain.K());
    for (const GaussianStep& step : chain.steps) {
        Matrix z(d, N);
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < d; ++i)
                z(i, j) = rng.standard_normal();
        Matrix x = step.cov_sqrt() * z;
        x.colwise() += step.mean();
        batch.z.push_back(std::move(z));
        batch.x.push_back(std::move(x));
    }
    return batch;
}

Matrix mean_trajectory(const PolicyChain& chain)
{
    Matrix out(chain.dim(), chain.K());
    for (int k = 0; k < chain.K(); ++k)
        out.col(k) = chain.steps[k].mean();
    return out;
}

void write_snapshot(std::ostream& os, const PolicyChain& chain)
{
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        os << buf;
    };
    for (int k = 0; k < chain.K(); ++k) {
        const GaussianStep& step = chain.steps[k];
        os << (k + 1);
        for (Eigen::Index i = 0; i < step.dim(); ++i)
            put(step.mean()(i));
        for (Eigen::Index r = 0; r < step.dim(); ++r)
            for (Eigen::Index c = 0; c < step.dim(); ++c)
                put(step.covariance()(r, c));
        os << '\n';
    }
}

PolicyChain read_snapshot(std::istream& is)
{
    PolicyChain chain;
    std::string line;
    int expected_k = 1;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        int k = 0;
        if (!(ls >> k) || k != expected_k)
            fail(ErrorCode::InvalidInput, "snapshot: bad step index on line " + std::to_string(expected_k));
        std::vector<double> values;
        double v = 0.0;
        while (ls >> v)
            values.push_back(v);
        if (!ls.eof())
            fail(ErrorCode::InvalidInput, "snapshot: unparsable number in step " + std::to_string(k));

        // n = d + d*d
        const auto n = static_cast<double>(values.size());
        const int d = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 4.0 * n)) / 2.0));
        if (d < 1 || static_cast<std::size_t>(d + d * d) != values.size())
            fail(ErrorCode::InvalidInput, "snapshot: step " + std::to_string(k) + " has a bad entry count");
        if (chain.K() > 0 && d != chain.dim())
            fail(ErrorCode::InvalidInput, "snapshot: steps disagree on dimension");

        Vector mean = Eigen::Map<const Vector>(values.data(), d);
        Matrix cov(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                cov(r, c) = values[d + r * d + c];
        chain.steps.push_back(GaussianStep::from_covariance(std::move(mean), cov));
        ++expected_k;
    }
    if (chain.K() == 0)
        fail(ErrorCode::InvalidInput, "snapshot is empty");
    return chain;
}

void save_snapshot(const std::string& path, const PolicyChain& chain)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::Io, "cannot open " + path + " for writing");
    write_snapshot(out, chain);
    if (!out)
        fail(ErrorCode::Io, "failed writing " + path);
}

PolicyChain load_snapshot(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::Io, "cannot open " + path);
    return read_snapshot(in);
}

}  // namespace casbo
