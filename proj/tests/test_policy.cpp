#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "error.hpp"
#include "policy.hpp"
#include "test_support.hpp"

using namespace casbo;

TEST(InitChain, PaperInitialization)
{
    const PolicyChain chain = init_chain(1, 2, 1.0);
    ASSERT_EQ(chain.K(), 1);
    EXPECT_TRUE(chain.steps[0].mean().isZero(0.0));
    EXPECT_TRUE(chain.steps[0].covariance().isApprox(Matrix::Identity(2, 2), 1e-15));
}

TEST(InitChain, ScalarTau)
{
    const PolicyChain chain = init_chain(3, 1, 4.0);
    ASSERT_EQ(chain.K(), 3);
    for (const GaussianStep& s : chain.steps) {
        EXPECT_NEAR(s.covariance()(0, 0), 4.0, 1e-14);
        EXPECT_NEAR(s.cov_sqrt()(0, 0), 2.0, 1e-14);
        EXPECT_NEAR(s.precision()(0, 0), 0.25, 1e-15);
    }
}

TEST(InitChain, PrecisionTimesCovarianceIsIdentity)
{
    const PolicyChain chain = init_chain(2, 5, 1.0);
    for (const GaussianStep& s : chain.steps)
        EXPECT_LE((s.precision() * s.covariance() - Matrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(InitChain, RejectsBadArguments)
{
    EXPECT_THROW(init_chain(0, 2, 1.0), Error);
    EXPECT_THROW(init_chain(2, 0, 1.0), Error);
    EXPECT_THROW(init_chain(2, 2, 0.0), Error);
    EXPECT_THROW(init_chain(2, 2, -1.0), Error);
}

TEST(GaussianStep, CachesStayConsistent)
{
    Rng rng(9);
    const Matrix cov = fixtures::random_spd(6, rng);
    const GaussianStep step = GaussianStep::from_covariance(Vector::Zero(6), cov);
    EXPECT_LE(linalg::rel_frobenius(step.precision() * step.covariance(), Matrix::Identity(6, 6)), 1e-7);
    EXPECT_LE(linalg::rel_frobenius(step.cov_sqrt() * step.cov_sqrt(), step.covariance()), 1e-8);
    EXPECT_LE((step.cov_sqrt() * step.precision_sqrt() - Matrix::Identity(6, 6)).norm(), 1e-10);
    EXPECT_GE(linalg::min_eigenvalue(step.covariance()), linalg::kDefaults.eig_floor);
}

TEST(SampleBatch, ScalarAffineTransform)
{
    PolicyChain chain;
    chain.steps.push_back(GaussianStep::from_covariance(Vector::Constant(1, 5.0), Matrix::Constant(1, 1, 4.0)));
    // x = mu + Sigma^{1/2} z with z = 1.5
    EXPECT_NEAR(chain.steps[0].mean()(0) + chain.steps[0].cov_sqrt()(0, 0) * 1.5, 8.0, 1e-14);

    Rng rng(1);
    const TrajectoryBatch batch = sample_batch(chain, 8, rng);
    for (int j = 0; j < 8; ++j)
        EXPECT_NEAR(batch.x[0](0, j), 5.0 + 2.0 * batch.z[0](0, j), 1e-14);
}

TEST(SampleBatch, StoredCandidatesMatchDraws)
{
    PolicyChain chain = init_chain(3, 4, 1.0);
    Rng build(17);
    for (GaussianStep& s : chain.steps) {
        s.set_precision(linalg::sym_inv(fixtures::random_spd(4, build)));
        s.set_mean(fixtures::random_gaussian(4, 1, build).col(0));
    }
    Rng rng(3);
    const TrajectoryBatch batch = sample_batch(chain, 7, rng);
    for (int k = 0; k < 3; ++k) {
        Matrix expected = chain.steps[k].cov_sqrt() * batch.z[k];
        expected.colwise() += chain.steps[k].mean();
        EXPECT_EQ((batch.x[k] - expected).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(SampleBatch, DegenerateVarianceCollapsesToMean)
{
    const double floor = linalg::kDefaults.eig_floor;
    PolicyChain chain = init_chain(2, 3, floor);
    const Vector m = Vector::LinSpaced(3, -1.0, 2.0);
    for (GaussianStep& s : chain.steps)
        s.set_mean(m);
    Rng rng(4);
    const TrajectoryBatch batch = sample_batch(chain, 5, rng);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 5; ++j)
            EXPECT_LE((batch.x[k].col(j) - m).norm(), std::sqrt(floor) * batch.z[k].col(j).norm() * (1 + 1e-9));
}

TEST(SampleBatch, SameSeedIsBitIdentical)
{
    const PolicyChain chain = init_chain(2, 3, 1.0);
    Rng a(123), b(123);
    const TrajectoryBatch x = sample_batch(chain, 4, a);
    const TrajectoryBatch y = sample_batch(chain, 4, b);
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(std::memcmp(x.z[k].data(), y.z[k].data(), sizeof(double) * x.z[k].size()), 0);
        EXPECT_EQ(std::memcmp(x.x[k].data(), y.x[k].data(), sizeof(double) * x.x[k].size()), 0);
    }
}

TEST(SampleBatch, RejectsTinyBatch)
{
    Rng rng(1);
    EXPECT_THROW(sample_batch(init_chain(1, 1, 1.0), 1, rng), Error);
}

TEST(SampleBatch, EmpiricalMoments)
{
    constexpr int N = 100000;
    PolicyChain chain = init_chain(1, 3, 1.0);
    const Vector mu(Eigen::Vector3d(1.0, -2.0, 0.5));
    chain.steps[0].set_mean(mu);
    Rng rng(77);
    const TrajectoryBatch batch = sample_batch(chain, N, rng);
    const Vector mean = batch.x[0].rowwise().mean();
    const Matrix centered = batch.x[0].colwise() - mean;
    const Matrix cov = centered * centered.transpose() / (N - 1.0);
    for (int i = 0; i < 3; ++i)
        EXPECT_LE(std::abs(mean(i) - mu(i)), 4.0 / std::sqrt(static_cast<double>(N)));
    EXPECT_LE((cov - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(MeanTrajectory, ReportsPerStepMeans)
{
    PolicyChain chain = init_chain(3, 2, 1.0);
    EXPECT_TRUE(mean_trajectory(chain).isZero(0.0));
    chain.steps[1].set_mean(Eigen::Vector2d(1.0, 2.0));
    const Matrix means = mean_trajectory(chain);
    EXPECT_EQ(means(0, 1), 1.0);
    EXPECT_EQ(means(1, 1), 2.0);
}

TEST(Snapshot, RoundTripAndFormat)
{
    PolicyChain chain = init_chain(2, 3, 1.0);
    Rng rng(8);
    for (GaussianStep& s : chain.steps) {
        s.set_precision(linalg::sym_inv(fixtures::random_spd(3, rng)));
        s.set_mean(fixtures::random_gaussian(3, 1, rng).col(0));
    }
    std::stringstream ss;
    write_snapshot(ss, chain);

    const std::string text = ss.str();
    std::istringstream lines(text);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        int k;
        ls >> k;
        EXPECT_EQ(k, ++count);
        int values = 0;
        double v;
        while (ls >> v)
            ++values;
        EXPECT_EQ(values, 3 + 9);
    }
    EXPECT_EQ(count, 2);

    const PolicyChain back = read_snapshot(ss);
    ASSERT_EQ(back.K(), 2);
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(back.steps[k].mean(), chain.steps[k].mean());
        EXPECT_LE(linalg::rel_frobenius(back.steps[k].covariance(), chain.steps[k].covariance()), 1e-12);
    }
}

TEST(Snapshot, RejectsMalformedInput)
{
    std::istringstream bad_index("2 0 1\n");
    EXPECT_THROW(read_snapshot(bad_index), Error);
    std::istringstream bad_count("1 0 1 0\n");
    EXPECT_THROW(read_snapshot(bad_count), Error);
    std::istringstream empty("");
    EXPECT_THROW(read_snapshot(empty), Error);
}
