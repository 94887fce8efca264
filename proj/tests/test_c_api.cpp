#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "casbo/casbo.h"

namespace fs = std::filesystem;

namespace {

struct ProblemHandle {
    casbo_problem* p = nullptr;
    ~ProblemHandle() { casbo_problem_destroy(p); }
};

struct OptimizerHandle {
    casbo_optimizer* o = nullptr;
    ~OptimizerHandle() { casbo_optimizer_destroy(o); }
};

}  // namespace

TEST(CApi, VersionAndStatusStrings)
{
    EXPECT_STREQ(casbo_version(), "0.1.0");
    EXPECT_STREQ(casbo_status_string(CASBO_OK), "ok");
    EXPECT_STRNE(casbo_status_string(CASBO_ERR_STEP_SIZE), casbo_status_string(CASBO_ERR_CONFIG));
    EXPECT_NE(std::string(casbo_status_string(static_cast<casbo_status>(1234))), "");
}

TEST(CApi, ProblemRollout)
{
    ProblemHandle h;
    ASSERT_EQ(casbo_problem_create("l1ellipsoid", 2, 3, 0, &h.p), CASBO_OK);
    int K = 0, d = 0;
    ASSERT_EQ(casbo_problem_dims(h.p, &K, &d), CASBO_OK);
    EXPECT_EQ(K, 2);
    EXPECT_EQ(d, 3);
    std::vector<double> traj(6, 0.0), scores(2, -1.0);
    ASSERT_EQ(casbo_problem_rollout(h.p, traj.data(), traj.size(), scores.data(), scores.size()), CASBO_OK);
    for (double s : scores)
        EXPECT_TRUE(std::isfinite(s));
    EXPECT_EQ(casbo_problem_rollout(h.p, traj.data(), 5, scores.data(), scores.size()), CASBO_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(casbo_last_error()), "");
}

TEST(CApi, InvalidArguments)
{
    casbo_problem* p = nullptr;
    EXPECT_EQ(casbo_problem_create("nope", 2, 3, 0, &p), CASBO_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(p, nullptr);
    EXPECT_NE(std::string(casbo_last_error()).find("nope"), std::string::npos);
    EXPECT_EQ(casbo_problem_create(nullptr, 2, 3, 0, &p), CASBO_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(casbo_problem_create("levy", 2, 3, 0, nullptr), CASBO_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(casbo_problem_dims(nullptr, nullptr, nullptr), CASBO_ERR_INVALID_ARGUMENT);
    casbo_problem_destroy(nullptr);
    casbo_optimizer_destroy(nullptr);
}

TEST(CApi, OptimizerLifecycle)
{
    ProblemHandle h;
    ASSERT_EQ(casbo_problem_create("rastrigin10", 2, 3, 5, &h.p), CASBO_OK);
    casbo_optimizer_config cfg;
    casbo_optimizer_config_default(&cfg);
    EXPECT_EQ(cfg.N, 32);
    EXPECT_EQ(cfg.T, 100);
    EXPECT_EQ(cfg.mode, CASBO_MODE_BDTG);
    cfg.N = 8;
    cfg.alpha = 2.0;

    OptimizerHandle o;
    ASSERT_EQ(casbo_optimizer_create(h.p, &cfg, 3, &o.o), CASBO_OK);
    casbo_problem_destroy(h.p);  // the optimizer keeps its own reference
    h.p = nullptr;

    casbo_trace_record rec{};
    ASSERT_EQ(casbo_optimizer_initial_record(o.o, &rec), CASBO_OK);
    EXPECT_EQ(rec.iter, 0);
    EXPECT_EQ(rec.queries, 0u);
    EXPECT_DOUBLE_EQ(rec.min_eig_sigma, 1.0);
    for (int t = 1; t <= 3; ++t) {
        ASSERT_EQ(casbo_optimizer_step(o.o, &rec), CASBO_OK);
        EXPECT_EQ(rec.iter, t);
        EXPECT_EQ(rec.queries, static_cast<uint64_t>(t) * 2u * 8u);
    }

    std::vector<double> mean(6), cov(9);
    ASSERT_EQ(casbo_optimizer_mean(o.o, mean.data(), mean.size()), CASBO_OK);
    ASSERT_EQ(casbo_optimizer_covariance(o.o, 1, cov.data(), cov.size()), CASBO_OK);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            EXPECT_EQ(cov[r * 3 + c], cov[c * 3 + r]);
    EXPECT_EQ(casbo_optimizer_covariance(o.o, 2, cov.data(), cov.size()), CASBO_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(casbo_optimizer_mean(o.o, mean.data(), 5), CASBO_ERR_INVALID_ARGUMENT);

    const fs::path snap = fs::temp_directory_path() / "casbo_c_api_snapshot.txt";
    ASSERT_EQ(casbo_optimizer_save_snapshot(o.o, snap.string().c_str()), CASBO_OK);

    ProblemHandle h2;
    ASSERT_EQ(casbo_problem_create("rastrigin10", 2, 3, 5, &h2.p), CASBO_OK);
    OptimizerHandle o2;
    ASSERT_EQ(casbo_optimizer_create(h2.p, &cfg, 3, &o2.o), CASBO_OK);
    ASSERT_EQ(casbo_optimizer_load_snapshot(o2.o, snap.string().c_str()), CASBO_OK);
    std::vector<double> mean2(6), cov2(9);
    casbo_optimizer_mean(o2.o, mean2.data(), mean2.size());
    casbo_optimizer_covariance(o2.o, 1, cov2.data(), cov2.size());
    for (int i = 0; i < 6; ++i)
        EXPECT_DOUBLE_EQ(mean2[i], mean[i]);
    for (int i = 0; i < 9; ++i)
        EXPECT_NEAR(cov2[i], cov[i], 1e-12 * (1.0 + std::abs(cov[i])));
    fs::remove(snap);

    EXPECT_EQ(casbo_optimizer_load_snapshot(o2.o, "/nonexistent/dir/snap.txt"), CASBO_ERR_IO);
}

TEST(CApi, ConfigErrors)
{
    ProblemHandle h;
    ASSERT_EQ(casbo_problem_create("levy", 2, 3, 0, &h.p), CASBO_OK);
    casbo_optimizer_config cfg;
    casbo_optimizer_config_default(&cfg);
    cfg.mode = CASBO_MODE_CASBO;
    cfg.alpha = 1.0;
    cfg.nu = 1.0;
    cfg.tau = 1.0;  // above 3 / (5 alpha nu)
    casbo_optimizer* o = nullptr;
    EXPECT_EQ(casbo_optimizer_create(h.p, &cfg, 0, &o), CASBO_ERR_CONFIG);
    EXPECT_EQ(o, nullptr);

    casbo_optimizer_config_default(&cfg);
    cfg.alpha = 1e6;  // kappa * beta >= 1 on the first informative batch
    cfg.N = 4;
    OptimizerHandle big;
    ASSERT_EQ(casbo_optimizer_create(h.p, &cfg, 0, &big.o), CASBO_OK);
    casbo_trace_record rec{};
    EXPECT_EQ(casbo_optimizer_step(big.o, &rec), CASBO_ERR_STEP_SIZE);
}

TEST(CApi, ExperimentRun)
{
    const fs::path dir = fs::temp_directory_path() / "casbo_c_api_experiment";
    fs::remove_all(dir);
    const std::string out = dir.string();
    casbo_experiment_config cfg;
    casbo_experiment_config_default(&cfg);
    EXPECT_EQ(cfg.K, 10);
    EXPECT_EQ(cfg.d, 100);
    EXPECT_EQ(cfg.runs, 5);
    cfg.problem = "toy-diffusion";
    cfg.K = 2;
    cfg.d = 2;
    cfg.runs = 2;
    cfg.optimizer.N = 4;
    cfg.optimizer.T = 3;
    cfg.optimizer.alpha = 1.0;
    cfg.out_dir = out.c_str();
    ASSERT_EQ(casbo_experiment_run(&cfg), CASBO_OK) << casbo_last_error();
    EXPECT_TRUE(fs::exists(dir / "run_1.csv"));
    EXPECT_TRUE(fs::exists(dir / "summary.csv"));
    cfg.runs = 0;
    EXPECT_EQ(casbo_experiment_run(&cfg), CASBO_ERR_CONFIG);
    fs::remove_all(dir);
}
