#include "casbo/casbo.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "bench.hpp"
#include "error.hpp"
#include "optimizer.hpp"
#include "problems.hpp"

struct casbo_problem {
    casbo::ProblemPtr impl;
};

struct casbo_optimizer {
    casbo::OptimizerRun run;
};

namespace {

thread_local std::string last_error;

casbo_status to_status(casbo::ErrorCode code)
{
    using casbo::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidInput: return CASBO_ERR_INVALID_ARGUMENT;
    case ErrorCode::Numeric: return CASBO_ERR_NUMERIC;
    case ErrorCode::Singular: return CASBO_ERR_SINGULAR;
    case ErrorCode::StepSize: return CASBO_ERR_STEP_SIZE;
    case ErrorCode::Config: return CASBO_ERR_CONFIG;
    case ErrorCode::InvalidScore: return CASBO_ERR_INVALID_SCORE;
    case ErrorCode::Io: return CASBO_ERR_IO;
    }
    return CASBO_ERR_INTERNAL;
}

template <typename Fn>
casbo_status guarded(Fn&& fn) noexcept
{
    try {
        last_error.clear();
        fn();
        return CASBO_OK;
    } catch (const casbo::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CASBO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CASBO_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return CASBO_ERR_INTERNAL;
    }
}

void require_ptr(const void* p, const char* what)
{
    if (p == nullptr)
        casbo::fail(casbo::ErrorCode::InvalidInput, std::string(what) + " must not be null");
}

casbo::RunConfig to_run_config(const casbo_optimizer_config& c)
{
    casbo::RunConfig run;
    switch (c.mode) {
    case CASBO_MODE_BDTG: run.mode = casbo::Mode::Bdtg; break;
    case CASBO_MODE_CASBO: run.mode = casbo::Mode::Casbo; break;
    case CASBO_MODE_ES: run.mode = casbo::Mode::Es; break;
    default: casbo::fail(casbo::ErrorCode::InvalidInput, "unknown optimizer mode");
    }
    run.alpha = c.alpha;
    run.beta = c.beta;
    run.nu = c.nu;
    run.sigma = c.sigma;
    run.tau = c.tau;
    run.N = c.N;
    run.T = c.T;
    run.record_wallclock = c.record_wallclock != 0;
    return run;
}

void to_record(const casbo::TraceRecord& r, casbo_trace_record* out)
{
    out->iter = r.iter;
    out->mean_cum_obj = r.mean_cum_obj;
    out->best_sampled_cum_obj = r.best_sampled_cum_obj;
    out->min_eig_sigma = r.min_eig_sigma;
    out->max_eig_sigma = r.max_eig_sigma;
    out->queries = r.queries;
    out->wallclock_ms = r.wallclock_ms;
}

}  // namespace

extern "C" {

const char* casbo_version(void) { return "0.1.0"; }

const char* casbo_status_string(casbo_status status)
{
    switch (status) {
    case CASBO_OK: return "ok";
    case CASBO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CASBO_ERR_NUMERIC: return "numeric failure";
    case CASBO_ERR_SINGULAR: return "singular matrix";
    case CASBO_ERR_STEP_SIZE: return "step size too large";
    case CASBO_ERR_CONFIG: return "invalid configuration";
    case CASBO_ERR_INVALID_SCORE: return "invalid score";
    case CASBO_ERR_IO: return "i/o error";
    case CASBO_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* casbo_last_error(void) { return last_error.c_str(); }

casbo_status casbo_problem_create(const char* name, int K, int d, uint64_t seed, casbo_problem** out)
{
    return guarded([&] {
        require_ptr(name, "name");
        require_ptr(out, "out");
        *out = nullptr;
        casbo::ProblemPtr impl = casbo::make_problem(name, K, d, seed);
        *out = new casbo_problem{std::move(impl)};
    });
}

casbo_status casbo_problem_dims(const casbo_problem* problem, int* K, int* d)
{
    return guarded([&] {
        require_ptr(problem, "problem");
        if (K)
            *K = problem->impl->K();
        if (d)
            *d = problem->impl->dim();
    });
}

casbo_status casbo_problem_rollout(const casbo_problem* problem, const double* trajectory, size_t trajectory_len,
                                   double* scores, size_t scores_len)
{
    return guarded([&] {
        require_ptr(problem, "problem");
        require_ptr(trajectory, "trajectory");
        require_ptr(scores, "scores");
        const int K = problem->impl->K();
        const int d = problem->impl->dim();
        casbo::require(trajectory_len == static_cast<size_t>(K) * d, "trajectory must hold K * d values");
        casbo::require(scores_len == static_cast<size_t>(K), "scores must hold K values");
        const casbo::Matrix traj = Eigen::Map<const casbo::Matrix>(trajectory, d, K);
        const casbo::Vector s = casbo::rollout(*problem->impl, traj);
        std::memcpy(scores, s.data(), sizeof(double) * K);
    });
}

void casbo_problem_destroy(casbo_problem* problem) { delete problem; }

void casbo_optimizer_config_default(casbo_optimizer_config* config)
{
    if (!config)
        return;
    const casbo::RunConfig run;
    config->mode = CASBO_MODE_BDTG;
    config->alpha = run.alpha;
    config->beta = run.beta;
    config->nu = run.nu;
    config->sigma = run.sigma;
    config->tau = run.tau;
    config->N = run.N;
    config->T = run.T;
    config->record_wallclock = run.record_wallclock ? 1 : 0;
}

casbo_status casbo_optimizer_create(const casbo_problem* problem, const casbo_optimizer_config* config,
                                    uint64_t seed, casbo_optimizer** out)
{
    return guarded([&] {
        require_ptr(problem, "problem");
        require_ptr(config, "config");
        require_ptr(out, "out");
        *out = nullptr;
        *out = new casbo_optimizer{casbo::OptimizerRun(problem->impl, to_run_config(*config), seed)};
    });
}

casbo_status casbo_optimizer_initial_record(const casbo_optimizer* opt, casbo_trace_record* out)
{
    return guarded([&] {
        require_ptr(opt, "optimizer");
        require_ptr(out, "out");
        to_record(opt->run.initial_record(), out);
    });
}

casbo_status casbo_optimizer_step(casbo_optimizer* opt, casbo_trace_record* out)
{
    return guarded([&] {
        require_ptr(opt, "optimizer");
        const casbo::TraceRecord rec = opt->run.step();
        if (out)
            to_record(rec, out);
    });
}

casbo_status casbo_optimizer_mean(const casbo_optimizer* opt, double* out, size_t len)
{
    return guarded([&] {
        require_ptr(opt, "optimizer");
        require_ptr(out, "out");
        const casbo::Matrix means = casbo::mean_trajectory(opt->run.chain());
        casbo::require(len == static_cast<size_t>(means.size()), "mean buffer must hold K * d values");
        std::memcpy(out, means.data(), sizeof(double) * len);
    });
}

casbo_status casbo_optimizer_covariance(const casbo_optimizer* opt, int k, double* out, size_t len)
{
    return guarded([&] {
        require_ptr(opt, "optimizer");
        require_ptr(out, "out");
        const casbo::PolicyChain& chain = opt->run.chain();
        casbo::require(k >= 0 && k < chain.K(), "step index out of range");
        const casbo::Matrix& cov = chain.steps[k].covariance();
        casbo::require(len == static_cast<size_t>(cov.size()), "covariance buffer must hold d * d values");
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, cov.rows(),
                                                                                         cov.cols()) = cov;
    });
}

casbo_status casbo_optimizer_save_snapshot(const casbo_optimizer* opt, const char* path)
{
    return guarded([&] {
        require_ptr(opt, "optimizer");
        require_ptr(path, "path");
        casbo::save_snapshot(path, opt->run.chain());
    });
}

casbo_status casbo_optimizer_load_snapshot(casbo_optimizer* opt, const char* path)
{
    return guarded([&] {
        require_ptr(opt, "optimizer");
        require_ptr(path, "path");
        opt->run.set_chain(casbo::load_snapshot(path));
    });
}

void casbo_optimizer_destroy(casbo_optimizer* opt) { delete opt; }

void casbo_experiment_config_default(casbo_experiment_config* config)
{
    if (!config)
        return;
    const casbo::bench::ExperimentConfig defaults;
    config->problem = "l1ellipsoid";
    config->K = defaults.K;
    config->d = defaults.d;
    casbo_optimizer_config_default(&config->optimizer);
    config->runs = defaults.runs;
    config->seed = defaults.seed;
    config->jobs = defaults.jobs;
    config->out_dir = nullptr;
    config->checkpoint_every = defaults.checkpoint_every;
    config->plot = defaults.plot ? 1 : 0;
}

casbo_status casbo_experiment_run(const casbo_experiment_config* config)
{
    return guarded([&] {
        require_ptr(config, "config");
        require_ptr(config->problem, "config->problem");
        require_ptr(config->out_dir, "config->out_dir");
        casbo::bench::ExperimentConfig exp;
        exp.problem = config->problem;
        exp.K = config->K;
        exp.d = config->d;
        exp.run = to_run_config(config->optimizer);
        exp.runs = config->runs;
        exp.seed = config->seed;
        exp.jobs = config->jobs;
        exp.out_dir = config->out_dir;
        exp.checkpoint_every = config->checkpoint_every;
        exp.plot = config->plot != 0;
        casbo::bench::run_experiment(exp);
    });
}

}  // extern "C"
