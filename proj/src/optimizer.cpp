#include "optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace casbo {

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::Bdtg: return "bdtg";
    case Mode::Casbo: return "casbo";
    case Mode::Es: return "es";
    }
    return "unknown";
}

Mode parse_mode(const std::string& name)
{
    if (name == "bdtg")
        return Mode::Bdtg;
    if (name == "casbo")
        return Mode::Casbo;
    if (name == "es")
        return Mode::Es;
    fail(ErrorCode::InvalidInput, "unknown mode '" + name + "' (expected bdtg, casbo or es)");
}

void BdtgConfig::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(ErrorCode::Config, "alpha must be positive");
    if (N < 2)
        fail(ErrorCode::Config, "N must be >= 2");
    if (T < 0)
        fail(ErrorCode::Config, "T must be >= 0");
    if (!(tau > 0.0) || !std::isfinite(tau))
        fail(ErrorCode::Config, "tau must be positive");
}

double BdtgConfig::beta_mu(int d) const { return alpha / std::sqrt(static_cast<double>(d)); }

double BdtgConfig::beta_sigma(int d) const { return alpha / static_cast<double>(d); }

void CasboSchedules::validate() const
{
    if (!(beta > 0.0) || !(alpha > 0.0) || !(nu > 0.0))
        fail(ErrorCode::Config, "CASBO schedules need beta, alpha, nu > 0");
}

double CasboSchedules::alpha_t(int t) const { return std::sqrt(static_cast<double>(t) + 1.0) * alpha; }

double CasboSchedules::gamma_t(int t) const
{
    return alpha * nu / (beta * std::sqrt(static_cast<double>(t) + 1.0));
}

double CasboSchedules::band_width(int t) const
{
    return (beta_t(t + 1) / beta_t(t) - omega_t(t)) / alpha_t(t);
}

double CasboSchedules::upper_sigma_coeff(int t) const { return beta_t(t + 1) * gamma_t(t) / alpha_t(t); }

Vector bdtg_update_mu(const GaussianStep& step, const Matrix& x_k, const Vector& h, double beta_mu)
{
    require(x_k.rows() == step.dim() && x_k.cols() == h.size() && h.size() > 0,
            "bdtg_update_mu: shape mismatch");
    const Matrix centered = x_k.colwise() - step.mean();
    return step.mean() - beta_mu / static_cast<double>(h.size()) * (centered * h);
}

Matrix bdtg_update_sigma(const GaussianStep& step, const Matrix& H, double kappa, double beta_sig)
{
    require(H.rows() == step.dim() && H.cols() == step.dim(), "bdtg_update_sigma: shape mismatch");
    if (kappa * beta_sig >= 1.0) {
        std::ostringstream os;
        os << "covariance step too large: kappa * beta = " << kappa * beta_sig
           << " >= 1; use a smaller alpha";
        fail(ErrorCode::StepSize, os.str());
    }
    const Eigen::Index d = step.dim();
    const Matrix inner = (1.0 - kappa * beta_sig) * Matrix::Identity(d, d) + beta_sig * H;
    Matrix out = step.precision_sqrt() * inner * step.precision_sqrt();
    return 0.5 * (out + out.transpose());
}

IterationStats bdtg_iterate(PolicyChain& chain, const SequentialProblem& problem, const BdtgConfig& config,
                            Rng& rng)
{
    config.validate();
    require(chain.K() == problem.K() && chain.dim() == problem.dim(), "chain does not match problem dims");

    const TrajectoryBatch batch = sample_batch(chain, config.N, rng);
    const ScoreTable scores = build_score_table(rollout_batch(problem, batch));

    const int d = chain.dim();
    const double beta_mu = config.beta_mu(d);
    const double beta_sig = config.beta_sigma(d);
    for (int k = 0; k < chain.K(); ++k) {
        if (scores.degenerate[k])
            continue;
        GaussianStep& step = chain.steps[k];
        const Vector h = scores.normalized.row(k).transpose();
        Vector new_mean = bdtg_update_mu(step, batch.x[k], h, beta_mu);
        const Matrix new_precision = bdtg_update_sigma(step, build_H(batch.z[k], h), scores.kappa(k), beta_sig);
        step.set_mean(std::move(new_mean));
        step.set_precision(new_precision);
    }

    IterationStats stats;
    stats.best_sampled_cum_obj = scores.cumulative.row(0).minCoeff();
    stats.queries = static_cast<std::uint64_t>(chain.K()) * static_cast<std::uint64_t>(config.N);
    return stats;
}

BandProjection casbo_project_H(const Matrix& W, const GaussianStep& step, int t, const CasboSchedules& schedules)
{
    require(t >= 1, "CASBO iteration index starts at 1");
    require(W.rows() == step.dim() && W.cols() == step.dim(), "casbo_project_H: shape mismatch");
    const linalg::SymEigen eig = linalg::sym_eigen(W);
    if (eig.values(0) < -1e-10)
        fail(ErrorCode::InvalidInput, "casbo_project_H: W is not positive semi-definite");

    const double width = schedules.band_width(t);
    const double lambda_max = eig.values(eig.values.size() - 1);

    BandProjection out;
    out.c1 = lambda_max > 0.0 ? std::min(1.0, width / lambda_max) : 1.0;
    const double c1 = out.c1;
    const Matrix D = eig.rebuild([c1](double v) { return c1 * std::max(v, 0.0); });

    const Eigen::Index d = step.dim();
    out.H = schedules.nu * step.covariance() + D;
    Matrix g = schedules.nu * Matrix::Identity(d, d) + step.precision_sqrt() * D * step.precision_sqrt();
    out.G_hat = 0.5 * (g + g.transpose());
    return out;
}

IterationStats casbo_iterate(PolicyChain& chain, const SequentialProblem& problem, const CasboSchedules& schedules,
                             int N, int t, Rng& rng)
{
    schedules.validate();
    require(t >= 1, "CASBO iteration index starts at 1");
    require(chain.K() == problem.K() && chain.dim() == problem.dim(), "chain does not match problem dims");

    const int K = chain.K();
    const TrajectoryBatch batch = sample_batch(chain, N, rng);
    const Matrix raw = rollout_batch(problem, batch);
    const Vector baseline = rollout(problem, mean_trajectory(chain));
    const ScoreTable scores = build_score_table(raw);

    const double beta_t = schedules.beta_t(t);
    const double alpha_t = schedules.alpha_t(t);
    const double gamma_t = schedules.gamma_t(t);
    const double omega_t = schedules.omega_t(t);

    for (int k = 0; k < K; ++k) {
        std::vector<Vector> terms;
        terms.reserve(K - k);
        for (int i = k; i < K; ++i)
            terms.push_back(grad_estimator_mu(chain, batch, raw, baseline, i, k));
        const Vector grad = sum_grad_for_step(terms);

        GaussianStep& step = chain.steps[k];
        const Vector h = scores.normalized.row(k).transpose();
        const BandProjection proj = casbo_project_H(build_H(batch.z[k], h), step, t, schedules);

        Vector new_mean = step.mean() - beta_t * step.covariance() * (gamma_t * step.mean() + grad);
        const Matrix new_precision = omega_t * step.precision() + alpha_t * proj.G_hat;
        step.set_mean(std::move(new_mean));
        step.set_precision(new_precision);
    }

    IterationStats stats;
    stats.best_sampled_cum_obj = scores.cumulative.row(0).minCoeff();
    stats.queries = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(N) + static_cast<std::uint64_t>(K);
    return stats;
}

Vector es_mean_update(const Vector& mean, const Matrix& eps, const Vector& totals, double sigma, double beta)
{
    require(sigma > 0.0 && std::isfinite(sigma), "ES sigma must be positive");
    require(eps.rows() == mean.size() && eps.cols() == totals.size() && totals.size() > 0,
            "es_mean_update: shape mismatch");
    return mean - beta / (static_cast<double>(totals.size()) * sigma) * (eps * totals);
}

IterationStats es_baseline_iterate(Vector& mean, double sigma, const SequentialProblem& problem, int N,
                                   double beta, Rng& rng)
{
    require(sigma > 0.0 && std::isfinite(sigma), "ES sigma must be positive");
    require(N >= 1, "ES batch size must be >= 1");
    const int K = problem.K();
    const int d = problem.dim();
    require(mean.size() == static_cast<Eigen::Index>(K) * d, "ES mean must have length K * d");

    Matrix eps(mean.size(), N);
    for (int j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < mean.size(); ++i)
            eps(i, j) = rng.standard_normal();

    Vector totals(N);
    for (int j = 0; j < N; ++j) {
        const Vector candidate = mean + sigma * eps.col(j);
        const Vector scores = rollout(problem, Eigen::Map<const Matrix>(candidate.data(), d, K));
        if (!scores.allFinite())
            fail(ErrorCode::InvalidScore, "non-finite score in ES sample " + std::to_string(j));
        totals(j) = scores.sum();
    }
    mean = es_mean_update(mean, eps, totals, sigma, beta);
    if (!mean.allFinite())
        fail(ErrorCode::Numeric, "ES update produced non-finite values");

    IterationStats stats;
    stats.best_sampled_cum_obj = totals.minCoeff();
    stats.queries = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(N);
    return stats;
}

double RunConfig::effective_tau() const
{
    if (tau > 0.0)
        return tau;
    if (mode == Mode::Casbo)
        return std::min(1.0, schedules().max_initial_tau());
    return 1.0;
}

BdtgConfig RunConfig::bdtg() const { return {alpha, N, T, effective_tau()}; }

CasboSchedules RunConfig::schedules() const { return {beta, alpha, nu}; }

void RunConfig::validate() const
{
    if (N < 2)
        fail(ErrorCode::Config, "N must be >= 2");
    if (T < 0)
        fail(ErrorCode::Config, "T must be >= 0");
    switch (mode) {
    case Mode::Bdtg:
        bdtg().validate();
        break;
    case Mode::Casbo: {
        const CasboSchedules s = schedules();
        s.validate();
        const double t0 = effective_tau();
        if (t0 > s.max_initial_tau() * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "CASBO needs tau <= 3/(5 alpha nu) = " << s.max_initial_tau() << ", got " << t0;
            fail(ErrorCode::Config, os.str());
        }
        break;
    }
    case Mode::Es:
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            fail(ErrorCode::Config, "ES sigma must be positive");
        if (!(beta > 0.0) || !std::isfinite(beta))
            fail(ErrorCode::Config, "ES step size beta must be positive");
        break;
    }
}

namespace {

double now_ms()
{
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

Vector flatten_means(const PolicyChain& chain)
{
    const Matrix means = mean_trajectory(chain);
    return Eigen::Map<const Vector>(means.data(), means.size());
}

}  // namespace

OptimizerRun::OptimizerRun(ProblemPtr problem, RunConfig config, std::uint64_t seed)
    : problem_(std::move(problem)), config_(config), rng_(seed)
{
    require(problem_ != nullptr, "optimizer needs a problem");
    config_.validate();
    const double tau = config_.mode == Mode::Es ? config_.sigma * config_.sigma : config_.effective_tau();
    chain_ = init_chain(problem_->K(), problem_->dim(), tau);

    const double start = now_ms();
    initial_ = make_record(std::numeric_limits<double>::quiet_NaN());
    initial_.best_sampled_cum_obj = initial_.mean_cum_obj;
    if (config_.record_wallclock)
        initial_.wallclock_ms = elapsed_ms_ = now_ms() - start;
}

void OptimizerRun::set_chain(PolicyChain chain)
{
    require(chain.K() == problem_->K() && chain.dim() == problem_->dim(), "chain does not match problem dims");
    chain_ = std::move(chain);
}

TraceRecord OptimizerRun::make_record(double best_sampled) const
{
    TraceRecord rec;
    rec.iter = t_;
    rec.mean_cum_obj = rollout(*problem_, mean_trajectory(chain_)).sum();
    rec.best_sampled_cum_obj = best_sampled;
    rec.queries = queries_;
    rec.wallclock_ms = elapsed_ms_;
    rec.step_min_eig.reserve(chain_.K());
    rec.step_max_eig.reserve(chain_.K());
    for (const GaussianStep& step : chain_.steps) {
        rec.step_min_eig.push_back(step.min_cov_eigenvalue());
        rec.step_max_eig.push_back(step.max_cov_eigenvalue());
    }
    rec.min_eig_sigma = *std::min_element(rec.step_min_eig.begin(), rec.step_min_eig.end());
    rec.max_eig_sigma = *std::max_element(rec.step_max_eig.begin(), rec.step_max_eig.end());
    return rec;
}

TraceRecord OptimizerRun::step()
{
    const double start = now_ms();
    ++t_;
    IterationStats stats;
    switch (config_.mode) {
    case Mode::Bdtg:
        stats = bdtg_iterate(chain_, *problem_, config_.bdtg(), rng_);
        break;
    case Mode::Casbo:
        stats = casbo_iterate(chain_, *problem_, config_.schedules(), config_.N, t_, rng_);
        break;
    case Mode::Es: {
        Vector mean = flatten_means(chain_);
        stats = es_baseline_iterate(mean, config_.sigma, *problem_, config_.N, config_.beta, rng_);
        const int d = chain_.dim();
        for (int k = 0; k < chain_.K(); ++k)
            chain_.steps[k].set_mean(mean.segment(static_cast<Eigen::Index>(k) * d, d));
        break;
    }
    }
    queries_ += stats.queries;
    if (config_.record_wallclock)
        elapsed_ms_ += now_ms() - start;
    return make_record(stats.best_sampled_cum_obj);
}

RunTrace run_optimizer(ProblemPtr problem, const RunConfig& config, std::uint64_t seed, int checkpoint_every,
                       const CheckpointFn& on_checkpoint)
{
    OptimizerRun run(std::move(problem), config, seed);
    RunTrace trace;
    trace.reserve(static_cast<std::size_t>(config.T) + 1);
    trace.push_back(run.initial_record());
    for (int t = 1; t <= config.T; ++t) {
        trace.push_back(run.step());
        if (checkpoint_every > 0 && on_checkpoint && t % checkpoint_every == 0)
            on_checkpoint(t, run.chain());
    }
    return trace;
}

}  // namespace casbo
