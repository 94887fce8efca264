#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "policy.hpp"
#include "problems.hpp"
#include "rng.hpp"

namespace casbo {

enum class Mode { Bdtg, Casbo, Es };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

struct BdtgConfig {
    double alpha = 10.0;
    int N = 32;
    int T = 100;
    double tau = 1.0;

    void validate() const;
    // Mean step alpha / sqrt(d) and covariance step alpha / d.
    double beta_mu(int d) const;
    double beta_sigma(int d) const;
};

// Theorem-1 schedules for CASBO, t = 1, 2, ...
struct CasboSchedules {
    double beta = 0.01;
    double alpha = 1.0;
    double nu = 1.0;

    void validate() const;

    double beta_t(int t) const { return t * beta; }
    double alpha_t(int t) const;
    double gamma_t(int t) const;
    double omega_t(int) const { return 1.0; }

    // (beta_{t+1}/beta_t - omega_t) / alpha_t: room between the band edges.
    double band_width(int t) const;
    // beta_{t+1} gamma_t / alpha_t: coefficient of Sigma in the upper edge.
    double upper_sigma_coeff(int t) const;

    // Largest tau with ||Sigma^1||^{-1} >= (5/3) alpha nu.
    double max_initial_tau() const { return 3.0 / (5.0 * alpha * nu); }
};

struct IterationStats {
    double best_sampled_cum_obj = 0.0;
    std::uint64_t queries = 0;
};

/// mu_k - (beta/N) sum_j (x_k^j - mu_k) h_j.
Vector bdtg_update_mu(const GaussianStep& step, const Matrix& x_k, const Vector& h, double beta_mu);

/// Sigma^{-1/2} ((1 - kappa beta) I + beta H) Sigma^{-1/2}, before eigenvalue clamping.
/// Throws StepSize when kappa * beta >= 1.
Matrix bdtg_update_sigma(const GaussianStep& step, const Matrix& H, double kappa, double beta_sig);

IterationStats bdtg_iterate(PolicyChain& chain, const SequentialProblem& problem, const BdtgConfig& config,
                            Rng& rng);

struct BandProjection {
    Matrix H;
    Matrix G_hat;
    double c1 = 1.0;
};

// Projects the score-weighted second moment W into the feasibility band
// nu Sigma <= H <= nu Sigma + band_width(t) I by scaling W with
// c1 = min(1, band_width / lambda_max(W)).
BandProjection casbo_project_H(const Matrix& W, const GaussianStep& step, int t, const CasboSchedules& schedules);

IterationStats casbo_iterate(PolicyChain& chain, const SequentialProblem& problem, const CasboSchedules& schedules,
                             int N, int t, Rng& rng);

/// mean - beta / (N sigma) * sum_i eps_i * totals_i, eps is (d*K) x N.
Vector es_mean_update(const Vector& mean, const Matrix& eps, const Vector& totals, double sigma, double beta);

/// Fixed-variance ES step on the concatenated variable (d*K, x_1 first).
IterationStats es_baseline_iterate(Vector& mean, double sigma, const SequentialProblem& problem, int N,
                                   double beta, Rng& rng);

struct TraceRecord {
    int iter = 0;
    double mean_cum_obj = 0.0;
    double best_sampled_cum_obj = 0.0;
    double min_eig_sigma = 0.0;
    double max_eig_sigma = 0.0;
    std::uint64_t queries = 0;
    double wallclock_ms = 0.0;
    std::vector<double> step_min_eig;
    std::vector<double> step_max_eig;
};

using RunTrace = std::vector<TraceRecord>;

struct RunConfig {
    Mode mode = Mode::Bdtg;
    double alpha = 10.0;
    double beta = 0.01;  // CASBO base beta; ES step size
    double nu = 1.0;
    double sigma = 0.1;  // ES only
    double tau = 0.0;    // <= 0 picks 1 (bdtg) or min(1, 3/(5 alpha nu)) (casbo)
    int N = 32;
    int T = 100;
    bool record_wallclock = true;

    double effective_tau() const;
    void validate() const;
    BdtgConfig bdtg() const;
    CasboSchedules schedules() const;
};

// Owns one optimization run: the chain (or ES mean), the rng stream and the
// running query count. Record 0 is the evaluation of the initial chain.
class OptimizerRun {
public:
    OptimizerRun(ProblemPtr problem, RunConfig config, std::uint64_t seed);

    const TraceRecord& initial_record() const { return initial_; }
    TraceRecord step();

    int iteration() const { return t_; }
    const PolicyChain& chain() const { return chain_; }
    const RunConfig& config() const { return config_; }
    const SequentialProblem& problem() const { return *problem_; }

    // Replaces the chain (resume from a snapshot). Dimensions must match.
    void set_chain(PolicyChain chain);

private:
    TraceRecord make_record(double best_sampled) const;

    ProblemPtr problem_;
    RunConfig config_;
    Rng rng_;
    PolicyChain chain_;
    int t_ = 0;
    std::uint64_t queries_ = 0;
    double elapsed_ms_ = 0.0;
    TraceRecord initial_;
};

using CheckpointFn = std::function<void(int t, const PolicyChain& chain)>;

/// Runs T iterations and returns T + 1 records. When checkpoint_every > 0 the
/// callback receives the chain after every checkpoint_every-th iteration.
RunTrace run_optimizer(ProblemPtr problem, const RunConfig& config, std::uint64_t seed, int checkpoint_every = 0,
                       const CheckpointFn& on_checkpoint = {});

}  // namespace casbo
