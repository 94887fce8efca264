#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "policy.hpp"

namespace casbo {

struct RolloutState {
    int k = 0;  // steps consumed so far
    Vector y;   // hidden evaluation point
};

// A sequential black-box problem: f_k depends on the prefix x_1..x_k through
// dynamics the optimizer never sees. Implementations are immutable after
// construction; all per-rollout state lives in RolloutState.
class SequentialProblem {
public:
    virtual ~SequentialProblem() = default;

    virtual int K() const = 0;
    virtual int dim() const = 0;

    // True when independent rollouts may run concurrently.
    virtual bool evaluation_safe() const { return true; }

    RolloutState begin_rollout() const;

    // Consumes x_k for k = state.k + 1 and returns f_k. Must be called exactly
    // K times per rollout.
    double advance(RolloutState& state, const Eigen::Ref<const Vector>& x) const;

protected:
    // Updates state.y for step k (1-based) and returns the score.
    virtual double step(int k, Vector& y, const Eigen::Ref<const Vector>& x) const = 0;
};

using ProblemPtr = std::shared_ptr<const SequentialProblem>;
using Objective = std::function<double(const Vector&)>;

double rastrigin10(const Vector& x);
double l1_ellipsoid(const Vector& x);
double levy(const Vector& x);

/// Orthogonal d x d matrix from Gram-Schmidt on a seeded standard-normal matrix.
Matrix seeded_rotation(int d, std::uint64_t seed);

// y_k = Q (y_{k-1} + x_k) + sqrt(k+1) * 1, y_0 = 0, score base(y_k).
ProblemPtr make_rotation_problem(Objective base, int K, int d, std::uint64_t seed);

// Toy denoiser: the frozen predictor is a_k * x, the solver injects
// sigma_k * x_k, and F scores the intermediate state.
struct ToyDiffusionModel {
    std::vector<double> contraction;    // a_k, applied to the previous state at step k
    std::vector<double> solver_coeffs;  // sigma_k > 0
    Objective terminal_target;          // F

    // a_k = 0.9, sigma_k = 0.5 * 0.8^(K-k).
    static ToyDiffusionModel with_defaults(int K, Objective target);
};

// x~_k = a_k * x~_{k-1} + sigma_k * x_k, x~_0 = 0, score F(x~_k).
ProblemPtr make_toy_diffusion_problem(ToyDiffusionModel model, int K, int d);

// Wraps a problem so that maximizing the inner scores becomes minimization.
ProblemPtr make_negated_problem(ProblemPtr inner);

/// Scores for one d x K trajectory.
Vector rollout(const SequentialProblem& problem, const Matrix& trajectory);

/// K x N score matrix, entry (k, j) = f_k of candidate trajectory j.
Matrix rollout_batch(const SequentialProblem& problem, const TrajectoryBatch& batch);

// Registry: "rastrigin10", "l1ellipsoid", "levy" (rotation dynamics) and
// "toy-diffusion" (default model, F = ||x - x*||^2 with x* ~ N(0, I) drawn
// from the seed).
ProblemPtr make_problem(const std::string& name, int K, int d, std::uint64_t seed);
const std::vector<std::string>& problem_names();

}  // namespace casbo
