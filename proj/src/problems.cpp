#include "problems.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace casbo {

RolloutState SequentialProblem::begin_rollout() const { return {0, Vector::Zero(dim())}; }

double SequentialProblem::advance(RolloutState& state, const Eigen::Ref<const Vector>& x) const
{
    require(state.k < K(), "rollout already consumed all K steps");
    require(x.size() == dim(), "candidate dimension does not match problem");
    ++state.k;
    return step(state.k, state.y, x);
}

namespace {

// 10^((i-1)/(d-1)) style exponent in [0, 1]; d == 1 uses 0.
double scale_exponent(Eigen::Index i, Eigen::Index d)
{
    return d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
}

void require_nonempty(const Vector& x) { require(x.size() > 0, "objective input must be non-empty"); }

}  // namespace

double rastrigin10(const Vector& x)
{
    require_nonempty(x);
    const Eigen::Index d = x.size();
    double sum = 10.0 * static_cast<double>(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double v = std::pow(10.0, scale_exponent(i, d)) * x(i);
        sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    }
    return sum;
}

double l1_ellipsoid(const Vector& x)
{
    require_nonempty(x);
    const Eigen::Index d = x.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        sum += std::pow(10.0, 6.0 * scale_exponent(i, d)) * std::abs(x(i));
    return sum;
}

double levy(const Vector& x)
{
    require_nonempty(x);
    using std::numbers::pi;
    const Eigen::Index d = x.size();
    auto w = [&](Eigen::Index i) { return 1.0 + (x(i) - 1.0) / 4.0; };
    auto sq = [](double v) { return v * v; };

    double sum = sq(std::sin(pi * w(0)));
    for (Eigen::Index i = 0; i + 1 < d; ++i)
        sum += sq(w(i) - 1.0) * (1.0 + 10.0 * sq(std::sin(pi * w(i) + 1.0)));
    const double wd = w(d - 1);
    sum += sq(wd - 1.0) * (1.0 + sq(std::sin(2.0 * pi * wd)));
    return sum;
}

Matrix seeded_rotation(int d, std::uint64_t seed)
{
    require(d >= 1, "rotation dimension must be positive");
    // Separate stream from the optimizer's, which may use the same seed.
    Rng rng = Rng(seed).split(0x0707a7e);
    Matrix a(d, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r)
            a(r, c) = rng.standard_normal();

    // Modified Gram-Schmidt, column by column; dividing by the positive norm
    // fixes the sign so the triangular factor has a positive diagonal.
    Matrix q = a;
    for (int c = 0; c < d; ++c) {
        for (int p = 0; p < c; ++p)
            q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
        const double norm = q.col(c).norm();
        if (!(norm > 1e-12))
            fail(ErrorCode::Numeric, "rotation: Gaussian matrix is numerically rank deficient");
        q.col(c) /= norm;
    }
    return q;
}

namespace {

class RotationProblem final : public SequentialProblem {
public:
    RotationProblem(Objective base, int K, int d, std::uint64_t seed)
        : base_(std::move(base)), K_(K), d_(d), q_(seeded_rotation(d, seed))
    {
    }

    int K() const override { return K_; }
    int dim() const override { return d_; }

protected:
    double step(int k, Vector& y, const Eigen::Ref<const Vector>& x) const override
    {
        Vector next = q_ * (y + x);
        next.array() += std::sqrt(static_cast<double>(k + 1));
        y = std::move(next);
        return base_(y);
    }

private:
    Objective base_;
    int K_;
    int d_;
    Matrix q_;
};

class ToyDiffusionProblem final : public SequentialProblem {
public:
    ToyDiffusionProblem(ToyDiffusionModel model, int K, int d) : model_(std::move(model)), K_(K), d_(d) {}

    int K() const override { return K_; }
    int dim() const override { return d_; }

protected:
    double step(int k, Vector& y, const Eigen::Ref<const Vector>& x) const override
    {
        y = model_.contraction[k - 1] * y + model_.solver_coeffs[k - 1] * x;
        return model_.terminal_target(y);
    }

private:
    ToyDiffusionModel model_;
    int K_;
    int d_;
};

class NegatedProblem final : public SequentialProblem {
public:
    explicit NegatedProblem(ProblemPtr inner) : inner_(std::move(inner)) {}

    int K() const override { return inner_->K(); }
    int dim() const override { return inner_->dim(); }
    bool evaluation_safe() const override { return inner_->evaluation_safe(); }

protected:
    double step(int k, Vector& y, const Eigen::Ref<const Vector>& x) const override
    {
        RolloutState inner_state{k - 1, y};
        const double score = inner_->advance(inner_state, x);
        y = std::move(inner_state.y);
        return -score;
    }

private:
    ProblemPtr inner_;
};

}  // namespace

ProblemPtr make_rotation_problem(Objective base, int K, int d, std::uint64_t seed)
{
    require(static_cast<bool>(base), "rotation problem needs a base function");
    require(K >= 1, "K must be >= 1");
    require(d >= 2, "rotation dynamics need d >= 2");
    return std::make_shared<RotationProblem>(std::move(base), K, d, seed);
}

ToyDiffusionModel ToyDiffusionModel::with_defaults(int K, Objective target)
{
    require(K >= 1, "K must be >= 1");
    ToyDiffusionModel model;
    model.contraction.assign(K, 0.9);
    model.solver_coeffs.resize(K);
    for (int k = 1; k <= K; ++k)
        model.solver_coeffs[k - 1] = 0.5 * std::pow(0.8, K - k);
    model.terminal_target = std::move(target);
    return model;
}

ProblemPtr make_toy_diffusion_problem(ToyDiffusionModel model, int K, int d)
{
    require(K >= 1, "K must be >= 1");
    require(d >= 1, "d must be >= 1");
    require(model.contraction.size() == static_cast<std::size_t>(K),
            "toy diffusion: expected K contraction coefficients");
    require(model.solver_coeffs.size() == static_cast<std::size_t>(K),
            "toy diffusion: expected K solver coefficients");
    for (double s : model.solver_coeffs)
        require(s > 0.0 && std::isfinite(s), "toy diffusion: solver coefficients must be positive");
    for (double a : model.contraction)
        require(std::isfinite(a), "toy diffusion: contraction coefficients must be finite");
    require(static_cast<bool>(model.terminal_target), "toy diffusion needs a target function");
    return std::make_shared<ToyDiffusionProblem>(std::move(model), K, d);
}

ProblemPtr make_negated_problem(ProblemPtr inner)
{
    require(inner != nullptr, "negated problem needs an inner problem");
    return std::make_shared<NegatedProblem>(std::move(inner));
}

Vector rollout(const SequentialProblem& problem, const Matrix& trajectory)
{
    require(trajectory.rows() == problem.dim() && trajectory.cols() == problem.K(),
            "trajectory shape does not match problem dims");
    Vector scores(problem.K());
    RolloutState state = problem.begin_rollout();
    for (int k = 0; k < problem.K(); ++k)
        scores(k) = problem.advance(state, trajectory.col(k));
    return scores;
}

Matrix rollout_batch(const SequentialProblem& problem, const TrajectoryBatch& batch)
{
    require(batch.K() == problem.K() && batch.dim() == problem.dim(),
            "batch dimensions do not match problem dims");
    const int K = batch.K();
    const int N = batch.N();
    Matrix scores(K, N);
    for (int j = 0; j < N; ++j) {
        RolloutState state = problem.begin_rollout();
        for (int k = 0; k < K; ++k)
            scores(k, j) = problem.advance(state, batch.x[k].col(j));
    }
    return scores;
}

const std::vector<std::string>& problem_names()
{
    static const std::vector<std::string> names{"rastrigin10", "l1ellipsoid", "levy", "toy-diffusion"};
    return names;
}

ProblemPtr make_problem(const std::string& name, int K, int d, std::uint64_t seed)
{
    if (name == "rastrigin10")
        return make_rotation_problem(rastrigin10, K, d, seed);
    if (name == "l1ellipsoid")
        return make_rotation_problem(l1_ellipsoid, K, d, seed);
    if (name == "levy")
        return make_rotation_problem(levy, K, d, seed);
    if (name == "toy-diffusion") {
        require(K >= 1 && d >= 1, "K and d must be >= 1");
        Rng rng = Rng(seed).split(0x7a26e7);
        Vector target(d);
        for (int i = 0; i < d; ++i)
            target(i) = rng.standard_normal();
        auto F = [target](const Vector& x) { return (x - target).squaredNorm(); };
        return make_toy_diffusion_problem(ToyDiffusionModel::with_defaults(K, F), K, d);
    }
    fail(ErrorCode::InvalidInput, "unknown problem '" + name + "'");
}

}  // namespace casbo
