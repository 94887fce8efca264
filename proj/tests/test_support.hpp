#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "linalg.hpp"
#include "problems.hpp"
#include "rng.hpp"

namespace casbo::fixtures {

inline Matrix random_gaussian(int rows, int cols, Rng& rng)
{
    Matrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            m(r, c) = rng.standard_normal();
    return m;
}

// A A^T / d + shift I: well-conditioned SPD.
inline Matrix random_spd(int d, Rng& rng, double shift = 0.5)
{
    const Matrix a = random_gaussian(d, d, rng);
    Matrix m = a * a.transpose() / static_cast<double>(d) + shift * Matrix::Identity(d, d);
    return 0.5 * (m + m.transpose());
}

// Memoryless problem f_k(x_bar_k) = F(x_k): toy diffusion with a_k = 0, sigma_k = 1.
inline ProblemPtr memoryless(int K, int d, Objective F)
{
    ToyDiffusionModel model;
    model.contraction.assign(K, 0.0);
    model.solver_coeffs.assign(K, 1.0);
    model.terminal_target = std::move(F);
    return make_toy_diffusion_problem(std::move(model), K, d);
}

inline double sphere(const Vector& x) { return x.squaredNorm(); }

// Problem with caller-supplied per-step scoring; counts scoring calls.
class LambdaProblem final : public SequentialProblem {
public:
    using StepFn = std::function<double(int k, Vector& y, const Eigen::Ref<const Vector>& x)>;

    LambdaProblem(int K, int d, StepFn fn) : K_(K), d_(d), fn_(std::move(fn)) {}

    int K() const override { return K_; }
    int dim() const override { return d_; }
    long calls() const { return *calls_; }

protected:
    double step(int k, Vector& y, const Eigen::Ref<const Vector>& x) const override
    {
        ++*calls_;
        return fn_(k, y, x);
    }

private:
    int K_;
    int d_;
    StepFn fn_;
    std::shared_ptr<long> calls_ = std::make_shared<long>(0);
};

}  // namespace casbo::fixtures
