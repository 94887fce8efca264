#pragma once

#include <cstdint>
#include <random>

namespace casbo {

// 64-bit seeded stream. Streams derived with split() are decorrelated by
// passing (seed, stream) through splitmix64 before seeding the engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double standard_normal() { return normal_(engine_); }

    Rng split(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace casbo
