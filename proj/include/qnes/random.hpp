#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qnes
{
    /// Seeded pseudo-random stream. Every stochastic operation takes one of
    /// these explicitly; nothing in the library touches global random state.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed = 0) : engine_(seed_sequence(seed)) {}

        double normal() { return normal_(engine_); }

        /// Uniform on [0, 1).
        double uniform() { return uniform_(engine_); }

        double uniform(double low, double high) { return low + (high - low) * uniform(); }

        double chi(int dof)
        {
            std::chi_squared_distribution<double> dist(static_cast<double>(dof));
            return std::sqrt(dist(engine_));
        }

        /// Derives an independent child stream. The parent advances, so
        /// repeated splits give distinct children.
        RandomStream split()
        {
            const std::uint64_t hi = engine_();
            const std::uint64_t lo = engine_();
            return RandomStream(hi ^ (lo << 1) ^ 0x9e3779b97f4a7c15ULL);
        }

        std::mt19937_64 &engine() { return engine_; }

    private:
        static std::mt19937_64 seed_sequence(std::uint64_t seed)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
            return std::mt19937_64(seq);
        }

        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
        std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    };
}
