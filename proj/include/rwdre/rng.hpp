#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rwdre
{
    /// SplitMix64 finalizer. A bijection on 64-bit words, used for all seed
    /// and stream-key mixing.
    constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
    class Xoshiro256
    {
    public:
        using result_type = std::uint64_t;

        constexpr explicit Xoshiro256(std::uint64_t key) noexcept
        {
            // State is four consecutive SplitMix64 outputs starting at key;
            // distinct keys give distinct first words and hence distinct states.
            std::uint64_t z = key;
            for (auto& word : s_)
            {
                word = splitmix64(z);
                z += 0x9e3779b97f4a7c15ULL;
            }
        }

        static constexpr result_type min() noexcept { return 0; }
        static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

        constexpr result_type operator()() noexcept
        {
            const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
            const std::uint64_t t = s_[1] << 17;
            s_[2] ^= s_[0];
            s_[3] ^= s_[1];
            s_[1] ^= s_[2];
            s_[0] ^= s_[3];
            s_[2] ^= t;
            s_[3] = rotl(s_[3], 45);
            return result;
        }

        friend constexpr bool operator==(const Xoshiro256&, const Xoshiro256&) = default;

    private:
        static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
        {
            return (x << k) | (x >> (64 - k));
        }

        std::uint64_t s_[4]{};
    };

    /// Uniform double in [0, 1) with 53 random bits.
    inline double uniform01(Xoshiro256& rng) noexcept
    {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1].
    inline double uniform_open_closed(Xoshiro256& rng) noexcept
    {
        return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    }

    // Inversion rather than std::exponential_distribution: the latter's
    // algorithm is implementation-defined and would break cross-platform
    // reproducibility of recorded runs.
    inline double exponential(Xoshiro256& rng, double rate) noexcept
    {
        return -std::log(uniform_open_closed(rng)) / rate;
    }
} // namespace rwdre
