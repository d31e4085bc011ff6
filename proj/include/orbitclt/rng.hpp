#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace orbitclt {

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Named seed derivation: the same (seed, label, index) always gives the same stream key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0)
{
    std::uint64_t h = splitmix64(seed);
    for (char c : label)
        h = splitmix64(h ^ static_cast<unsigned char>(c));
    return splitmix64(h ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: output i of stream (key, stream) is a pure function
/// of those three values, so any partition of work reproduces the same draws.
class CounterRng {
public:
    CounterRng(std::uint64_t key, std::uint64_t stream) : key_(splitmix64(key ^ splitmix64(stream))) {}

    std::uint64_t next() { return splitmix64(key_ + 0xD1B54A32D192ED03ULL * ++counter_); }

    /// Uniform on [0, n) without modulo bias.
    std::uint64_t uniform_index(std::uint64_t n)
    {
        if (n <= 1)
            return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform on (0, 1).
    double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal()
    {
        const double u = uniform01();
        const double v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925 * v);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace orbitclt
