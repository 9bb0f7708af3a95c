#pragma once

// Reproducible Gaussian draws.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. The engine is seeded with splitmix64(seed + stream * 0x9E3779B97F4A7C15)
// so that the noise and sketch streams differ even for equal user seeds.
// Normals come from the basic Box-Muller transform on 53-bit uniforms, taken
// in pairs (cos branch first). std::normal_distribution is not used because
// its algorithm is implementation-defined.

#include "regusolve/matcore.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace regusolve {

enum class RandomStream : std::uint64_t {
    noise  = 1,
    sketch = 2,
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class GaussianStream
{
public:
    GaussianStream(std::uint64_t seed, RandomStream stream)
        : engine_(splitmix64(seed + static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ull))
    {}

    double operator()()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle  = 2.0 * std::numbers::pi * u2;
        spare_     = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_   = 0.0;
    bool has_spare_ = false;
};

/// rows x cols standard Gaussian matrix, filled in column-major order.
inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, RandomStream stream)
{
    GaussianStream g(seed, stream);
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = g();
    return M;
}

inline Vector gaussian_vector(Index size, std::uint64_t seed, RandomStream stream)
{
    return gaussian_matrix(size, 1, seed, stream).col(0);
}

} // namespace regusolve
