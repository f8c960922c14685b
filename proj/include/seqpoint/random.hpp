#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace seqpoint {

/// Seeded source with a platform-independent output sequence.
///
/// Only std::mt19937_64 raw output is used (its sequence is fixed by the
/// standard); every derived variate is computed here rather than through
/// std::*_distribution, whose algorithms vary between standard libraries.
///   uniform(): top 53 bits of one draw scaled to [0, 1)
///   normal():  Box-Muller over two uniform() draws, cosine branch
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace seqpoint
