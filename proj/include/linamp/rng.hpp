#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace linamp {

/// splitmix64 finalizer; scrambles a 64-bit value into a well-mixed seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded random stream with a portable normal sampler.
///
/// The bit stream of std::mt19937_64 is fixed by the standard, and the
/// Gaussian variates are produced by an explicit Box-Muller transform rather
/// than std::normal_distribution (whose algorithm is implementation-defined),
/// so identical seeds give identical outcome sequences everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    /// Independent stream for one trajectory of a seeded ensemble.
    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
        return Rng(mix64(master_seed + 0x9e3779b97f4a7c15ULL * (stream + 1)));
    }

    std::uint64_t seed() const { return seed_; }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Standard normal variate (Box-Muller, pairs cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // u1 in (0,1] so the log is finite
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 gen_;
    std::uint64_t seed_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace linamp
