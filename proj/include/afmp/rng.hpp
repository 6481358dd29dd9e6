// Counter-based RNG for reproducible parallel shot campaigns.
//
// Each (seed, stream) pair defines an independent stream whose outputs
// depend only on the stream's own counter, never on other streams or on
// thread scheduling. The output function is the splitmix64 finalizer
// applied to a Weyl sequence, which passes standard statistical batteries
// and is cheap enough to construct per shot.

#pragma once

#include <cmath>
#include <cstdint>

namespace afmp {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::splitmix64(detail::splitmix64(seed) ^
                                  detail::splitmix64(~stream))) {}

    std::uint64_t next() {
        std::uint64_t z = key_ + counter_ * 0x9E3779B97F4A7C15ULL;
        counter_++;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Zero-mean Gaussian draw via Box-Muller.
    double normal(double sigma) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return sigma * r * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace afmp
