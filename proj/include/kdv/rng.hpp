// Seeded random streams.  Ensemble member i draws from a stream derived from
// (master seed, i), so results do not depend on thread scheduling.  The
// gaussian uses an explicit Box-Muller on 53-bit uniforms to keep output
// independent of the standard library's distribution internals.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace kdv {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static RngStream derived(std::uint64_t master, std::uint64_t index) {
        return RngStream(splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    // uniform in (0, 1]
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace kdv
