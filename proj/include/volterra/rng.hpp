#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace volterra {

// splitmix64 step (Steele/Lea/Flood mixing constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream seed for (master seed, sample index, component). Streams are
// independent of evaluation order, so results do not depend on how samples
// are distributed over workers.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t sample, std::uint64_t component) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s) ^ (sample * 0xD6E8FEB86659FD93ULL);
    std::uint64_t b = splitmix64(a) ^ ((component + 1) * 0xCA5A826395121157ULL);
    return splitmix64(b);
}

// Deterministic N(0,1) stream: splitmix64 uniforms through Box-Muller.
// std::normal_distribution is implementation-defined and would break
// byte-identical artifacts, so the transform is pinned here.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1, u2 in (0,1): top 53 bits shifted into the open unit interval.
        const double u1 = (static_cast<double>(splitmix64(state_) >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = (static_cast<double>(splitmix64(state_) >> 11) + 0.5) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace volterra
