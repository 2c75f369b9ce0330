#pragma once

#include <cmath>
#include <cstdint>

namespace phi4 {

/// Counter-based RNG: every variate is a pure function of
/// (seed, stream, index, sub).  No state is carried between draws, so
/// Monte Carlo output is independent of worker count and evaluation order.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t index, std::uint64_t sub) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
    h = splitmix64(h ^ stream * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(h ^ index * 0xd1342543de82ef95ULL);
    h = splitmix64(h ^ sub * 0xaf251af3b0f025b5ULL);
    return h;
}

/// Uniform in (0,1), never exactly 0 or 1.
inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index, std::uint64_t sub) {
    std::uint64_t bits = hash_counter(seed, stream, index, sub);
    double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    if (u <= 0.0) u = 0x1.0p-53;
    return u;
}

/// Standard normal pair via Box-Muller from counters (sub, sub+1).
inline void normal_pair(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t index, std::uint64_t sub,
                        double& g0, double& g1) {
    const double u1 = uniform(seed, stream, index, sub);
    const double u2 = uniform(seed, stream, index, sub + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    g0 = r * std::cos(a);
    g1 = r * std::sin(a);
}

inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index, std::uint64_t sub) {
    double g0, g1;
    normal_pair(seed, stream, index, 2 * sub, g0, g1);
    return g0;
}

}  // namespace rng

/// Convenience stateful view over the counter RNG for sequential draws
/// (test utilities, samplers with a single consumer).
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
        : seed_(seed), stream_(stream), index_(index) {}

    double uniform() { return rng::uniform(seed_, stream_, index_, sub_++); }
    double normal() {
        double g0, g1;
        rng::normal_pair(seed_, stream_, index_, sub_, g0, g1);
        sub_ += 2;
        return g0;
    }

  private:
    std::uint64_t seed_, stream_, index_;
    std::uint64_t sub_ = 0;
};

}  // namespace phi4
