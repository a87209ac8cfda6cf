#pragma once

#include <cstdint>
#include <vector>

namespace cbs {

// Deterministic random stream. All distributions are implemented here so that
// results are bit-identical for a given seed regardless of the standard
// library in use.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    // splitmix64
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n);

    // standard normal via Box-Muller (no cached second value, keeps the
    // stream position a pure function of the draw count)
    double normal();
    double normal(double mean, double std) { return mean + std * normal(); }

    // deterministic Fisher-Yates
    void shuffle(std::vector<std::size_t>& v);

    // derive an independent stream for a sub-task
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

private:
    std::uint64_t state_;
};

}  // namespace cbs
