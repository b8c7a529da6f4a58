#pragma once

#include <cstdint>

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so results do not depend on how work is
// chunked across threads or calls.
namespace tceq {

// splitmix64 output function.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix64(seed ^ mix64(stream * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull))) {}

    // uniform on (0,1), strictly inside the open interval
    double uniform(std::uint64_t counter) const {
        const std::uint64_t bits = mix64(base_ + counter * 0xD1B54A32D192ED03ull);
        return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // standard normal via the inverse CDF
    double normal(std::uint64_t counter) const { return inverse_normal_cdf(uniform(counter)); }

    // Wichura's PPND16 rational approximation of the standard normal quantile,
    // accurate to ~1e-16 relative for p in (0,1).
    static double inverse_normal_cdf(double p);

private:
    std::uint64_t base_;
};

}  // namespace tceq
