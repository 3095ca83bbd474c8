#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dwsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Inverse normal CDF, Wichura's AS241 (double precision). Used instead of
// std::normal_distribution so draws are identical across standard libraries.
double normal_icdf(double p);

// Counter-based per-sample stream: seeding from (master seed, sample index)
// makes campaign results independent of thread scheduling.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : gen_(splitmix64(master_seed ^ splitmix64(stream_index + 0x5851F42D4C957F2DULL))) {}

    explicit RngStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1), safe for inverse-CDF transforms
    double uniform_open() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(double sigma = 1.0) { return sigma * normal_icdf(uniform_open()); }

    // exponential with the given mean; uniform()=0 maps to exactly 0
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

private:
    std::mt19937_64 gen_;
};

}  // namespace dwsim
