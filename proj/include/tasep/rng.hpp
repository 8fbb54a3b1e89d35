#pragma once
#include <cmath>
#include <cstdint>
#include <limits>

namespace tasep {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based generator keyed by a tuple of integers. Draw k of the stream
// keyed (seed, a, b, c) never depends on how many draws other keys consumed.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
        : key_(mix64(mix64(mix64(mix64(seed) ^ a) ^ b) ^ c)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ ^ mix64(++ctr_)); }

    // uniform on [0,1)
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// identifies one independent run of the process
struct RngStream {
    std::uint64_t seed = 42;
    std::uint64_t stream = 0;
};

}  // namespace tasep
