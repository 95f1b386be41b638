#include "smlab/numerics/rng.hpp"

#include <cmath>

namespace smlab::numerics {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_(master_seed), stream_(stream_index) {
    // Key the SplitMix chain on both identifiers so that substreams decorrelate.
    std::uint64_t key = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
    s_[0] = splitmix64(key);
    s_[1] = splitmix64(key);
    s_[2] = splitmix64(key);
    s_[3] = splitmix64(key);
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::rademacher() {
    return (next_u64() >> 63) ? 1.0 : -1.0;
}

double RngStream::std_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform01();   // in (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

double RngStream::draw(Dist d) {
    switch (d) {
        case Dist::uniform01: return uniform01();
        case Dist::rademacher: return rademacher();
        default: return std_normal();
    }
}

} // namespace smlab::numerics
