#pragma once

#include <cstdint>

namespace smlab::numerics {

enum class Dist { uniform01, rademacher, std_normal };

// Deterministic substream generator: xoshiro256++ seeded through SplitMix64
// from (master_seed, stream_index). The same pair replays the same sequence
// on every run and thread schedule; distinct stream indices give statistically
// independent substreams.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return stream_; }

    std::uint64_t next_u64();
    double uniform01();      // in [0, 1), 53-bit resolution
    double rademacher();     // -1 or +1
    double std_normal();     // Box-Muller, second variate cached

    double draw(Dist d);

private:
    std::uint64_t master_;
    std::uint64_t stream_;
    std::uint64_t s_[4];
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace smlab::numerics
