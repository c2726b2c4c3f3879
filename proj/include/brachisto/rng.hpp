// rng.hpp — Seeded, labeled random streams.  Every stream is a pure function
// of (seed, label), so samples are reproducible and independent streams can be
// derived per trial instead of consuming a shared sequence.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace brachisto {

struct RngSeed {
    std::uint64_t value = 0;
    std::string label;

    RngSeed derive(std::string_view sublabel) const {
        RngSeed out{value, label};
        out.label += '/';
        out.label += sublabel;
        return out;
    }
};

// 64-bit digest of (seed, label); used to initialize streams and to tag
// experiment records with the stream they were drawn from.
std::uint64_t seed_digest(const RngSeed& seed);

// xoshiro256** seeded via splitmix64 from seed_digest.  Normal variates come
// from the basic Box-Muller transform, so the sequence is fixed by the stream
// state alone with no rejection steps.
class RngStream {
  public:
    explicit RngStream(const RngSeed& seed);
    RngStream(std::uint64_t value, std::string_view label)
        : RngStream(RngSeed{value, std::string(label)}) {}

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // standard normal

    const RngSeed& seed() const { return seed_; }
    RngStream fork(std::string_view sublabel) const { return RngStream(seed_.derive(sublabel)); }

  private:
    std::array<std::uint64_t, 4> state_{};
    RngSeed seed_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace brachisto
