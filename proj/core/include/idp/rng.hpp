#pragma once

#include <cstdint>

namespace idp {

/// SplitMix64 generator. Tiny state, seedable, and produces the same stream
/// on every platform, which keeps simulation results reproducible from a seed
/// alone (the standard <random> distributions give no such guarantee).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Derives an independent per-episode seed from (master, round, run).
/// The stream depends only on the three inputs, so episode results are
/// identical regardless of execution order or parallel scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t round,
                                        std::uint64_t run) {
    SplitMix64 g(master);
    SplitMix64 h(g.next() ^ (round + 1) * 0xD1342543DE82EF95ull);
    SplitMix64 i(h.next() ^ (run + 1) * 0xDABA0B6EB09322DBull);
    return i.next();
}

} // namespace idp
