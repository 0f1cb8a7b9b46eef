#pragma once

#include <cstdint>
#include <cmath>

namespace qmf::rng {

// Output scrambler of SplitMix64 (Steele et al.), also used for stream
// derivation hashing.
inline std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Independent stream seed from a master seed and up to three indices.
// Used to give every (segment, chunk) run its own deterministic stream.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = scramble(master ^ 0x9e3779b97f4a7c15ull);
    h = scramble(h ^ (a * 0xff51afd7ed558ccdull + 1));
    h = scramble(h ^ (b * 0xc4ceb9fe1a85ec53ull + 2));
    h = scramble(h ^ (c * 0x2545f4914f6cdd1dull + 3));
    return h;
}

// SplitMix64: counter-based 64-bit generator. The state advances by a fixed
// odd constant, so the k-th output is a pure function of (seed, k); sequences
// are identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return scramble(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Lemire's multiply-shift; bias is negligible
    // for the small ranges used here and the mapping is deterministic.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Standard normal via Box-Muller (not std::normal_distribution, whose
    // sequence is implementation-defined).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; // (0,1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qmf::rng
