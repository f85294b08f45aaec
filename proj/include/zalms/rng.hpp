#pragma once

#include <array>
#include <cstdint>
#include <cmath>

namespace zalms {

/**
 * Counter-based pseudo-random generator (Philox4x64, 10 rounds).
 *
 * The generator is a pure function from (counter, key) to four 64-bit
 * words, so a stream is addressed rather than evolved: draw k of stream
 * (master_seed, stream_id) is always the same number, no matter which
 * other streams were consumed, in which order, or on which thread.  That
 * property is what makes ensemble runs reproducible and order-independent
 * under parallel execution.
 *
 * The round function matches the reference Philox4x64-10 (Random123, also
 * used by NumPy), verified against published known-answer vectors in the
 * unit tests.
 */
struct Philox4x64 {
    using Block = std::array<std::uint64_t, 4>;
    using Key   = std::array<std::uint64_t, 2>;

    /// Encrypt one counter block under the given key (10 rounds).
    static Block generate(Block counter, Key key) {
        constexpr std::uint64_t mult0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t mult1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t bump0 = 0x9E3779B97F4A7C15ULL; // golden-ratio Weyl increments
        constexpr std::uint64_t bump1 = 0xBB67AE8584CAA73BULL;
        for (int round = 0; round < 10; ++round) {
            const auto p0 = static_cast<unsigned __int128>(mult0) * counter[0];
            const auto p1 = static_cast<unsigned __int128>(mult1) * counter[2];
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            counter = {hi1 ^ counter[1] ^ key[0], lo1,
                       hi0 ^ counter[3] ^ key[1], lo0};
            key[0] += bump0;
            key[1] += bump1;
        }
        return counter;
    }
};

/**
 * A single logical stream of uniform and standard-Gaussian draws, keyed by
 * (master_seed, stream_id).
 *
 * Distinct (master_seed, stream_id) pairs give statistically independent
 * streams; the same pair always reproduces the same sequence bit-for-bit.
 * Gaussian draws use the Box-Muller transform on 53-bit uniforms, with the
 * radius uniform mapped into (0, 1] so the logarithm is always finite.
 *
 * A stream is single-consumer; drive distinct streams from distinct
 * threads without coordination.
 */
class GaussianStream {
public:
    GaussianStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{master_seed, stream_id} {}

    /// Next uniform draw in (0, 1].
    double next_uniform() {
        const std::uint64_t bits = next_bits();
        return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
    }

    /// Next standard Gaussian draw, N(0, 1).
    double next() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        // Angle uniform may include 0, so take the half-open variant.
        const double u2 = static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle  = 2.0 * M_PI * u2;
        cached_      = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t next_bits() {
        if (word_ == 4) {
            buffer_ = Philox4x64::generate({block_++, 0, 0, 0}, key_);
            word_   = 0;
        }
        return buffer_[word_++];
    }

    Philox4x64::Key key_;
    Philox4x64::Block buffer_{};
    std::uint64_t block_ = 0;
    int word_            = 4; // buffer empty until first refill
    double cached_       = 0.0;
    bool have_cached_    = false;
};

} // namespace zalms
