#pragma once

#include <cstdint>
#include <limits>

namespace srwlt {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-replica random stream: xoshiro256** keyed by (master_seed, stream_index).
///
/// The key is formed by two rounds of SplitMix64 mixing over both words, so
/// neighbouring seeds or indices never produce overlapping state (unlike
/// seed + index arithmetic). The 256-bit state is then filled from a
/// SplitMix64 sequence started at the key. The step sequence is a pure
/// function of the pair on every platform.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t key = mix64(mix64(master_seed + 0x9e3779b97f4a7c15ULL) ^
                                  (stream_index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
        key = mix64(key);
        for (auto& word : state_) {
            key += 0x9e3779b97f4a7c15ULL;
            word = mix64(key);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }

    result_type next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// One fair bit; 64 bits are drawn per underlying call.
    bool bit() noexcept {
        if (bits_left_ == 0) {
            bit_buffer_ = next();
            bits_left_ = 64;
        }
        const bool b = bit_buffer_ & 1U;
        bit_buffer_ >>= 1;
        --bits_left_;
        return b;
    }

    /// The next 64 bits of the bit() sequence, packed LSB first.
    std::uint64_t bits64() noexcept {
        if (bits_left_ == 0) return next();
        if (bits_left_ == 64) {
            bits_left_ = 0;
            return bit_buffer_;
        }
        const std::uint64_t w = next();
        const std::uint64_t out = bit_buffer_ | (w << bits_left_);
        bit_buffer_ = w >> (64 - bits_left_);
        return out;
    }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t state_[4]{};
    std::uint64_t bit_buffer_ = 0;
    int bits_left_ = 0;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t replica_index) noexcept {
    return RngStream(master_seed, replica_index);
}

/// Layout of the 64-bit stream index used by the estimators: a purpose tag in
/// the top 16 bits, a stratum in the next 16, the replica in the low 32.
constexpr std::uint64_t stream_id(std::uint64_t tag, std::uint64_t stratum, std::uint64_t replica) noexcept {
    return (tag << 48) | ((stratum & 0xffffULL) << 32) | (replica & 0xffffffffULL);
}

} // namespace srwlt
