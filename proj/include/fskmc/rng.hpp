#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace fskmc {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a sequence of identifiers into a single 64-bit key. Each component
/// is xor-ed into the running state and passed through one splitmix64 round,
/// so (a, b) and (b, a) give unrelated keys.
constexpr std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t state = 0x6a09e667f3bcc908ULL;
    std::uint64_t key = 0;
    for (std::uint64_t p : parts) {
        state ^= p;
        key = splitmix64(state);
        state = key;
    }
    return key;
}

/// Stream-role tags used as the second component of every key.
enum class StreamRole : std::uint64_t {
    ssa = 1,
    cell = 2,
    schedule = 3,
    initial = 4,
};

/// xoshiro256++ generator. The 256-bit state is filled from a 64-bit key by
/// four splitmix64 draws, so identical keys give identical streams on every
/// platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t key = 0) noexcept { reseed(key); }

    /// Stream for (base seed, replica, role, a, b, c).
    static RngStream keyed(std::uint64_t seed, std::uint64_t replica, StreamRole role,
                           std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
        return RngStream(mix_key({seed, replica, static_cast<std::uint64_t>(role), a, b, c}));
    }

    void reseed(std::uint64_t key) noexcept {
        std::uint64_t sm = key;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() noexcept {
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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe argument for log().
    double uniform_open_closed() noexcept { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    using result_type = std::uint64_t;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next(); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace fskmc
