// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

// Counter-based random streams (Philox4x32-10, Salmon et al. SC'11).
// Every random draw in the simulator comes from a Stream addressed by
// (master_seed, purpose, class, instance, challenge, repeat), so results
// never depend on thread scheduling or evaluation order.

namespace hbn::rng {

enum class Purpose : std::uint32_t {
    Topology = 1,
    ClassDelay = 2,
    InstTau = 3,
    InstDelay = 4,
    Challenge = 5,
    Noise = 6,
};

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

} // namespace detail

// One 10-round Philox4x32 block: 128 counter bits, 64 key bits -> 128 random bits.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        detail::mulhilo32(kM0, ctr[0], lo0, hi0);
        detail::mulhilo32(kM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

// A deterministic random stream. The stream identity is encoded directly in
// the Philox counter words, so distinct (purpose, s, i, c, r) tuples can
// never collide:
//   ctr = [block, challenge, instance<<16 | repeat, purpose<<28 | class]
//   key = master_seed
class Stream {
public:
    static constexpr std::uint32_t kMaxClass = (1u << 28) - 1;
    static constexpr std::uint32_t kMaxInstance = 0xFFFFu;
    static constexpr std::uint32_t kMaxRepeat = 0xFFFFu;

    Stream(std::uint64_t master_seed, Purpose purpose, std::uint32_t s = 0,
           std::uint32_t i = 0, std::uint32_t c = 0, std::uint32_t r = 0) {
        if (s > kMaxClass) throw std::invalid_argument("rng: class index exceeds 2^28-1");
        if (i > kMaxInstance) throw std::invalid_argument("rng: instance index exceeds 65535");
        if (r > kMaxRepeat) throw std::invalid_argument("rng: repeat index exceeds 65535");
        key_ = {static_cast<std::uint32_t>(master_seed),
                static_cast<std::uint32_t>(master_seed >> 32)};
        id_ = {0u, c, (i << 16) | r, (static_cast<std::uint32_t>(purpose) << 28) | s};
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer on [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("rng: next_below(0)");
        const std::uint64_t reject_below = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v >= reject_below) return v % bound;
        }
    }

private:
    void refill() {
        std::array<std::uint32_t, 4> ctr = id_;
        ctr[0] = block_;
        buf_ = philox4x32(ctr, key_);
        pos_ = 0;
        if (++block_ == 0) throw std::runtime_error("rng: stream exhausted");
    }

    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> id_{};
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

// Standard-normal draws via Box-Muller; pairs are cached so consumption
// stays strictly sequential on the underlying stream.
class GaussStream {
public:
    explicit GaussStream(Stream stream) : stream_(stream) {}

    double next() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // u1 in (0,1] keeps log() finite.
        const double u1 = static_cast<double>((stream_.next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = stream_.next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

private:
    Stream stream_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace hbn::rng
