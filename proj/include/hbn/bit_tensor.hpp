// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hbn {

// Densely packed bit array, 8 bits per byte, least-significant bit first.
class BitArray {
public:
    BitArray() = default;
    explicit BitArray(std::uint64_t n_bits)
        : n_bits_(n_bits), bytes_((n_bits + 7) / 8, 0) {}

    std::uint64_t size() const { return n_bits_; }

    bool get(std::uint64_t i) const {
        return (bytes_[i >> 3] >> (i & 7)) & 1;
    }

    void set(std::uint64_t i, bool v) {
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (i & 7));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    // Thread-safe OR of a 1 bit. Concurrent writers touching disjoint bits of
    // a shared byte commute, so the final bytes are scheduling-independent.
    void set_atomic(std::uint64_t i) {
        std::atomic_ref<std::uint8_t> byte(bytes_[i >> 3]);
        byte.fetch_or(static_cast<std::uint8_t>(1u << (i & 7)), std::memory_order_relaxed);
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

    bool operator==(const BitArray&) const = default;

private:
    std::uint64_t n_bits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

// Index ranges of the response tensor X[s,i,c,r,n,t]; the linear bit index
// runs t fastest, then n, r, c, i, s.
struct TensorDims {
    std::uint32_t n_classes = 0;
    std::uint32_t n_instances = 0;
    std::uint32_t n_challenges = 0;
    std::uint32_t n_repeats = 0;
    std::uint32_t n_nodes = 0;
    std::uint32_t n_times = 0;

    std::uint64_t total_bits() const {
        return static_cast<std::uint64_t>(n_classes) * n_instances * n_challenges *
               n_repeats * n_nodes * n_times;
    }

    std::uint64_t trajectory_count() const {
        return static_cast<std::uint64_t>(n_classes) * n_instances * n_challenges * n_repeats;
    }

    std::uint64_t bit_index(std::uint32_t s, std::uint32_t i, std::uint32_t c,
                            std::uint32_t r, std::uint32_t n, std::uint32_t t) const {
        std::uint64_t idx = s;
        idx = idx * n_instances + i;
        idx = idx * n_challenges + c;
        idx = idx * n_repeats + r;
        idx = idx * n_nodes + n;
        idx = idx * n_times + t;
        return idx;
    }

    bool operator==(const TensorDims&) const = default;
};

} // namespace hbn
