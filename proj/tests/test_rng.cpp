// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "hbn/rng.hpp"

using hbn::rng::GaussStream;
using hbn::rng::Purpose;
using hbn::rng::Stream;

TEST_CASE("philox4x32-10 matches the published known-answer vectors") {
    // Random123 kat_vectors, philox4x32 rounds=10.
    auto out = hbn::rng::philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    out = hbn::rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
    CHECK(out == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    out = hbn::rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
    CHECK(out == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and keyed by every index") {
    Stream a(42, Purpose::Noise, 1, 2, 3, 4);
    Stream b(42, Purpose::Noise, 1, 2, 3, 4);
    for (int k = 0; k < 100; ++k) REQUIRE(a.next_u64() == b.next_u64());

    const auto first = [](Stream s) { return s.next_u64(); };
    const std::uint64_t base = first(Stream(42, Purpose::Noise, 1, 2, 3, 4));
    CHECK(first(Stream(43, Purpose::Noise, 1, 2, 3, 4)) != base);
    CHECK(first(Stream(42, Purpose::InstTau, 1, 2, 3, 4)) != base);
    CHECK(first(Stream(42, Purpose::Noise, 0, 2, 3, 4)) != base);
    CHECK(first(Stream(42, Purpose::Noise, 1, 0, 3, 4)) != base);
    CHECK(first(Stream(42, Purpose::Noise, 1, 2, 0, 4)) != base);
    CHECK(first(Stream(42, Purpose::Noise, 1, 2, 3, 0)) != base);
}

TEST_CASE("index limits are enforced") {
    CHECK_THROWS_AS(Stream(1, Purpose::Noise, Stream::kMaxClass + 1), std::invalid_argument);
    CHECK_THROWS_AS(Stream(1, Purpose::Noise, 0, 70000), std::invalid_argument);
    CHECK_THROWS_AS(Stream(1, Purpose::Noise, 0, 0, 0, 70000), std::invalid_argument);
    CHECK_NOTHROW(Stream(1, Purpose::Noise, Stream::kMaxClass, 65535, 0xffffffffu, 65535));
}

TEST_CASE("next_double is uniform on [0,1)") {
    Stream s(7, Purpose::Challenge);
    const int n = 100000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = s.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // mean 1/2, std 1/sqrt(12n)
    CHECK(std::abs(sum / n - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("next_below is unbiased and in range") {
    Stream s(7, Purpose::Topology);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int k = 0; k < n; ++k) ++counts[s.next_below(7)];
    for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
    CHECK_THROWS_AS(s.next_below(0), std::invalid_argument);
}

TEST_CASE("gaussian draws have the right first two moments") {
    GaussStream g{Stream(11, Purpose::Noise)};
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = g.next();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gaussian stream is reproducible") {
    GaussStream a{Stream(5, Purpose::Noise, 1)};
    GaussStream b{Stream(5, Purpose::Noise, 1)};
    for (int k = 0; k < 1000; ++k) REQUIRE(a.next() == b.next());
}
