// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#include <catch2/catch_amalgamated.hpp>

#include "hbn/rng.hpp"
#include "hbn/topology.hpp"

using hbn::generate_random_regular;
using hbn::Topology;
using hbn::rng::Purpose;
using hbn::rng::Stream;

TEST_CASE("4 nodes at degree 3 is always K4") {
    for (std::uint64_t seed : {1, 2, 3, 99}) {
        Stream s(seed, Purpose::Topology);
        const Topology topo = generate_random_regular(4, 3, s);
        REQUIRE(topo.n_nodes == 4);
        for (std::uint32_t n = 0; n < 4; ++n) {
            std::vector<std::uint32_t> expected;
            for (std::uint32_t m = 0; m < 4; ++m)
                if (m != n) expected.push_back(m);
            CHECK(topo.pred[n] == expected);
        }
    }
}

TEST_CASE("infeasible parameters are rejected") {
    Stream s(1, Purpose::Topology);
    CHECK_THROWS_AS(generate_random_regular(5, 3, s), std::invalid_argument); // odd stubs
    CHECK_THROWS_AS(generate_random_regular(3, 3, s), std::invalid_argument); // degree >= n
    CHECK_THROWS_AS(generate_random_regular(4, 0, s), std::invalid_argument);
}

TEST_CASE("generation is deterministic in the stream key") {
    Stream a(123, Purpose::Topology, 5);
    Stream b(123, Purpose::Topology, 5);
    const Topology ta = generate_random_regular(256, 3, a);
    const Topology tb = generate_random_regular(256, 3, b);
    CHECK(ta.pred == tb.pred);

    Stream c(123, Purpose::Topology, 6);
    const Topology tc = generate_random_regular(256, 3, c);
    CHECK(ta.pred != tc.pred);
}

TEST_CASE("generated topologies satisfy every invariant") {
    for (std::uint32_t seed = 0; seed < 25; ++seed) {
        for (auto [n, k] : {std::pair{8u, 3u}, {16u, 3u}, {10u, 4u}, {64u, 3u}}) {
            Stream s(seed, Purpose::Topology, seed);
            const Topology topo = generate_random_regular(n, k, s);
            CAPTURE(n, k, seed);
            CHECK(hbn::validate(topo).empty());
            CHECK(topo.undirected_edges().size() == static_cast<std::size_t>(n) * k / 2);
        }
    }
}

TEST_CASE("validate reports each violation kind") {
    Stream s(9, Purpose::Topology);
    Topology topo = generate_random_regular(8, 3, s);
    REQUIRE(hbn::validate(topo).empty());

    SECTION("self-loop") {
        topo.pred[0][0] = 0;
        const auto v = hbn::validate(topo);
        REQUIRE_FALSE(v.empty());
        bool found = false;
        for (const auto& msg : v) found |= msg.find("self-loop at 0") != std::string::npos;
        CHECK(found);
    }
    SECTION("degree mismatch") {
        topo.pred[1].pop_back();
        const auto v = hbn::validate(topo);
        bool found = false;
        for (const auto& msg : v) found |= msg.find("degree mismatch at 1") != std::string::npos;
        CHECK(found);
    }
    SECTION("duplicate predecessor") {
        topo.pred[2][1] = topo.pred[2][0];
        const auto v = hbn::validate(topo);
        bool found = false;
        for (const auto& msg : v) found |= msg.find("duplicate predecessor") != std::string::npos;
        CHECK(found);
    }
    SECTION("asymmetric edge") {
        // Point node 3 at a node that does not point back.
        for (std::uint32_t m = 0; m < topo.n_nodes; ++m) {
            auto& p = topo.pred[3];
            if (std::find(p.begin(), p.end(), m) == p.end() && m != 3) {
                p[0] = m;
                break;
            }
        }
        const auto v = hbn::validate(topo);
        bool found = false;
        for (const auto& msg : v) found |= msg.find("asymmetric edge") != std::string::npos;
        CHECK(found);
    }
}
