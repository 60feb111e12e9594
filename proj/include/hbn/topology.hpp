// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hbn/rng.hpp"

namespace hbn {

// Directed realization of a simple undirected k-regular graph. Each
// undirected edge {n,m} contributes the two directed edges n<-m and m<-n,
// which carry independent delays downstream. Predecessor lists are kept
// sorted so the directed-edge enumeration (node-major, slot order) is
// canonical across runs.
struct Topology {
    std::uint32_t n_nodes = 0;
    std::uint32_t degree = 0;
    std::vector<std::vector<std::uint32_t>> pred; // pred[n] = sorted predecessors of n

    std::size_t n_directed_edges() const {
        return static_cast<std::size_t>(n_nodes) * degree;
    }

    // Directed edge id for slot j of node n; the delay/parameter arrays are
    // indexed with this.
    std::size_t edge_id(std::uint32_t n, std::uint32_t j) const {
        return static_cast<std::size_t>(n) * degree + j;
    }

    // Undirected edge list as sorted (min,max) pairs, lexicographic order.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> undirected_edges() const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        edges.reserve(n_directed_edges() / 2);
        for (std::uint32_t n = 0; n < n_nodes; ++n)
            for (std::uint32_t m : pred[n])
                if (n < m) edges.emplace_back(n, m);
        std::sort(edges.begin(), edges.end());
        return edges;
    }
};

// Draw a random simple k-regular graph with the configuration (pairing)
// model: shuffle n*k stubs, pair them up, and restart from scratch whenever
// the pairing produces a self-loop or a duplicate edge. For k=3 the accept
// rate is ~e^-2, so the 10,000-restart cap is unreachable in practice.
inline Topology generate_random_regular(std::uint32_t n_nodes, std::uint32_t degree,
                                        rng::Stream& stream) {
    if (degree == 0 || n_nodes == 0)
        throw std::invalid_argument("topology: n_nodes and degree must be positive");
    if (degree >= n_nodes)
        throw std::invalid_argument("topology: degree must be smaller than n_nodes");
    if ((static_cast<std::uint64_t>(n_nodes) * degree) % 2 != 0)
        throw std::invalid_argument("topology: n_nodes*degree must be even");

    const std::size_t n_stubs = static_cast<std::size_t>(n_nodes) * degree;
    std::vector<std::uint32_t> stubs(n_stubs);
    constexpr int kMaxRestarts = 10000;

    for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
        for (std::size_t s = 0; s < n_stubs; ++s)
            stubs[s] = static_cast<std::uint32_t>(s / degree);
        // Fisher-Yates over the stub list.
        for (std::size_t s = n_stubs - 1; s > 0; --s) {
            const std::size_t j = static_cast<std::size_t>(stream.next_below(s + 1));
            std::swap(stubs[s], stubs[j]);
        }

        Topology topo;
        topo.n_nodes = n_nodes;
        topo.degree = degree;
        topo.pred.assign(n_nodes, {});
        bool ok = true;
        for (std::size_t s = 0; s < n_stubs && ok; s += 2) {
            const std::uint32_t a = stubs[s];
            const std::uint32_t b = stubs[s + 1];
            if (a == b) {
                ok = false; // self-loop
                break;
            }
            auto& pa = topo.pred[a];
            if (std::find(pa.begin(), pa.end(), b) != pa.end()) {
                ok = false; // duplicate edge
                break;
            }
            pa.push_back(b);
            topo.pred[b].push_back(a);
        }
        if (!ok) continue;
        for (auto& p : topo.pred) std::sort(p.begin(), p.end());
        return topo;
    }
    throw std::runtime_error("topology: pairing failed after 10000 restarts");
}

// All invariant violations, as strings; an empty list means the topology is
// a valid directed realization of a simple k-regular graph.
inline std::vector<std::string> validate(const Topology& topo) {
    std::vector<std::string> violations;
    if (topo.pred.size() != topo.n_nodes) {
        violations.push_back("pred list count " + std::to_string(topo.pred.size()) +
                             " does not match n_nodes " + std::to_string(topo.n_nodes));
        return violations;
    }
    for (std::uint32_t n = 0; n < topo.n_nodes; ++n) {
        const auto& p = topo.pred[n];
        if (p.size() != topo.degree)
            violations.push_back("degree mismatch at " + std::to_string(n));
        for (std::uint32_t m : p) {
            if (m == n) violations.push_back("self-loop at " + std::to_string(n));
            if (m >= topo.n_nodes)
                violations.push_back("out-of-range predecessor at " + std::to_string(n));
        }
        for (std::size_t j = 1; j < p.size(); ++j)
            if (p[j] == p[j - 1])
                violations.push_back("duplicate predecessor " + std::to_string(p[j]) +
                                     " at " + std::to_string(n));
        for (std::uint32_t m : p) {
            if (m >= topo.n_nodes) continue;
            const auto& q = topo.pred[m];
            if (std::find(q.begin(), q.end(), n) == q.end())
                violations.push_back("asymmetric edge " + std::to_string(n) + "<-" +
                                     std::to_string(m));
        }
    }
    return violations;
}

} // namespace hbn
