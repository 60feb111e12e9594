// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hbn/parameters.hpp"
#include "hbn/rng.hpp"
#include "hbn/topology.hpp"

namespace hbn {

// Boolean state of a node: Theta(x - 0.5) with the boundary mapped to 1.
inline std::uint8_t threshold(double x) { return x >= 0.5 ? 1 : 0; }

// Parity of the inputs.
inline std::uint8_t xor_node(std::span<const std::uint8_t> inputs) {
    if (inputs.empty()) throw std::invalid_argument("xor_node: empty input list");
    std::uint8_t acc = 0;
    for (std::uint8_t b : inputs) acc ^= (b & 1);
    return acc;
}

inline std::uint8_t eval_node(NodeFunction fn, std::uint8_t parity) {
    return fn == NodeFunction::Xor ? parity : static_cast<std::uint8_t>(parity ^ 1);
}

// Analog state plus a per-node ring buffer of past Boolean states. Slot
// (step mod hist_len) holds X_n(step); slots not yet written still carry the
// pre-t=0 challenge bits, which models the multiplexers holding the
// challenge on the wires before release.
struct NetworkState {
    std::vector<double> x;
    std::vector<std::uint8_t> history; // n * hist_len + slot
    std::uint32_t hist_len = 1;
    std::int64_t step_index = 0;

    std::uint8_t past_bit(std::uint32_t node, std::uint32_t delay_steps) const {
        std::int64_t slot = (step_index - delay_steps) % hist_len;
        if (slot < 0) slot += hist_len;
        return history[static_cast<std::size_t>(node) * hist_len + slot];
    }
};

struct Trajectory {
    std::uint32_t n_nodes = 0;
    std::vector<std::int64_t> times;   // recorded step indices
    std::vector<std::uint8_t> bits;    // times.size() * n_nodes, step-major
    std::vector<double> analog;        // same layout; empty unless requested

    std::uint8_t bit(std::size_t record, std::uint32_t node) const {
        return bits[record * n_nodes + node];
    }
};

namespace detail {

// Flattened per-instance tables for the inner loop.
struct StepPlan {
    std::uint32_t n_nodes = 0;
    std::uint32_t degree = 0;
    std::uint32_t hist_len = 1;
    std::vector<std::uint32_t> pred;   // n*degree + j
    std::vector<std::uint32_t> delay;  // n*degree + j, in steps
    std::vector<double> gain;          // dt / tau_n
    std::vector<NodeFunction> fn;
};

inline StepPlan make_plan(const ClassSpec& cls, const InstanceParams& inst,
                          const SimConfig& cfg) {
    StepPlan plan;
    plan.n_nodes = cls.topology.n_nodes;
    plan.degree = cls.topology.degree;
    plan.pred.resize(cls.topology.n_directed_edges());
    plan.delay = std::vector<std::uint32_t>(inst.delay_steps.begin(), inst.delay_steps.end());
    std::uint32_t max_delay = 0;
    for (std::uint32_t n = 0; n < plan.n_nodes; ++n)
        for (std::uint32_t j = 0; j < plan.degree; ++j) {
            const std::size_t e = cls.topology.edge_id(n, j);
            plan.pred[e] = cls.topology.pred[n][j];
            max_delay = std::max(max_delay, plan.delay[e]);
        }
    plan.hist_len = max_delay + 1;
    plan.gain.resize(plan.n_nodes);
    for (std::uint32_t n = 0; n < plan.n_nodes; ++n)
        plan.gain[n] = cfg.dt_ns / inst.tau_ns[n];
    plan.fn = cls.node_fn;
    return plan;
}

// One synchronous Euler step: all delayed reads see the pre-update history,
// then the new Boolean states are pushed for step t+1.
inline void step_with_plan(NetworkState& state, const StepPlan& plan,
                           double epsilon, rng::GaussStream* noise,
                           std::vector<double>& x_next) {
    const std::uint32_t n_nodes = plan.n_nodes;
    const std::uint32_t degree = plan.degree;
    const std::uint32_t hist_len = plan.hist_len;
    const std::int64_t cur = state.step_index % hist_len;

    for (std::uint32_t n = 0; n < n_nodes; ++n) {
        std::uint8_t parity = 0;
        const std::size_t base = static_cast<std::size_t>(n) * degree;
        for (std::uint32_t j = 0; j < degree; ++j) {
            const std::uint32_t m = plan.pred[base + j];
            std::int64_t slot = cur - static_cast<std::int64_t>(plan.delay[base + j]);
            if (slot < 0) slot += hist_len;
            parity ^= state.history[static_cast<std::size_t>(m) * hist_len + slot];
        }
        const double f = static_cast<double>(eval_node(plan.fn[n], parity));
        const double eps = (epsilon > 0.0) ? epsilon * noise->next() : 0.0;
        const double x = state.x[n];
        x_next[n] = x + plan.gain[n] * (-x + f + eps);
    }

    const std::int64_t nxt = (cur + 1 == hist_len) ? 0 : cur + 1;
    for (std::uint32_t n = 0; n < n_nodes; ++n) {
        state.x[n] = x_next[n];
        state.history[static_cast<std::size_t>(n) * hist_len + nxt] = threshold(x_next[n]);
    }
    ++state.step_index;
}

} // namespace detail

// State at t=0: the wires carry the raw challenge bits (the held multiplexer
// outputs), and each node starts at its function evaluated over the
// challenge bits of its predecessors.
inline NetworkState initial_state(const ClassSpec& cls, const InstanceParams& inst,
                                  std::span<const std::uint8_t> challenge,
                                  const SimConfig& cfg) {
    const Topology& topo = cls.topology;
    if (challenge.size() != topo.n_nodes)
        throw std::invalid_argument("initial_state: challenge length must equal n_nodes");

    std::uint32_t max_delay = 0;
    for (std::uint32_t d : inst.delay_steps) max_delay = std::max(max_delay, d);

    NetworkState state;
    state.hist_len = max_delay + 1;
    state.step_index = 0;
    state.history.resize(static_cast<std::size_t>(topo.n_nodes) * state.hist_len);
    for (std::uint32_t n = 0; n < topo.n_nodes; ++n)
        for (std::uint32_t s = 0; s < state.hist_len; ++s)
            state.history[static_cast<std::size_t>(n) * state.hist_len + s] = challenge[n] & 1;

    state.x.resize(topo.n_nodes);
    std::vector<std::uint8_t> inputs(topo.degree);
    for (std::uint32_t n = 0; n < topo.n_nodes; ++n) {
        for (std::uint32_t j = 0; j < topo.degree; ++j)
            inputs[j] = challenge[topo.pred[n][j]] & 1;
        state.x[n] = static_cast<double>(eval_node(cls.node_fn[n], xor_node(inputs)));
        // Slot 0 is X_n(0); earlier slots keep the challenge.
        state.history[static_cast<std::size_t>(n) * state.hist_len] = threshold(state.x[n]);
    }
    return state;
}

// Single Euler step of x <- x + (dt/tau)(-x + f(y) + eps), one Gaussian draw
// per node in fixed node order.
inline void step(NetworkState& state, const ClassSpec& cls, const InstanceParams& inst,
                 const SimConfig& cfg, rng::GaussStream* noise = nullptr) {
    const detail::StepPlan plan = detail::make_plan(cls, inst, cfg);
    std::vector<double> x_next(plan.n_nodes);
    detail::step_with_plan(state, plan, noise ? cfg.epsilon : 0.0, noise, x_next);
}

// Integrate a full trajectory of t_int/dt steps, recording the Boolean state
// at every step (decimation happens downstream).
inline Trajectory integrate(const ClassSpec& cls, const InstanceParams& inst,
                            std::span<const std::uint8_t> challenge, const SimConfig& cfg,
                            rng::GaussStream noise, bool record_analog = false) {
    const std::int64_t n_steps = to_steps(cfg.t_int_ns, cfg.dt_ns);
    const detail::StepPlan plan = detail::make_plan(cls, inst, cfg);
    NetworkState state = initial_state(cls, inst, challenge, cfg);

    Trajectory traj;
    traj.n_nodes = plan.n_nodes;
    traj.times.resize(n_steps + 1);
    traj.bits.resize(static_cast<std::size_t>(n_steps + 1) * plan.n_nodes);
    if (record_analog) traj.analog.resize(traj.bits.size());

    const auto record = [&](std::int64_t t) {
        traj.times[t] = t;
        std::uint8_t* row = traj.bits.data() + static_cast<std::size_t>(t) * plan.n_nodes;
        for (std::uint32_t n = 0; n < plan.n_nodes; ++n) row[n] = threshold(state.x[n]);
        if (record_analog) {
            double* arow = traj.analog.data() + static_cast<std::size_t>(t) * plan.n_nodes;
            for (std::uint32_t n = 0; n < plan.n_nodes; ++n) arow[n] = state.x[n];
        }
    };

    record(0);
    std::vector<double> x_next(plan.n_nodes);
    const double epsilon = cfg.epsilon;
    for (std::int64_t t = 0; t < n_steps; ++t) {
        detail::step_with_plan(state, plan, epsilon, &noise, x_next);
        record(t + 1);
    }
    return traj;
}

} // namespace hbn
