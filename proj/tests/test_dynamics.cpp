// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "hbn/dynamics.hpp"
#include "hbn/parameters.hpp"
#include "hbn/topology.hpp"

using namespace hbn;
using rng::GaussStream;
using rng::Purpose;
using rng::Stream;

namespace {

Topology k4() {
    Stream s(1, Purpose::Topology);
    return generate_random_regular(4, 3, s);
}

// Two mutually-coupled nodes with identity node function (XOR of one input).
struct TwoNode {
    ClassSpec cls;
    InstanceParams inst;
    SimConfig cfg;
};

TwoNode two_node(std::uint32_t delay_01, std::uint32_t delay_10,
                 double tau0 = 0.25, double tau1 = 0.25) {
    TwoNode net;
    net.cls.topology.n_nodes = 2;
    net.cls.topology.degree = 1;
    net.cls.topology.pred = {{1}, {0}};
    net.cls.node_fn = {NodeFunction::Xor, NodeFunction::Xor};
    net.cls.mean_delay_ns = {delay_01 * 0.01, delay_10 * 0.01};
    net.inst.tau_ns = {tau0, tau1};
    net.inst.delay_steps = {delay_01, delay_10};
    net.cfg.n_nodes = 2;
    net.cfg.degree = 1;
    net.cfg.epsilon = 0.0;
    return net;
}

ClassSpec class_for(const Topology& topo, const SimConfig& cfg, std::uint64_t seed) {
    Stream s(seed, Purpose::ClassDelay);
    return sample_class(topo, cfg, s);
}

InstanceParams instance_for(const ClassSpec& cls, const SimConfig& cfg, std::uint64_t seed,
                            std::uint32_t i = 0) {
    Stream tau(seed, Purpose::InstTau, 0, i), del(seed, Purpose::InstDelay, 0, i);
    return sample_instance(cls, cfg, tau, del, i);
}

} // namespace

TEST_CASE("threshold maps the 0.5 boundary to 1") {
    CHECK(threshold(0.7) == 1);
    CHECK(threshold(0.3) == 0);
    CHECK(threshold(0.5) == 1);
}

TEST_CASE("xor_node computes parity") {
    const std::vector<std::uint8_t> zeros{0, 0, 0}, one{1, 0, 0}, ones{1, 1, 1};
    CHECK(xor_node(zeros) == 0);
    CHECK(xor_node(one) == 1);
    CHECK(xor_node(ones) == 1);
    CHECK(eval_node(NodeFunction::Xnor, xor_node(one)) == 0);
    const std::vector<std::uint8_t> empty;
    CHECK_THROWS_AS(xor_node(empty), std::invalid_argument);
}

TEST_CASE("initial_state evaluates node functions over the challenge") {
    SimConfig cfg;
    cfg.n_nodes = 4;
    const ClassSpec cls = class_for(k4(), cfg, 2);
    const InstanceParams inst = instance_for(cls, cfg, 2);

    const std::vector<std::uint8_t> zeros{0, 0, 0, 0};
    NetworkState state = initial_state(cls, inst, zeros, cfg);
    CHECK(state.x == std::vector<double>{0, 0, 0, 0});

    const std::vector<std::uint8_t> spike{1, 0, 0, 0};
    state = initial_state(cls, inst, spike, cfg);
    CHECK(state.x == std::vector<double>{0, 1, 1, 1});

    // Pre-t=0 history carries the raw challenge bits.
    for (std::uint32_t n = 0; n < 4; ++n)
        if (state.hist_len > 1) CHECK(state.past_bit(n, 1) == spike[n]);

    NetworkState again = initial_state(cls, inst, spike, cfg);
    CHECK(state.x == again.x);
    CHECK(state.history == again.history);

    const std::vector<std::uint8_t> short_challenge{1, 0};
    CHECK_THROWS_AS(initial_state(cls, inst, short_challenge, cfg), std::invalid_argument);
}

TEST_CASE("step applies the Euler update") {
    TwoNode net = two_node(0, 0);

    SECTION("x=0, f=1 moves by dt/tau") {
        NetworkState state;
        state.hist_len = 1;
        state.x = {0.0, 1.0};
        state.history = {0, 1}; // node 0 reads X_1 = 1, node 1 reads X_0 = 0
        step(state, net.cls, net.inst, net.cfg);
        CHECK_THAT(state.x[0], Catch::Matchers::WithinAbs(0.04, 1e-15));
        CHECK_THAT(state.x[1], Catch::Matchers::WithinAbs(0.96, 1e-15));
        CHECK(state.step_index == 1);
    }
    SECTION("x=1, f=1 is a fixed point") {
        NetworkState state;
        state.hist_len = 1;
        state.x = {1.0, 1.0};
        state.history = {1, 1};
        step(state, net.cls, net.inst, net.cfg);
        CHECK(state.x == std::vector<double>{1.0, 1.0});
    }
    SECTION("x=0.5, f=0 decays") {
        NetworkState state;
        state.hist_len = 1;
        state.x = {0.5, 0.5};
        state.history = {0, 0};
        step(state, net.cls, net.inst, net.cfg);
        CHECK_THAT(state.x[0], Catch::Matchers::WithinAbs(0.48, 1e-15));
    }
}

TEST_CASE("noise draws are consumed in node order") {
    TwoNode net = two_node(0, 0);
    net.cfg.epsilon = 0.01;

    NetworkState state;
    state.hist_len = 1;
    state.x = {0.25, 0.75};
    state.history = {0, 1};

    GaussStream noise{Stream(17, Purpose::Noise)};
    GaussStream expected_noise{Stream(17, Purpose::Noise)};
    step(state, net.cls, net.inst, net.cfg, &noise);

    const double z0 = expected_noise.next();
    const double z1 = expected_noise.next();
    const double gain = 0.01 / 0.25;
    CHECK(state.x[0] == 0.25 + gain * (-0.25 + 1.0 + 0.01 * z0));
    CHECK(state.x[1] == 0.75 + gain * (-0.75 + 0.0 + 0.01 * z1));
}

TEST_CASE("integrate: all-zeros challenge pins the network at zero") {
    SimConfig cfg;
    cfg.n_nodes = 16;
    cfg.epsilon = 0.0;
    Stream ts(4, Purpose::Topology);
    const Topology topo = generate_random_regular(16, 3, ts);
    const ClassSpec cls = class_for(topo, cfg, 4);
    const InstanceParams inst = instance_for(cls, cfg, 4);

    const std::vector<std::uint8_t> zeros(16, 0);
    const Trajectory traj =
        integrate(cls, inst, zeros, cfg, GaussStream{Stream(4, Purpose::Noise)});
    REQUIRE(traj.times.size() == static_cast<std::size_t>(to_steps(cfg.t_int_ns, cfg.dt_ns)) + 1);
    for (std::uint8_t b : traj.bits) CHECK(b == 0);
}

TEST_CASE("integrate is deterministic and sigma=0 instances coincide") {
    SimConfig cfg;
    cfg.n_nodes = 16;
    cfg.sigma = 0.0;
    cfg.epsilon = 0.0;
    Stream ts(8, Purpose::Topology);
    const Topology topo = generate_random_regular(16, 3, ts);
    const ClassSpec cls = class_for(topo, cfg, 8);
    const InstanceParams inst_a = instance_for(cls, cfg, 8, 0);
    const InstanceParams inst_b = instance_for(cls, cfg, 8, 1);

    std::vector<std::uint8_t> challenge(16, 0);
    for (std::uint32_t n = 0; n < 16; n += 3) challenge[n] = 1;

    const Trajectory t1 =
        integrate(cls, inst_a, challenge, cfg, GaussStream{Stream(8, Purpose::Noise)});
    const Trajectory t2 =
        integrate(cls, inst_a, challenge, cfg, GaussStream{Stream(8, Purpose::Noise)});
    const Trajectory t3 =
        integrate(cls, inst_b, challenge, cfg, GaussStream{Stream(8, Purpose::Noise, 0, 1)});
    CHECK(t1.bits == t2.bits);
    CHECK(t1.bits == t3.bits);
}

TEST_CASE("repeated step calls reproduce integrate") {
    SimConfig cfg;
    cfg.n_nodes = 8;
    cfg.epsilon = 0.01;
    cfg.t_int_ns = 1.0;
    Stream ts(6, Purpose::Topology);
    const Topology topo = generate_random_regular(8, 3, ts);
    const ClassSpec cls = class_for(topo, cfg, 6);
    const InstanceParams inst = instance_for(cls, cfg, 6);

    std::vector<std::uint8_t> challenge{1, 0, 1, 1, 0, 0, 1, 0};
    const Trajectory traj =
        integrate(cls, inst, challenge, cfg, GaussStream{Stream(21, Purpose::Noise)});

    NetworkState state = initial_state(cls, inst, challenge, cfg);
    GaussStream noise{Stream(21, Purpose::Noise)};
    const std::int64_t n_steps = to_steps(cfg.t_int_ns, cfg.dt_ns);
    for (std::int64_t t = 0; t <= n_steps; ++t) {
        for (std::uint32_t n = 0; n < 8; ++n)
            REQUIRE(traj.bit(static_cast<std::size_t>(t), n) == threshold(state.x[n]));
        if (t < n_steps) step(state, cls, inst, cfg, &noise);
    }
}

TEST_CASE("delayed bits arrive exactly on schedule") {
    // Independent straight-line re-simulation of a two-node network with
    // asymmetric delays, keeping the whole history in plain arrays.
    TwoNode net = two_node(3, 5, 0.25, 0.2);
    net.cfg.t_int_ns = 2.0; // 200 steps
    const std::vector<std::uint8_t> challenge{1, 0};

    const std::int64_t n_steps = to_steps(net.cfg.t_int_ns, net.cfg.dt_ns);
    std::vector<std::array<double, 2>> x(n_steps + 1);
    std::vector<std::array<std::uint8_t, 2>> bits(n_steps + 1);
    // x(0) = f over predecessor challenge bits; wires carry the challenge.
    x[0] = {static_cast<double>(challenge[1]), static_cast<double>(challenge[0])};
    bits[0] = {threshold(x[0][0]), threshold(x[0][1])};
    const auto delayed = [&](std::int64_t t, int node, std::uint32_t d) -> double {
        const std::int64_t src = t - static_cast<std::int64_t>(d);
        return src < 0 ? challenge[node] : bits[src][node];
    };
    const double gain0 = net.cfg.dt_ns / net.inst.tau_ns[0];
    const double gain1 = net.cfg.dt_ns / net.inst.tau_ns[1];
    for (std::int64_t t = 0; t < n_steps; ++t) {
        const double f0 = delayed(t, 1, net.inst.delay_steps[0]); // node 0 reads node 1
        const double f1 = delayed(t, 0, net.inst.delay_steps[1]); // node 1 reads node 0
        x[t + 1][0] = x[t][0] + gain0 * (-x[t][0] + f0 + 0.0);
        x[t + 1][1] = x[t][1] + gain1 * (-x[t][1] + f1 + 0.0);
        bits[t + 1] = {threshold(x[t + 1][0]), threshold(x[t + 1][1])};
    }

    const Trajectory traj = integrate(net.cls, net.inst, challenge, net.cfg,
                                      GaussStream{Stream(0, Purpose::Noise)}, true);
    for (std::int64_t t = 0; t <= n_steps; ++t) {
        CAPTURE(t);
        REQUIRE(traj.bit(static_cast<std::size_t>(t), 0) == bits[t][0]);
        REQUIRE(traj.bit(static_cast<std::size_t>(t), 1) == bits[t][1]);
        REQUIRE(traj.analog[static_cast<std::size_t>(t) * 2 + 0] == x[t][0]);
        REQUIRE(traj.analog[static_cast<std::size_t>(t) * 2 + 1] == x[t][1]);
    }
}

TEST_CASE("a Boolean fixed point never moves") {
    // All-ones is a fixed point of XOR networks with odd degree.
    SimConfig cfg;
    cfg.n_nodes = 16;
    cfg.epsilon = 0.0;
    Stream ts(12, Purpose::Topology);
    const Topology topo = generate_random_regular(16, 3, ts);
    const ClassSpec cls = class_for(topo, cfg, 12);
    const InstanceParams inst = instance_for(cls, cfg, 12);

    const std::vector<std::uint8_t> ones(16, 1);
    const Trajectory traj =
        integrate(cls, inst, ones, cfg, GaussStream{Stream(12, Purpose::Noise)}, true);
    for (std::uint8_t b : traj.bits) CHECK(b == 1);
    for (double v : traj.analog) CHECK(v == 1.0);
}

TEST_CASE("noise-free trajectories stay inside [0,1]") {
    SimConfig cfg;
    cfg.n_nodes = 16;
    cfg.epsilon = 0.0;
    cfg.t_int_ns = 3.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Stream ts(seed, Purpose::Topology);
        const Topology topo = generate_random_regular(16, 3, ts);
        const ClassSpec cls = class_for(topo, cfg, seed);
        const InstanceParams inst = instance_for(cls, cfg, seed);
        std::vector<std::uint8_t> challenge(16);
        Stream cs(seed, Purpose::Challenge);
        for (auto& b : challenge) b = cs.next_below(2);
        const Trajectory traj = integrate(cls, inst, challenge, cfg,
                                          GaussStream{Stream(seed, Purpose::Noise)}, true);
        for (double v : traj.analog) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
    }
}
