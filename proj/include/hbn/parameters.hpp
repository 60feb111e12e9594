// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hbn/rng.hpp"
#include "hbn/topology.hpp"

namespace hbn {

// Normalization of the averaged pairwise Hamming distance: the true mean
// over unordered pairs N(N-1)/2, or the N(N+1)/2 prefactor some texts print.
enum class PairNorm : std::uint8_t { PairCount = 0, PaperLiteral = 1 };

enum class NodeFunction : std::uint8_t { Xor = 0, Xnor = 1 };

// All times are in nanoseconds. Defaults are the Cyclone V values: mean node
// timescale 0.25 ns, timestep tau/25, integration over 42*tau, uniform edge
// delays up to 10*tau, and readout every 2*tau after discarding the first
// 2*tau.
struct SimConfig {
    double tau_mean_ns = 0.25;
    double dt_ns = 0.01;
    double t_int_ns = 10.5;
    double sigma = 0.05;   // manufacturing std-dev, in units of tau_mean
    double epsilon = 0.01; // per-step Gaussian noise std-dev
    double delay_max_ns = 2.5;
    double sample_interval_ns = 0.5;
    double discard_ns = 0.5;

    std::uint32_t n_classes = 15;
    std::uint32_t n_instances = 15;
    std::uint32_t n_challenges = 15;
    std::uint32_t n_repeats = 15;
    std::uint32_t n_nodes = 256;
    std::uint32_t degree = 3;

    std::uint64_t master_seed = 1;
    PairNorm pair_norm = PairNorm::PairCount;
    bool exclude_fixed_point_challenges = false;

    std::uint32_t n_sample_times() const {
        return static_cast<std::uint32_t>(
            std::llround((t_int_ns - discard_ns) / sample_interval_ns));
    }

    bool operator==(const SimConfig&) const = default;
};

// Convert a time to integration steps; the time must sit on the dt grid.
inline std::int64_t to_steps(double time_ns, double dt_ns) {
    if (dt_ns <= 0.0) throw std::invalid_argument("to_steps: dt must be positive");
    const double q = time_ns / dt_ns;
    const std::int64_t k = std::llround(q);
    if (std::abs(q - static_cast<double>(k)) > 1e-6)
        throw std::invalid_argument("to_steps: time is not a multiple of dt");
    return k;
}

inline bool is_step_multiple(double time_ns, double dt_ns) {
    if (dt_ns <= 0.0) return false;
    const double q = time_ns / dt_ns;
    return std::abs(q - std::round(q)) <= 1e-6;
}

// Field-prefixed violation messages; empty means the config is usable.
inline std::vector<std::string> validate(const SimConfig& cfg) {
    std::vector<std::string> v;
    if (!(cfg.tau_mean_ns > 0.0)) v.push_back("tau_mean_ns: must be positive");
    if (!(cfg.dt_ns > 0.0)) v.push_back("dt_ns: must be positive");
    if (cfg.dt_ns > 0.0) {
        if (!(cfg.t_int_ns > 0.0) || !is_step_multiple(cfg.t_int_ns, cfg.dt_ns))
            v.push_back("t_int_ns: must be a positive multiple of dt_ns");
        if (!(cfg.delay_max_ns > 0.0) || !is_step_multiple(cfg.delay_max_ns, cfg.dt_ns))
            v.push_back("delay_max_ns: must be a positive multiple of dt_ns");
        if (!(cfg.sample_interval_ns > 0.0) || !is_step_multiple(cfg.sample_interval_ns, cfg.dt_ns))
            v.push_back("sample_interval_ns: must be a positive multiple of dt_ns");
        if (!(cfg.discard_ns > 0.0) || !is_step_multiple(cfg.discard_ns, cfg.dt_ns))
            v.push_back("discard_ns: must be a positive multiple of dt_ns");
        const double window = cfg.t_int_ns - cfg.discard_ns;
        if (cfg.sample_interval_ns > 0.0) {
            const double q = window / cfg.sample_interval_ns;
            if (q < 1.0 - 1e-9 || std::abs(q - std::round(q)) > 1e-6)
                v.push_back("t_int_ns: t_int - discard must be a positive multiple of "
                            "sample_interval_ns");
        }
    }
    if (cfg.sigma < 0.0) v.push_back("sigma: must be non-negative");
    if (cfg.epsilon < 0.0) v.push_back("epsilon: must be non-negative");
    if (cfg.n_classes < 1) v.push_back("n_classes: must be at least 1");
    if (cfg.n_instances < 1) v.push_back("n_instances: must be at least 1");
    if (cfg.n_challenges < 1) v.push_back("n_challenges: must be at least 1");
    if (cfg.n_repeats < 1) v.push_back("n_repeats: must be at least 1");
    if (cfg.n_classes > rng::Stream::kMaxClass)
        v.push_back("n_classes: exceeds the stream-addressing limit");
    if (cfg.n_instances > rng::Stream::kMaxInstance)
        v.push_back("n_instances: exceeds the stream-addressing limit");
    if (cfg.n_repeats > rng::Stream::kMaxRepeat)
        v.push_back("n_repeats: exceeds the stream-addressing limit");
    if (cfg.n_nodes < 2) v.push_back("n_nodes: must be at least 2");
    if (cfg.degree < 1) v.push_back("degree: must be at least 1");
    if (cfg.degree >= cfg.n_nodes) v.push_back("degree: must be smaller than n_nodes");
    if ((static_cast<std::uint64_t>(cfg.n_nodes) * cfg.degree) % 2 != 0)
        v.push_back("degree: n_nodes*degree must be even");
    if (cfg.n_nodes < 64 && cfg.n_challenges > (std::uint64_t{1} << cfg.n_nodes))
        v.push_back("n_challenges: exceeds 2^n_nodes distinct challenges");
    return v;
}

// A circuit netlist: topology plus the class-level mean parameters shared by
// every instance programmed from it.
struct ClassSpec {
    std::uint32_t class_index = 0;
    Topology topology;
    double tau_mean_ns = 0.25;
    std::vector<double> mean_delay_ns;      // per directed edge, edge_id order
    std::vector<NodeFunction> node_fn;      // per node
};

// One manufactured realization: perturbed time constants and edge delays
// already quantized onto the integration grid.
struct InstanceParams {
    std::uint32_t class_index = 0;
    std::uint32_t instance_index = 0;
    std::vector<double> tau_ns;             // per node
    std::vector<std::uint32_t> delay_steps; // per directed edge, edge_id order
};

// Nearest multiple of dt, ties rounding up (half away from zero on the
// non-negative domain). The small tolerance keeps mathematically-exact ties
// like 0.025/0.01 from landing just below .5 in floating point.
inline std::uint32_t quantize_delay(double delay_ns, double dt_ns) {
    if (delay_ns < 0.0) throw std::invalid_argument("quantize_delay: negative delay");
    if (!(dt_ns > 0.0)) throw std::invalid_argument("quantize_delay: dt must be positive");
    const double q = delay_ns / dt_ns;
    double whole = std::floor(q);
    if (q - whole >= 0.5 - 1e-9) whole += 1.0;
    return static_cast<std::uint32_t>(whole);
}

// Mean edge delays i.i.d. uniform on [0, delay_max], one draw per directed
// edge in canonical edge order.
inline ClassSpec sample_class(const Topology& topology, const SimConfig& cfg,
                              rng::Stream& stream, std::uint32_t class_index = 0) {
    ClassSpec cls;
    cls.class_index = class_index;
    cls.topology = topology;
    cls.tau_mean_ns = cfg.tau_mean_ns;
    cls.mean_delay_ns.resize(topology.n_directed_edges());
    for (double& d : cls.mean_delay_ns) d = stream.next_double() * cfg.delay_max_ns;
    cls.node_fn.assign(topology.n_nodes, NodeFunction::Xor);
    return cls;
}

// Perturb a class into one instance: tau_n ~ N(tau_mean, (sigma*tau_mean)^2)
// resampled until positive, delays |N(mean, (sigma*tau_mean)^2)| quantized.
// tau and delay perturbations come from separate streams so that varying
// sigma rescales the same underlying draws.
inline InstanceParams sample_instance(const ClassSpec& cls, const SimConfig& cfg,
                                      rng::Stream& tau_stream, rng::Stream& delay_stream,
                                      std::uint32_t instance_index = 0) {
    InstanceParams inst;
    inst.class_index = cls.class_index;
    inst.instance_index = instance_index;

    const double spread = cfg.sigma * cfg.tau_mean_ns;
    rng::GaussStream tau_gauss{tau_stream};
    inst.tau_ns.resize(cls.topology.n_nodes);
    for (double& tau : inst.tau_ns) {
        int attempts = 0;
        do {
            tau = cls.tau_mean_ns + spread * tau_gauss.next();
            if (++attempts > 1000)
                throw std::runtime_error("sample_instance: tau resampling failed 1000 times");
        } while (!(tau > 0.0));
    }

    rng::GaussStream delay_gauss{delay_stream};
    inst.delay_steps.resize(cls.mean_delay_ns.size());
    for (std::size_t e = 0; e < inst.delay_steps.size(); ++e) {
        const double d = std::abs(cls.mean_delay_ns[e] + spread * delay_gauss.next());
        inst.delay_steps[e] = quantize_delay(d, cfg.dt_ns);
    }
    return inst;
}

} // namespace hbn
