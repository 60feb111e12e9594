// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <cstdint>
#include <set>
#include <thread>
#include <vector>

#include "hbn/bit_tensor.hpp"
#include "hbn/dynamics.hpp"
#include "hbn/parameters.hpp"
#include "hbn/rng.hpp"
#include "hbn/topology.hpp"

namespace hbn {

struct ChallengeSet {
    std::uint32_t n_nodes = 0;
    std::vector<std::vector<std::uint8_t>> challenges; // each of length n_nodes
};

// The full generated dataset: packed responses plus everything needed to
// regenerate or interpret them.
struct ResponseTensor {
    TensorDims dims;
    std::vector<double> sample_times_ns; // experiment-relative readout times
    BitArray bits;
    SimConfig config;
    std::vector<ClassSpec> classes;

    bool get(std::uint32_t s, std::uint32_t i, std::uint32_t c, std::uint32_t r,
             std::uint32_t n, std::uint32_t t) const {
        return bits.get(dims.bit_index(s, i, c, r, n, t));
    }
};

// Uniform distinct challenges. With exclude_fixed_points set, the uniform
// bit-vectors that are XOR fixed points regardless of wiring are rejected:
// all-zeros always, all-ones when the in-degree is odd.
inline ChallengeSet sample_challenges(std::uint32_t n_challenges, std::uint32_t n_nodes,
                                      rng::Stream& stream, bool exclude_fixed_points = false,
                                      std::uint32_t degree = 3) {
    if (n_nodes == 0) throw std::invalid_argument("sample_challenges: n_nodes must be positive");
    std::uint64_t space = 0; // 0 means "at least 2^64"
    if (n_nodes < 64) {
        space = std::uint64_t{1} << n_nodes;
        std::uint64_t excluded = 0;
        if (exclude_fixed_points) excluded = (degree % 2 == 1) ? 2 : 1;
        if (n_challenges > space - excluded)
            throw std::invalid_argument("sample_challenges: more challenges than distinct "
                                        "bit-vectors available");
    }

    const std::uint32_t n_words = (n_nodes + 63) / 64;
    std::set<std::vector<std::uint64_t>> seen;
    ChallengeSet out;
    out.n_nodes = n_nodes;
    out.challenges.reserve(n_challenges);

    const std::uint64_t max_attempts =
        std::max<std::uint64_t>(1000000, std::uint64_t{1000} * n_challenges);
    std::uint64_t attempts = 0;
    while (out.challenges.size() < n_challenges) {
        if (++attempts > max_attempts)
            throw std::runtime_error("sample_challenges: rejection sampling exhausted");
        std::vector<std::uint64_t> words(n_words);
        for (auto& w : words) w = stream.next_u64();
        if (n_nodes % 64 != 0) words.back() &= (std::uint64_t{1} << (n_nodes % 64)) - 1;

        if (exclude_fixed_points) {
            bool all_zero = true, all_one = true;
            for (std::uint32_t n = 0; n < n_nodes; ++n) {
                const bool b = (words[n >> 6] >> (n & 63)) & 1;
                all_zero &= !b;
                all_one &= b;
            }
            if (all_zero || (all_one && degree % 2 == 1)) continue;
        }
        if (!seen.insert(words).second) continue;

        std::vector<std::uint8_t> bits(n_nodes);
        for (std::uint32_t n = 0; n < n_nodes; ++n)
            bits[n] = (words[n >> 6] >> (n & 63)) & 1;
        out.challenges.push_back(std::move(bits));
    }
    return out;
}

// Project a full trajectory onto the measurement grid: sample k lands at
// simulation time discard + k*interval for k = 1..T, reported downstream as
// experiment-relative time k*interval. Returns an n_nodes x T bit matrix,
// node-major.
inline std::vector<std::uint8_t> decimate(const Trajectory& traj, const SimConfig& cfg) {
    const std::int64_t interval = to_steps(cfg.sample_interval_ns, cfg.dt_ns);
    const std::int64_t discard = to_steps(cfg.discard_ns, cfg.dt_ns);
    const std::int64_t window = to_steps(cfg.t_int_ns, cfg.dt_ns) - discard;
    if (interval <= 0 || window < interval)
        throw std::invalid_argument("decimate: no samples between discard and t_int");
    const std::int64_t n_samples = window / interval;

    const std::int64_t last_step = discard + n_samples * interval;
    if (traj.times.empty() || traj.times.back() < last_step ||
        traj.times.size() != static_cast<std::size_t>(traj.times.back()) + 1)
        throw std::invalid_argument("decimate: trajectory does not cover the sample grid");

    std::vector<std::uint8_t> out(static_cast<std::size_t>(traj.n_nodes) * n_samples);
    for (std::int64_t k = 1; k <= n_samples; ++k) {
        const std::size_t record = static_cast<std::size_t>(discard + k * interval);
        for (std::uint32_t n = 0; n < traj.n_nodes; ++n)
            out[static_cast<std::size_t>(n) * n_samples + (k - 1)] = traj.bit(record, n);
    }
    return out;
}

inline std::vector<double> sample_times_ns(const SimConfig& cfg) {
    const std::uint32_t n = cfg.n_sample_times();
    std::vector<double> times(n);
    for (std::uint32_t k = 0; k < n; ++k) times[k] = (k + 1) * cfg.sample_interval_ns;
    return times;
}

// Generate the full class -> instance -> CRP dataset. Every random draw
// comes from a stream keyed by (seed, purpose, s, i, c, r), so the packed
// bits are identical for any thread count or task ordering.
inline ResponseTensor generate_dataset(const SimConfig& cfg, unsigned threads = 0) {
    {
        const auto violations = validate(cfg);
        if (!violations.empty()) throw std::invalid_argument("config: " + violations.front());
    }

    ResponseTensor tensor;
    tensor.config = cfg;
    tensor.dims = {cfg.n_classes, cfg.n_instances, cfg.n_challenges,
                   cfg.n_repeats,  cfg.n_nodes,    cfg.n_sample_times()};
    tensor.sample_times_ns = sample_times_ns(cfg);
    tensor.bits = BitArray(tensor.dims.total_bits());

    ChallengeSet challenge_set = [&] {
        rng::Stream s(cfg.master_seed, rng::Purpose::Challenge);
        return sample_challenges(cfg.n_challenges, cfg.n_nodes, s,
                                 cfg.exclude_fixed_point_challenges, cfg.degree);
    }();

    tensor.classes.reserve(cfg.n_classes);
    std::vector<std::vector<InstanceParams>> instances(cfg.n_classes);
    for (std::uint32_t s = 0; s < cfg.n_classes; ++s) {
        rng::Stream topo_stream(cfg.master_seed, rng::Purpose::Topology, s);
        const Topology topo = generate_random_regular(cfg.n_nodes, cfg.degree, topo_stream);
        rng::Stream delay_stream(cfg.master_seed, rng::Purpose::ClassDelay, s);
        tensor.classes.push_back(sample_class(topo, cfg, delay_stream, s));
        instances[s].reserve(cfg.n_instances);
        for (std::uint32_t i = 0; i < cfg.n_instances; ++i) {
            rng::Stream tau_stream(cfg.master_seed, rng::Purpose::InstTau, s, i);
            rng::Stream inst_delay_stream(cfg.master_seed, rng::Purpose::InstDelay, s, i);
            instances[s].push_back(
                sample_instance(tensor.classes[s], cfg, tau_stream, inst_delay_stream, i));
        }
    }

    const std::uint64_t n_tasks = tensor.dims.trajectory_count();
    const std::uint32_t n_times = tensor.dims.n_times;
    std::atomic<std::uint64_t> next_task{0};

    const auto worker = [&] {
        for (;;) {
            const std::uint64_t task = next_task.fetch_add(1, std::memory_order_relaxed);
            if (task >= n_tasks) return;
            const std::uint32_t r = static_cast<std::uint32_t>(task % cfg.n_repeats);
            std::uint64_t rest = task / cfg.n_repeats;
            const std::uint32_t c = static_cast<std::uint32_t>(rest % cfg.n_challenges);
            rest /= cfg.n_challenges;
            const std::uint32_t i = static_cast<std::uint32_t>(rest % cfg.n_instances);
            const std::uint32_t s = static_cast<std::uint32_t>(rest / cfg.n_instances);

            rng::GaussStream noise{rng::Stream(cfg.master_seed, rng::Purpose::Noise, s, i, c, r)};
            const Trajectory traj = integrate(tensor.classes[s], instances[s][i],
                                              challenge_set.challenges[c], cfg, noise);
            const std::vector<std::uint8_t> sampled = decimate(traj, cfg);
            const std::uint64_t base = tensor.dims.bit_index(s, i, c, r, 0, 0);
            for (std::size_t b = 0; b < sampled.size(); ++b)
                if (sampled[b]) tensor.bits.set_atomic(base + b);
        }
    };

    unsigned n_threads = threads ? threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(n_threads, std::max<std::uint64_t>(n_tasks, 1)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return tensor;
}

} // namespace hbn
